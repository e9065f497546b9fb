#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "contain/error.hpp"
#include "contain/matrix.hpp"
#include "contain/scenario_io.hpp"

namespace contain::testing {

inline ::testing::AssertionResult matrices_near(const Matrix& actual, const Matrix& expected, double tol) {
  if (actual.rows() != expected.rows() || actual.cols() != expected.cols()) {
    return ::testing::AssertionFailure() << "shape " << actual.rows() << "x" << actual.cols() << " vs "
                                         << expected.rows() << "x" << expected.cols();
  }
  for (std::size_t r = 0; r < actual.rows(); ++r)
    for (std::size_t c = 0; c < actual.cols(); ++c)
      if (!(std::abs(actual(r, c) - expected(r, c)) <= tol)) {
        return ::testing::AssertionFailure() << "entry (" << r << "," << c << "): " << actual(r, c) << " vs "
                                             << expected(r, c) << " (tol " << tol << ")\n"
                                             << format_matrix(actual);
      }
  return ::testing::AssertionSuccess();
}

#define EXPECT_MATRIX_NEAR(a, b, tol) EXPECT_TRUE(::contain::testing::matrices_near((a), (b), (tol)))

/// Runs `body` and checks that it throws contain::Error with `code`.
#define EXPECT_ERROR_CODE(stmt, expected_code)                                         \
  do {                                                                                 \
    try {                                                                              \
      stmt;                                                                            \
      ADD_FAILURE() << "expected " << ::contain::to_string(expected_code) << " from " #stmt; \
    } catch (const ::contain::Error& e) {                                              \
      EXPECT_EQ(e.code(), expected_code) << e.what();                                  \
    }                                                                                  \
  } while (0)

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) { return symmetrize(random_matrix(rng, n, n)); }

/// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("contain_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace contain::testing
