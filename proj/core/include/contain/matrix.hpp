#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace contain {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix column(std::span<const double> values);
  static Matrix diagonal(std::span<const double> values);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  [[nodiscard]] bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

/// y = m * x
Vector apply(const Matrix& m, std::span<const double> x);
/// y += m * x, y sized m.rows()
void apply_add(const Matrix& m, std::span<const double> x, std::span<double> y);

[[nodiscard]] double frobenius_norm(const Matrix& m) noexcept;
[[nodiscard]] double max_abs(const Matrix& m) noexcept;
[[nodiscard]] double norm2(std::span<const double> v) noexcept;
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] bool all_finite(std::span<const double> v) noexcept;

/// Largest per-entry |m(i,j) - m(j,i)|; m must be square.
[[nodiscard]] double asymmetry(const Matrix& m) noexcept;
/// (m + m^T) / 2
[[nodiscard]] Matrix symmetrize(const Matrix& m);

/// Kronecker product a ⊗ b.
[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace contain
