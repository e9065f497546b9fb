#include <benchmark/benchmark.h>

#include <random>

#include "contain/linalg.hpp"
#include "contain/synthesis.hpp"

namespace {

using contain::Matrix;

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
  return m;
}

void BM_SymEigs(benchmark::State& state) {
  const Matrix s = random_symmetric(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(contain::sym_eigs(s));
}
BENCHMARK(BM_SymEigs)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_LyapSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  // -(G G^T + I) is Hurwitz
  Matrix g = random_symmetric(n, 11);
  const Matrix f = -1.0 * (g * g.transpose() + Matrix::identity(n));
  const Matrix q = Matrix::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(contain::lyap_solve(f, q));
}
BENCHMARK(BM_LyapSolve)->Arg(2)->Arg(4)->Arg(8);

void BM_CareSolveAgentModel(benchmark::State& state) {
  const Matrix a{{0, 1}, {-1, 1}};
  const Matrix b{{0}, {1}};
  const Matrix q = Matrix::identity(2);
  for (auto _ : state) benchmark::DoNotOptimize(contain::care_solve(a, b, q));
}
BENCHMARK(BM_CareSolveAgentModel);

void BM_CareSolveChain(benchmark::State& state) {
  // integrator chain of length n, input on the last state
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix a(n, n), b(n, 1);
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  b(n - 1, 0) = 1.0;
  const Matrix q = Matrix::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(contain::care_solve(a, b, q));
}
BENCHMARK(BM_CareSolveChain)->Arg(2)->Arg(4)->Arg(6);

}  // namespace
