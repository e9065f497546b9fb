#pragma once

#include <cstddef>
#include <vector>

namespace contain {

/// One classic fourth-order Runge–Kutta step of y' = f(t, y).
/// `f` is callable as `std::vector<double>(double, const std::vector<double>&)`.
template <typename F>
std::vector<double> rk4_step(const F& f, double t, const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> tmp(n);

  const auto k1 = f(t, y);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const auto k2 = f(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const auto k3 = f(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  const auto k4 = f(t + h, tmp);

  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return next;
}

/// Integrates `steps` fixed steps from t0; returns the final state.
template <typename F>
std::vector<double> rk4_integrate(const F& f, double t0, std::vector<double> y, double h, std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) y = rk4_step(f, t0 + static_cast<double>(k) * h, y, h);
  return y;
}

}  // namespace contain
