#pragma once

#include <optional>
#include <string_view>

namespace contain {

/// Tolerances shared by the numerical routines. One process-wide record;
/// set it before spawning worker threads, read-only afterwards.
struct NumericSettings {
  double solve_rel_tol = 1e-9;     // relative residual for linear/Lyapunov/Riccati solves
  double eig_rel_tol = 1e-10;      // Jacobi off-diagonal stopping threshold (relative)
  double pivot_floor = 1e-12;      // Singular when |pivot| < pivot_floor * ||A||_F
  double symmetry_tol = 1e-9;      // per-entry asymmetry accepted as symmetric
  double hurwitz_min_eig = 1e-10;  // Lyapunov certificate must exceed this
  double rank_rel_tol = 1e-9;      // rank decisions relative to max |entry|
  int care_max_iter = 100;
  int jacobi_max_sweeps = 100;
};

[[nodiscard]] const NumericSettings& numeric_settings() noexcept;
void set_numeric_settings(const NumericSettings& settings) noexcept;

/// Parses an override string of the form "key=value[,key=value...]" on top of
/// `base`. Keys: solve, eig, pivot, symmetry, hurwitz, rank, care_iter,
/// jacobi_sweeps. A bare number overrides `solve`. Returns nullopt on syntax
/// errors or unknown keys.
[[nodiscard]] std::optional<NumericSettings> parse_numeric_settings(std::string_view text,
                                                                    NumericSettings base = {});

}  // namespace contain
