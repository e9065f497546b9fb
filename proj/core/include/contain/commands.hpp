#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contain/error.hpp"
#include "contain/graph.hpp"
#include "contain/scenario_io.hpp"
#include "contain/sim.hpp"
#include "contain/synthesis.hpp"

namespace contain {

enum class ExitCode : int {
  Ok = 0,
  ParseError = 1,
  AssumptionFailure = 2,
  NotControllable = 3,
  VarrhoTooLarge = 4,
  NotCertified = 5,
  NonFiniteState = 6,
  InternalError = 7,
};

[[nodiscard]] ExitCode exit_code_for(ErrorCode code) noexcept;

struct CommandOptions {
  ScenarioOverrides overrides;
  std::optional<std::filesystem::path> out_dir;
};

/// Scenario after parsing, overrides, validation, the graph check and gain synthesis.
struct Design {
  Scenario scenario;
  LaplacianPartition partition;
  GainSet gains;
  double lmi_max_eig = 0.0;
};

/// Throws Error; AssumptionViolated when the graph check fails.
[[nodiscard]] Design prepare_design(const Scenario& scn);

/// Bound report for the scenario's controller kind. The discontinuous law uses κ = 0.
[[nodiscard]] BoundReport bounds_for(const Design& d);

/// CSV column names in emission order.
[[nodiscard]] std::vector<std::string> trajectory_columns(const Scenario& scn);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Scenario& scn);
[[nodiscard]] std::string format_metrics(const Metrics& m, const BoundReport& b, const Trajectory& traj,
                                         const Scenario& scn);
[[nodiscard]] std::string plot_script(const Scenario& scn, const std::string& csv_name = "trajectory.csv");

ExitCode cmd_validate(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                      std::ostream& err);
ExitCode cmd_synth(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                   std::ostream& err);
ExitCode cmd_bound(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                   std::ostream& err);
ExitCode cmd_simulate(const std::filesystem::path& path, const CommandOptions& opts, std::ostream& out,
                      std::ostream& err);

}  // namespace contain
