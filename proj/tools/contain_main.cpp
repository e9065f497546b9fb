#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contain/commands.hpp"
#include "contain/numeric_settings.hpp"

namespace {

using contain::ExitCode;

struct Flags {
  std::string scenario;
  std::string out;
  std::string controller;
  std::optional<double> kappa;
  std::optional<double> h;
  std::optional<double> t_end;
};

CLI::App* add_scenario_command(CLI::App& app, const std::string& name, const std::string& help, Flags& f) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("scenario", f.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--controller", f.controller,
                  "discontinuous_static | continuous_static | adaptive | observer_based");
  sub->add_option("--kappa", f.kappa, "Boundary-layer width");
  sub->add_option("--h", f.h, "Integration step [s]");
  sub->add_option("--t-end", f.t_end, "Horizon [s]");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Containment control for linear multi-agent systems"};
  // "--h" is the step size, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Flags flags;
  auto* validate = add_scenario_command(app, "validate", "Check the graph and print the Laplacian partition", flags);
  auto* synth = add_scenario_command(app, "synth", "Synthesize P, K, Gamma, c1, c2, alpha and the observer gain", flags);
  auto* bound = add_scenario_command(app, "bound", "Print the residual-set radii", flags);
  auto* simulate = add_scenario_command(app, "simulate", "Integrate the closed loop and certify the bounds", flags);
  auto* defaults = app.add_subcommand("default-scenario", "Print the bundled eight-agent scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::ParseError);
  }

  if (const char* tol = std::getenv("CONTAIN_TOL"); tol != nullptr && *tol != '\0') {
    const auto settings = contain::parse_numeric_settings(tol);
    if (!settings) {
      std::cerr << "error: cannot parse CONTAIN_TOL='" << tol << "'\n";
      return static_cast<int>(ExitCode::ParseError);
    }
    contain::set_numeric_settings(*settings);
  }

  if (defaults->parsed()) {
    std::cout << contain::default_scenario_text();
    return 0;
  }

  contain::CommandOptions opts;
  if (!flags.out.empty()) opts.out_dir = flags.out;
  if (!flags.controller.empty()) {
    opts.overrides.controller = contain::parse_controller_kind(flags.controller);
    if (!opts.overrides.controller) {
      std::cerr << "error: unknown controller '" << flags.controller << "'\n";
      return static_cast<int>(ExitCode::ParseError);
    }
  }
  opts.overrides.kappa = flags.kappa;
  opts.overrides.h = flags.h;
  opts.overrides.t_end = flags.t_end;

  ExitCode code = ExitCode::InternalError;
  if (validate->parsed()) code = contain::cmd_validate(flags.scenario, opts, std::cout, std::cerr);
  if (synth->parsed()) code = contain::cmd_synth(flags.scenario, opts, std::cout, std::cerr);
  if (bound->parsed()) code = contain::cmd_bound(flags.scenario, opts, std::cout, std::cerr);
  if (simulate->parsed()) code = contain::cmd_simulate(flags.scenario, opts, std::cout, std::cerr);
  return static_cast<int>(code);
}
