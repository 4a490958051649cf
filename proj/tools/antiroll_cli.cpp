#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "antiroll/runner.hpp"

namespace fs = std::filesystem;
using namespace antiroll;

namespace {

int classify_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_parameter:
    case ErrorCode::invalid_weight:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::build_error:
    case ErrorCode::io_error:
      return kExitConfigError;
    case ErrorCode::roll_singularity:
    case ErrorCode::tire_singularity:
    case ErrorCode::degenerate_speed:
    case ErrorCode::geometric_singularity:
    case ErrorCode::step_failure:
    case ErrorCode::integration_failure:
    case ErrorCode::invalid_state:
    case ErrorCode::undefined_index:
      return kExitModelSingularity;
    default:
      return kExitSolverFailure;
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string csv_path;
  long seed = 0;
  bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rollover-preventive suspension force computation"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--seed", args.seed, "Seed for randomized utilities");
  app.add_flag("--quiet", args.quiet, "Suppress progress output");

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", args.config_path, "Path to the run config (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", args.out_dir, "Output directory (overrides config)");
  };

  CLI::App* cmd_optimize = app.add_subcommand("optimize", "Solve the transcribed problem");
  add_common(cmd_optimize, true);
  CLI::App* cmd_synthesize =
      app.add_subcommand("synthesize", "Fit the sensor-feedback force law");
  add_common(cmd_synthesize, true);
  CLI::App* cmd_validate = app.add_subcommand("validate", "Closed-loop check of a phi3 gain");
  add_common(cmd_validate, true);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "phi3 look-up table over maneuvers");
  add_common(cmd_sweep, true);
  CLI::App* cmd_analyze = app.add_subcommand("analyze", "Rollover report for a trajectory CSV");
  add_common(cmd_analyze, false);
  cmd_analyze->add_option("--csv", args.csv_path, "Trajectory CSV to analyze")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = args.config_path.empty() ? RunConfig{}
                                                : RunConfig::from_file(args.config_path);
    config.seed = args.seed;
    const fs::path out = args.out_dir.empty() ? fs::path(config.output.directory)
                                              : fs::path(args.out_dir);

    RunArtifacts art;
    if (cmd_optimize->parsed()) {
      art = run_optimize(config, out);
    } else if (cmd_synthesize->parsed()) {
      art = run_synthesize(config, out);
    } else if (cmd_validate->parsed()) {
      art = run_validate(config, out);
    } else if (cmd_sweep->parsed()) {
      art = run_sweep(config, out);
    } else if (cmd_analyze->parsed()) {
      art = run_analyze(config, args.csv_path, out);
    }

    if (!args.quiet) {
      std::cout << "status: " << art.report["status"] << '\n'
                << "report: " << (art.directory / "report.json").string() << '\n';
    }
    return art.exit_code;
  } catch (const Error& e) {
    if (!args.quiet) std::cerr << "error: " << e.what() << '\n';
    return classify_error(e);
  } catch (const std::exception& e) {
    if (!args.quiet) std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}
