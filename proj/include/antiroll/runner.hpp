#pragma once

#include <filesystem>

#include "antiroll/config.hpp"

namespace antiroll {

/// Runner exit codes also returned by the CLI process.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitModelSingularity = 4;

struct RunArtifacts {
  std::filesystem::path directory;
  json report;
  int exit_code = kExitOk;
};

/// Solves the configured scenario; writes trajectory.csv, report.json and
/// plot.py into `out_dir` (created if missing).
RunArtifacts run_optimize(const RunConfig& config, const std::filesystem::path& out_dir);

/// Five-gain synthesis, dominance ranking, then the single-gain refit.
RunArtifacts run_synthesize(const RunConfig& config, const std::filesystem::path& out_dir);

/// Closed-loop simulation with the configured control.phi3 gain.
RunArtifacts run_validate(const RunConfig& config, const std::filesystem::path& out_dir);

/// Single-gain synthesis across the sweep parameter values; writes lut.csv
/// plus one artifact directory per member.
RunArtifacts run_sweep(const RunConfig& config, const std::filesystem::path& out_dir);

/// Rollover classification of an existing trajectory CSV.
RunArtifacts run_analyze(const RunConfig& config, const std::filesystem::path& csv_path,
                         const std::filesystem::path& out_dir);

}  // namespace antiroll
