#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "antiroll/closed_loop.hpp"
#include "antiroll/transcription.hpp"
#include "antiroll/types.hpp"

namespace antiroll {

/// Column-named numeric table with exact (shortest round-trip) serialization.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Fixed trajectory column order shared by optimization and simulation output:
/// t, the 10 states, F_l, F_r, lambda_left, lambda_right, the four branch
/// values, and the rollover index.
extern const std::vector<std::string> kTrajectoryColumns;

CsvTable trajectory_table(const TrajectorySolution& sol);
CsvTable trajectory_table(const ClosedLoopResult& sim);

}  // namespace antiroll
