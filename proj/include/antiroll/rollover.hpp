#pragma once

#include <utility>
#include <vector>

#include "antiroll/types.hpp"

namespace antiroll {

/// Normalized left/right load difference
///   R = ((F_Z2 + F_Z4) - (F_Z1 + F_Z3)) / (sum of all four).
/// |R| < 1 means all wheels loaded; |R| >= 1 marks lift-off onset.
double rollover_index(const Eigen::Vector4d& F_Z);

struct RolloverSeries {
  std::vector<double> R;
  std::vector<bool> liftoff;  // |R| > 1
};

struct RolloverSummary {
  double max_abs_R = 0.0;
  std::vector<std::pair<double, double>> liftoff_intervals;  // (t_start, t_end)
  double max_abs_theta_X = 0.0;
  double terminal_abs_theta_X = 0.0;
  double theta_X_at_peak_R = 0.0;  // |theta_X| at the peak |R| inside lift-off
  bool liftoff = false;
  bool stabilized = false;
};

struct RolloverReport {
  RolloverSeries series;
  RolloverSummary summary;
};

/// Per-node rollover index plus a summary verdict. "Stabilized" means the roll
/// angle stayed below theta_cap and, when lift-off occurred, the terminal roll
/// magnitude is below its value at the lift-off peak.
RolloverReport classify(const std::vector<double>& t,
                        const std::vector<Eigen::Vector4d>& wheel_loads,
                        const std::vector<double>& theta_X, double theta_cap = 0.35);

}  // namespace antiroll
