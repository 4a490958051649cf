#include "antiroll/rollover.hpp"

#include <cmath>

namespace antiroll {

double rollover_index(const Eigen::Vector4d& F_Z) {
  const double left = F_Z[0] + F_Z[2];
  const double right = F_Z[1] + F_Z[3];
  const double total = left + right;
  if (std::abs(total) < 1e-12)
    raise(ErrorCode::undefined_index, "rollover index undefined: total load is zero");
  return (right - left) / total;
}

RolloverReport classify(const std::vector<double>& t,
                        const std::vector<Eigen::Vector4d>& wheel_loads,
                        const std::vector<double>& theta_X, double theta_cap) {
  const std::size_t n = t.size();
  if (wheel_loads.size() != n || theta_X.size() != n)
    raise(ErrorCode::dimension_mismatch, "classify: series lengths differ");
  if (n == 0) raise(ErrorCode::invalid_parameter, "classify: empty trajectory");

  RolloverReport out;
  out.series.R.reserve(n);
  out.series.liftoff.reserve(n);

  double peak_R = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double R = rollover_index(wheel_loads[i]);
    out.series.R.push_back(R);
    const bool lift = std::abs(R) > 1.0;
    out.series.liftoff.push_back(lift);
    out.summary.max_abs_R = std::max(out.summary.max_abs_R, std::abs(R));
    out.summary.max_abs_theta_X = std::max(out.summary.max_abs_theta_X, std::abs(theta_X[i]));
    if (lift && std::abs(R) > peak_R) {
      peak_R = std::abs(R);
      out.summary.theta_X_at_peak_R = std::abs(theta_X[i]);
    }
  }
  out.summary.terminal_abs_theta_X = std::abs(theta_X.back());

  // contiguous lift-off intervals
  std::size_t i = 0;
  while (i < n) {
    if (out.series.liftoff[i]) {
      std::size_t j = i;
      while (j + 1 < n && out.series.liftoff[j + 1]) ++j;
      out.summary.liftoff_intervals.emplace_back(t[i], t[j]);
      i = j + 1;
    } else {
      ++i;
    }
  }
  out.summary.liftoff = !out.summary.liftoff_intervals.empty();

  const bool roll_bounded = out.summary.max_abs_theta_X < theta_cap;
  const bool recovered =
      !out.summary.liftoff ||
      out.summary.terminal_abs_theta_X < std::max(out.summary.theta_X_at_peak_R, 1e-12);
  out.summary.stabilized = roll_bounded && recovered;
  return out;
}

}  // namespace antiroll
