#include "antiroll/integrators.hpp"

#include <algorithm>
#include <cmath>

namespace antiroll {

std::vector<Vec> rk4_integrate(const OdeRhs& rhs, const Vec& x0, const std::vector<double>& grid) {
  if (grid.size() < 2) raise(ErrorCode::invalid_parameter, "rk4: grid needs at least two points");
  std::vector<Vec> out;
  out.reserve(grid.size());
  Vec x = x0;
  out.push_back(x);
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double t = grid[n];
    const double h = grid[n + 1] - t;
    if (h <= 0.0) raise(ErrorCode::invalid_parameter, "rk4: grid not strictly increasing");
    const Vec k1 = rhs(x, t);
    const Vec k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
    const Vec k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
    const Vec k4 = rhs(x + h * k3, t + h);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(x);
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

std::vector<Vec> rk45_integrate(const OdeRhs& rhs, const Vec& x0, const std::vector<double>& grid,
                                const AdaptiveOptions& opts) {
  if (grid.size() < 2) raise(ErrorCode::invalid_parameter, "rk45: grid needs at least two points");
  std::vector<Vec> out;
  out.reserve(grid.size());
  Vec x = x0;
  out.push_back(x);
  double t = grid[0];
  Vec k1 = rhs(x, t);
  double h = opts.initial_step;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double t_end = grid[n + 1];
    if (t_end <= grid[n]) raise(ErrorCode::invalid_parameter, "rk45: grid not strictly increasing");
    while (t < t_end) {
      h = std::min(h, t_end - t);
      const Vec k2 = rhs(x + h * (a21 * k1), t + c2 * h);
      const Vec k3 = rhs(x + h * (a31 * k1 + a32 * k2), t + c3 * h);
      const Vec k4 = rhs(x + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
      const Vec k5 = rhs(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
      const Vec k6 = rhs(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
      const Vec x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = rhs(x_new, t + h);  // FSAL
      const Vec err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        err = std::max(err, std::abs(err_vec[i]) / sc);
      }
      if (err <= 1.0) {
        t += h;
        x = x_new;
        k1 = k7;
      }
      const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
      h *= factor;
      if (h < opts.min_step)
        raise(ErrorCode::integration_failure,
              "rk45: step size underflow at t=" + std::to_string(t));
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace antiroll
