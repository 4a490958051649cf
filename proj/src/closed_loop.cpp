#include "antiroll/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "antiroll/disjunction.hpp"

namespace antiroll {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::pair<double, double>> intervals_where(const std::vector<double>& t,
                                                       const std::vector<bool>& flag) {
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0;
  while (i < flag.size()) {
    if (flag[i]) {
      std::size_t j = i;
      while (j + 1 < flag.size() && flag[j + 1]) ++j;
      out.emplace_back(t[i], t[j]);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

ClosedLoopResult simulate(const VehicleConfig& cfg, double phi3, const SteeringProfile& steer,
                          const std::vector<double>& grid, const ClosedLoopOptions& opts) {
  if (!std::isfinite(phi3)) raise(ErrorCode::invalid_parameter, "simulate: phi3 must be finite");
  if (grid.size() < 2) raise(ErrorCode::invalid_parameter, "simulate: grid needs >= 2 points");

  auto rhs = [&](const Vec& xv, double t) -> Vec {
    const VehicleState s = VehicleState::from_vector(xv);
    ControlInput u;
    u.F_l = phi3 * s.theta_Z_dot;
    u.F_r = -u.F_l;
    return dynamics_rhs(cfg, s, u, steer.angle_rad(t), /*tire_smoothing_width=*/0.0);
  };

  const Vec x0 = initial_state(cfg, opts.forward_speed).to_vector();

  ClosedLoopResult res;
  std::vector<Vec> xs;
  try {
    if (opts.integrator == LoopIntegrator::rk4) {
      xs = rk4_integrate(rhs, x0, grid);
    } else {
      xs = alpha_integrate(opts.alpha, rhs, x0, std::nullopt, grid).x;
    }
    res.t = grid;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::step_failure && e.code() != ErrorCode::roll_singularity) throw;
    // rollover event: keep the prefix that integrated cleanly
    res.roll_singularity = true;
    xs.clear();
    Vec x = x0;
    res.t.clear();
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (n > 0) {
        try {
          std::vector<double> seg{grid[n - 1], grid[n]};
          x = (opts.integrator == LoopIntegrator::rk4)
                  ? rk4_integrate(rhs, x, seg).back()
                  : alpha_integrate(opts.alpha, rhs, x, std::nullopt, seg).x.back();
        } catch (const Error&) {
          res.singularity_time = grid[n];
          break;
        }
      }
      xs.push_back(x);
      res.t.push_back(grid[n]);
    }
  }

  std::vector<bool> single_branch(xs.size(), false);
  std::vector<bool> violated(xs.size(), false);
  std::vector<Eigen::Vector4d> loads;
  std::vector<double> theta_X;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const VehicleState s = VehicleState::from_vector(xs[n]);
    ControlInput u;
    u.F_l = phi3 * s.theta_Z_dot;
    u.F_r = -u.F_l;
    const Vec10 d = dynamics_rhs(cfg, s, u, steer.angle_rad(res.t[n]), 0.0);
    const BranchValues bv = antiroll_branch_functions(cfg, s, u, d);

    res.states.push_back(s);
    res.F_l.push_back(u.F_l);
    res.F_r.push_back(u.F_r);
    res.max_abs_force = std::max(res.max_abs_force, std::abs(u.F_l));
    res.wheel_loads.push_back(wheel_reactions(cfg, s, u));
    res.branches.push_back(bv);
    loads.push_back(res.wheel_loads.back());
    theta_X.push_back(s.theta_X);

    const double tol = opts.satisfaction_tol;
    const double s1 = cfg.M * cfg.g / 2.0;  // same normalization as the transcription rows
    const bool l1 = bv.f1_left / s1 <= tol, l2 = bv.f2_left <= tol;
    const bool r1 = bv.f1_right / s1 <= tol, r2 = bv.f2_right <= tol;
    const bool left_ok = l1 || l2;
    const bool right_ok = r1 || r2;
    res.satisfied_left.push_back(left_ok);
    res.satisfied_right.push_back(right_ok);
    violated[n] = !(left_ok && right_ok);
    single_branch[n] = (left_ok && (l1 != l2)) || (right_ok && (r1 != r2));

    auto wl = feasible_weight(Eigen::Vector2d(bv.f1_left, bv.f2_left));
    auto wr = feasible_weight(Eigen::Vector2d(bv.f1_right, bv.f2_right));
    res.lambda_left.push_back(wl ? (*wl)[0] : kNaN);
    res.lambda_right.push_back(wr ? (*wr)[0] : kNaN);
  }

  res.all_satisfied = std::none_of(violated.begin(), violated.end(), [](bool v) { return v; }) &&
                      !res.roll_singularity;
  res.violation_intervals = intervals_where(res.t, violated);
  res.single_branch_intervals = intervals_where(res.t, single_branch);
  res.rollover = classify(res.t, loads, theta_X);
  return res;
}

ModeComparison compare_modes(const VehicleConfig& cfg, double phi3_disjunctive,
                             double phi3_conservative, const SteeringProfile& steer,
                             const std::vector<double>& grid, const ClosedLoopOptions& opts) {
  ModeComparison out;
  out.disjunctive = simulate(cfg, phi3_disjunctive, steer, grid, opts);
  out.conservative = simulate(cfg, phi3_conservative, steer, grid, opts);
  const double a = out.disjunctive.max_abs_force;
  const double b = out.conservative.max_abs_force;
  const double lo = std::min(a, b), hi = std::max(a, b);
  out.max_force_ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity()
                                                       : 1.0);
  return out;
}

}  // namespace antiroll
