#pragma once

#include <utility>
#include <vector>

#include "antiroll/alpha_method.hpp"
#include "antiroll/rollover.hpp"
#include "antiroll/vehicle.hpp"

namespace antiroll {

enum class LoopIntegrator { alpha, rk4 };

struct ClosedLoopOptions {
  LoopIntegrator integrator = LoopIntegrator::alpha;
  AlphaParams alpha{0.5, 2.0 / 1.5 - 0.5, 1.0 / 2.25};
  double satisfaction_tol = 1e-6;  // min(f1, f2) <= tol counts as satisfied
  double forward_speed = 200.0 / 9.0;
};

/// Feedback simulation output. The tire cutoff is exact here (no smoothing);
/// branch satisfaction uses the disjunction semantics min(f1, f2) <= tol.
struct ClosedLoopResult {
  std::vector<double> t;
  std::vector<VehicleState> states;
  std::vector<double> F_l, F_r;
  std::vector<Eigen::Vector4d> wheel_loads;
  std::vector<BranchValues> branches;
  std::vector<double> lambda_left, lambda_right;  // canonical certifying weights (NaN if none)
  std::vector<bool> satisfied_left, satisfied_right;

  bool all_satisfied = true;
  std::vector<std::pair<double, double>> violation_intervals;
  // exactly one branch of a disjunction holds (per side, then union)
  std::vector<std::pair<double, double>> single_branch_intervals;
  double max_abs_force = 0.0;
  RolloverReport rollover;

  bool roll_singularity = false;  // |theta_X| reached pi/2; trajectory truncated
  double singularity_time = 0.0;
};

/// Forward-integrates the full dynamics under F_l = phi3 * theta_Zd, F_r = -F_l.
ClosedLoopResult simulate(const VehicleConfig& cfg, double phi3, const SteeringProfile& steer,
                          const std::vector<double>& grid, const ClosedLoopOptions& opts = {});

struct ModeComparison {
  ClosedLoopResult disjunctive;
  ClosedLoopResult conservative;
  double max_force_ratio = 1.0;  // larger max|F_l| over smaller
};

/// Runs the synthesized gains from both constraint treatments side by side.
ModeComparison compare_modes(const VehicleConfig& cfg, double phi3_disjunctive,
                             double phi3_conservative, const SteeringProfile& steer,
                             const std::vector<double>& grid, const ClosedLoopOptions& opts = {});

}  // namespace antiroll
