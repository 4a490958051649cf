#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "antiroll/qp.hpp"
#include "antiroll/types.hpp"

namespace antiroll {

/// Smooth NLP with equality/inequality constraints (<=0 convention) and
/// variable bounds. Callbacks may throw Error; the solver treats that as an
/// evaluation failure (infinite merit during line search, hard stop at z0).
struct NlpProblem {
  int dim = 0;
  Vec lb, ub;  // size dim; +-inf allowed
  int num_eq = 0;
  int num_ineq = 0;

  std::function<void(const Vec& z, double& f, Vec& c_eq, Vec& c_ineq)> evaluate;
  std::function<void(const Vec& z, Vec& grad, SpMat& J_eq, SpMat& J_ineq)> derivatives;

  /// Optional variable partition for the quasi-Newton Hessian: (offset, size)
  /// blocks covering [0, dim). Empty means one dense block.
  std::vector<std::pair<int, int>> hessian_blocks;

  /// Optional initial Hessian diagonal (defaults to identity).
  std::optional<Vec> hessian_init_diag;

  /// Optional feasibility restoration: replace z by a nearby point with
  /// (near-)zero constraint violation, returning false when impossible. Used
  /// by the solver as a recovery step when progress toward feasibility stalls.
  std::function<bool(Vec& z)> restore;
};

enum class SolveStatus { converged, max_iterations, infeasible, evaluation_failure };

const char* to_string(SolveStatus s) noexcept;

struct KktResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
};

struct Multipliers {
  Vec y_eq;     // equality multipliers
  Vec z_ineq;   // inequality multipliers, >= 0
  Vec z_lo, z_hi;  // bound multipliers, >= 0
};

struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  int qp_iterations = 0;
  KktResiduals kkt;
  double objective = 0.0;
  double constraint_violation = 0.0;
  std::string message;
};

struct IterationInfo {
  int iteration;
  double objective;
  double violation;   // l1 norm of constraint violation
  double merit;       // objective + penalty * violation, after the step
  double merit_pre;   // same penalty, before the step
  double penalty;
  double step_length;
  double qp_elastic;  // l1 elastic mass in the QP solution
};

struct SolverOptions {
  double kkt_tol = 1e-4;   // stationarity/complementarity, scaled
  double feas_tol = 1e-6;  // max constraint violation
  int max_iter = 500;

  double penalty_init = 10.0;
  double penalty_max = 1e6;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_line_search = 40;
  int max_ls_failures = 12;  // consecutive failures before giving up
  double qp_tol = 1e-10;
  int qp_max_iter = 100;
  bool verbose = false;  // per-iteration trace on stderr

  std::function<void(const IterationInfo&)> callback;  // observation hook
};

struct SolveResult {
  Vec z;
  Multipliers multipliers;
  SolveReport report;
};

/// Sequential quadratic programming with damped (block) BFGS, an elastic l1
/// relaxation of the QP subproblem, and an l1-merit Armijo line search.
/// Deterministic for identical inputs.
SolveResult solve_nlp(const NlpProblem& problem, const Vec& z0, const SolverOptions& opts = {});

/// First-order KKT residual norms at (z, multipliers).
KktResiduals kkt_residuals(const NlpProblem& problem, const Vec& z, const Multipliers& mults);

}  // namespace antiroll
