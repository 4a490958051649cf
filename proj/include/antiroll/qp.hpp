#pragma once

#include <Eigen/SparseCore>

#include "antiroll/types.hpp"

namespace antiroll {

using SpMat = Eigen::SparseMatrix<double>;

/// Convex QP in box-equality standard form:
///   min 1/2 x'Qx + q'x   s.t.  A x = b,  lb <= x <= ub
/// General inequalities are expected to be folded in as slack variables by the
/// caller. Infinite bounds are allowed.
struct BoxQp {
  SpMat Q;  // symmetric, full storage
  Vec q;
  SpMat A;
  Vec b;
  Vec lb, ub;

  Eigen::Index dim() const { return q.size(); }
  Eigen::Index num_eq() const { return b.size(); }
};

enum class QpStatus { optimal, max_iterations, numerical_failure };

struct QpResult {
  Vec x;
  Vec y;          // equality multipliers
  Vec z_lo, z_hi; // bound multipliers, >= 0
  QpStatus status = QpStatus::numerical_failure;
  int iterations = 0;
  double mu = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct QpOptions {
  int max_iter = 100;
  double tol = 1e-10;
  double primal_reg = 1e-8;  // Tikhonov shift on the Hessian block
  double dual_reg = 1e-8;    // shift on the constraint block
};

/// Primal-dual interior-point solve (Mehrotra predictor-corrector) on a
/// regularized quasi-definite KKT system with a cached symbolic factorization.
/// Deterministic: identical inputs produce identical iterates.
QpResult solve_box_qp(const BoxQp& qp, const QpOptions& opts = {});

}  // namespace antiroll
