#pragma once

#include <optional>
#include <utility>

#include "antiroll/types.hpp"

namespace antiroll {

enum class DisjunctionKind { inclusive, exclusive };

/// A disjunction over m_d branch constraint functions f_i <= 0, encoded as a
/// convex combination with weights on the unit simplex.
struct DisjunctionSpec {
  int num_branches = 2;
  DisjunctionKind kind = DisjunctionKind::inclusive;

  void validate() const {
    if (num_branches < 2)
      raise(ErrorCode::invalid_parameter, "disjunction needs at least two branches");
  }
};

/// sum_i lambda_i f_i; a non-positive value certifies the inclusive disjunction.
/// Throws invalid_weight if lambda leaves the unit simplex beyond simplex_tol.
double hull_residual(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& lambda,
                     double simplex_tol = 1e-9);

double hull_residual(const DisjunctionSpec& spec, const Eigen::Ref<const Vec>& f,
                     const Eigen::Ref<const Vec>& lambda, double simplex_tol = 1e-9);

/// A simplex weight certifying the inclusive disjunction, or nullopt when every
/// branch is positive. Canonical choice: all weight on the most negative branch
/// (first such index on ties).
std::optional<Vec> feasible_weight(const Eigen::Ref<const Vec>& f);

/// Exclusive-or residual pair (sum lambda_i f_i, sum pi_i f_i) for two branches;
/// the xor holds when the first is <= 0 and the second >= 0.
std::pair<double, double> exclusive_residuals(const Eigen::Vector2d& f,
                                              const Eigen::Vector2d& lambda,
                                              const Eigen::Vector2d& pi,
                                              double simplex_tol = 1e-9);

}  // namespace antiroll
