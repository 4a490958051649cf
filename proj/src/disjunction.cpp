#include "antiroll/disjunction.hpp"

#include <cmath>

namespace antiroll {

namespace {

void check_simplex(const Eigen::Ref<const Vec>& lambda, double tol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -tol)
      raise(ErrorCode::invalid_weight, "negative weight " + std::to_string(lambda[i]));
    sum += lambda[i];
  }
  if (std::abs(sum - 1.0) > tol)
    raise(ErrorCode::invalid_weight, "weights sum to " + std::to_string(sum));
}

}  // namespace

double hull_residual(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& lambda,
                     double simplex_tol) {
  if (f.size() != lambda.size())
    raise(ErrorCode::dimension_mismatch, "branch/weight sizes differ");
  check_simplex(lambda, simplex_tol);
  return f.dot(lambda);
}

double hull_residual(const DisjunctionSpec& spec, const Eigen::Ref<const Vec>& f,
                     const Eigen::Ref<const Vec>& lambda, double simplex_tol) {
  spec.validate();
  if (f.size() != spec.num_branches)
    raise(ErrorCode::dimension_mismatch, "branch count does not match spec");
  return hull_residual(f, lambda, simplex_tol);
}

std::optional<Vec> feasible_weight(const Eigen::Ref<const Vec>& f) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < f.size(); ++i)
    if (f[i] < f[best]) best = i;
  if (f[best] > 0.0) return std::nullopt;
  Vec lambda = Vec::Zero(f.size());
  lambda[best] = 1.0;
  return lambda;
}

std::pair<double, double> exclusive_residuals(const Eigen::Vector2d& f,
                                              const Eigen::Vector2d& lambda,
                                              const Eigen::Vector2d& pi, double simplex_tol) {
  check_simplex(lambda, simplex_tol);
  check_simplex(pi, simplex_tol);
  return {f.dot(lambda), f.dot(pi)};
}

}  // namespace antiroll
