#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "antiroll/integrators.hpp"
#include "antiroll/types.hpp"

namespace antiroll {

/// One-step implicit integrator parameters derived from the user-selected
/// spectral radius rho in [0, 1); gamma > 1/2 always holds on that range.
struct AlphaParams {
  double rho = 0.5;
  double gamma = 0.0;
  double beta = 0.0;
};

AlphaParams alpha_params(double rho);

struct AlphaStep {
  Vec x_n, x_np1;  // states
  Vec a_n, a_np1;  // auxiliary rate-of-f vectors
  double h = 0.0;
};

/// Residuals of the two update equations; both vanish at a valid step.
///   r1 = x_{n+1} - x_n - (1-beta/gamma) h f_n - (beta/gamma) h f_{n+1}
///        - (1/2 - beta/gamma) h^2 a_n
///   r2 = a_{n+1} - (f_{n+1} - f_n)/(h gamma) - (1 - 1/gamma) a_n
std::pair<Vec, Vec> step_residual(const AlphaParams& params, const Vec& f_n, const Vec& f_np1,
                                  const AlphaStep& step);

struct AlphaTrajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> a;
};

struct AlphaOptions {
  double newton_tol = 1e-10;  // scaled by 1 + |x|
  int max_newton_iter = 50;
  double jac_fd_step = 1e-7;
  double a0_fd_step = 1e-6;  // seconds, forward difference for df/dt at t0
};

/// Integrates x' = f(x, t) over the grid, solving each implicit step by Newton
/// iteration. When a0 is absent it is estimated as df/dt at t0 by a forward
/// difference along the Euler prediction.
AlphaTrajectory alpha_integrate(const AlphaParams& params, const OdeRhs& rhs, const Vec& x0,
                                const std::optional<Vec>& a0, const std::vector<double>& grid,
                                const AlphaOptions& opts = {});

}  // namespace antiroll
