#include "antiroll/alpha_method.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace antiroll {

AlphaParams alpha_params(double rho) {
  if (!(rho >= 0.0 && rho < 1.0))
    raise(ErrorCode::invalid_parameter, "rho must lie in [0, 1)");
  AlphaParams p;
  p.rho = rho;
  p.gamma = 2.0 / (rho + 1.0) - 0.5;
  p.beta = 1.0 / ((rho + 1.0) * (rho + 1.0));
  return p;
}

std::pair<Vec, Vec> step_residual(const AlphaParams& params, const Vec& f_n, const Vec& f_np1,
                                  const AlphaStep& step) {
  const Eigen::Index m = step.x_n.size();
  if (f_n.size() != m || f_np1.size() != m || step.x_np1.size() != m || step.a_n.size() != m ||
      step.a_np1.size() != m)
    raise(ErrorCode::dimension_mismatch, "step_residual: inconsistent dimensions");
  if (!(step.h > 0.0)) raise(ErrorCode::invalid_parameter, "step_residual: h must be positive");
  const double c = params.beta / params.gamma;
  const double h = step.h;
  Vec r1 = step.x_np1 - step.x_n - (1.0 - c) * h * f_n - c * h * f_np1 -
           (0.5 - c) * h * h * step.a_n;
  Vec r2 = step.a_np1 - (f_np1 - f_n) / (h * params.gamma) -
           (1.0 - 1.0 / params.gamma) * step.a_n;
  return {std::move(r1), std::move(r2)};
}

namespace {

[[noreturn]] void step_failed(std::size_t index, const std::string& why) {
  raise(ErrorCode::step_failure, why + " (grid index " + std::to_string(index) + ")");
}

}  // namespace

AlphaTrajectory alpha_integrate(const AlphaParams& params, const OdeRhs& rhs, const Vec& x0,
                                const std::optional<Vec>& a0, const std::vector<double>& grid,
                                const AlphaOptions& opts) {
  if (grid.size() < 2)
    raise(ErrorCode::invalid_parameter, "alpha_integrate: grid needs at least two points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      raise(ErrorCode::invalid_parameter, "alpha_integrate: grid not strictly increasing");

  const Eigen::Index m = x0.size();
  const double c = params.beta / params.gamma;

  AlphaTrajectory out;
  out.t = grid;
  out.x.reserve(grid.size());
  out.a.reserve(grid.size());
  out.x.push_back(x0);

  Vec f_n;
  try {
    f_n = rhs(x0, grid[0]);
  } catch (const Error& e) {
    step_failed(0, e.what());
  }

  if (a0.has_value()) {
    if (a0->size() != m)
      raise(ErrorCode::dimension_mismatch, "alpha_integrate: a0 dimension mismatch");
    out.a.push_back(*a0);
  } else {
    const double eps = opts.a0_fd_step;
    Vec f_eps;
    try {
      f_eps = rhs(x0 + eps * f_n, grid[0] + eps);
    } catch (const Error& e) {
      step_failed(0, e.what());
    }
    out.a.push_back((f_eps - f_n) / eps);
  }

  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double h = grid[n + 1] - grid[n];
    const double t_np1 = grid[n + 1];
    const Vec& x_n = out.x[n];
    const Vec& a_n = out.a[n];
    const Vec base = x_n + (1.0 - c) * h * f_n + (0.5 - c) * h * h * a_n;

    // Newton on r(x+) = x+ - base - c h f(x+, t+).
    Vec x = x_n + h * f_n;  // explicit Euler predictor
    Vec f_np1;
    bool converged = false;
    for (int iter = 0; iter < opts.max_newton_iter; ++iter) {
      try {
        f_np1 = rhs(x, t_np1);
      } catch (const Error& e) {
        step_failed(n + 1, e.what());
      }
      const Vec r = x - base - c * h * f_np1;
      const double tol = opts.newton_tol * (1.0 + x.lpNorm<Eigen::Infinity>());
      if (r.lpNorm<Eigen::Infinity>() <= tol) {
        converged = true;
        break;
      }
      // FD Jacobian of f at x, columnwise.
      Eigen::MatrixXd J(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const double dz = opts.jac_fd_step * (1.0 + std::abs(x[j]));
        Vec xp = x;
        xp[j] += dz;
        Vec fp;
        try {
          fp = rhs(xp, t_np1);
        } catch (const Error& e) {
          step_failed(n + 1, e.what());
        }
        J.col(j) = (fp - f_np1) / dz;
      }
      const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - c * h * J;
      const Vec dx = A.partialPivLu().solve(-r);
      if (!dx.allFinite()) step_failed(n + 1, "Newton step not finite");
      x += dx;
    }
    if (!converged) step_failed(n + 1, "Newton did not converge");

    Vec a_np1 = (f_np1 - f_n) / (h * params.gamma) + (1.0 - 1.0 / params.gamma) * a_n;
    out.x.push_back(x);
    out.a.push_back(std::move(a_np1));
    f_n = f_np1;
  }
  return out;
}

}  // namespace antiroll
