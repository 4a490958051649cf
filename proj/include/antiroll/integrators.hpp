#pragma once

#include <functional>
#include <vector>

#include "antiroll/types.hpp"

namespace antiroll {

using OdeRhs = std::function<Vec(const Vec& x, double t)>;

/// Classic fixed-step RK4, one step per grid interval; returns states at the
/// grid points (including x0 at grid[0]).
std::vector<Vec> rk4_integrate(const OdeRhs& rhs, const Vec& x0, const std::vector<double>& grid);

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_step = 1e-12;
  double initial_step = 1e-4;
};

/// Embedded Dormand-Prince 5(4) with step control, sampled exactly at the grid
/// points. Throws integration_failure when the controller rejects below min_step.
std::vector<Vec> rk45_integrate(const OdeRhs& rhs, const Vec& x0, const std::vector<double>& grid,
                                const AdaptiveOptions& opts = {});

}  // namespace antiroll
