#include "antiroll/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCholesky>

namespace antiroll {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  Eigen::Index n, m;
  std::vector<bool> has_lo, has_hi;
  int n_comp = 0;
};

double complementarity(const Workspace& w, const Vec& x, const BoxQp& qp, const Vec& z_lo,
                       const Vec& z_hi) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.n; ++i) {
    if (w.has_lo[i]) sum += (x[i] - qp.lb[i]) * z_lo[i];
    if (w.has_hi[i]) sum += (qp.ub[i] - x[i]) * z_hi[i];
  }
  return w.n_comp > 0 ? sum / w.n_comp : 0.0;
}

// Largest alpha in (0, 1] keeping v + alpha*dv >= floor on the masked entries.
double max_step(const std::vector<bool>& mask, const Vec& v, const Vec& dv, const Vec& floor_v) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!mask[i] || dv[i] >= 0.0) continue;
    alpha = std::min(alpha, (floor_v[i] - v[i]) / dv[i]);
  }
  return alpha;
}

}  // namespace

QpResult solve_box_qp(const BoxQp& qp, const QpOptions& opts) {
  const Eigen::Index n = qp.dim();
  const Eigen::Index m = qp.num_eq();
  if (qp.Q.rows() != n || qp.Q.cols() != n || qp.A.cols() != n || qp.A.rows() != m ||
      qp.lb.size() != n || qp.ub.size() != n)
    raise(ErrorCode::dimension_mismatch, "solve_box_qp: inconsistent problem dimensions");

  Workspace w;
  w.n = n;
  w.m = m;
  w.has_lo.resize(n);
  w.has_hi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w.has_lo[i] = std::isfinite(qp.lb[i]);
    w.has_hi[i] = std::isfinite(qp.ub[i]);
    w.n_comp += int(w.has_lo[i]) + int(w.has_hi[i]);
  }

  QpResult res;
  res.x = Vec::Zero(n);
  res.y = Vec::Zero(m);
  res.z_lo = Vec::Zero(n);
  res.z_hi = Vec::Zero(n);

  // interior starting point
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = 0.0;
    if (w.has_lo[i] && w.has_hi[i]) {
      const double margin = std::min(1.0, 0.25 * (qp.ub[i] - qp.lb[i]));
      x = std::clamp(x, qp.lb[i] + margin, qp.ub[i] - margin);
    } else if (w.has_lo[i]) {
      x = std::max(x, qp.lb[i] + 1.0);
    } else if (w.has_hi[i]) {
      x = std::min(x, qp.ub[i] - 1.0);
    }
    res.x[i] = x;
    res.z_lo[i] = w.has_lo[i] ? 1.0 : 0.0;
    res.z_hi[i] = w.has_hi[i] ? 1.0 : 0.0;
  }

  const double q_scale = 1.0 + qp.q.lpNorm<Eigen::Infinity>();
  const double b_scale = 1.0 + (m > 0 ? qp.b.lpNorm<Eigen::Infinity>() : 0.0);

  double delta_p = opts.primal_reg;
  double delta_d = opts.dual_reg;

  // KKT pattern is constant: analyze once, refactorize per iteration.
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;

  auto assemble = [&](const Vec& diag_extra) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(qp.Q.nonZeros() + 2 * qp.A.nonZeros() + n + m);
    for (int k = 0; k < qp.Q.outerSize(); ++k)
      for (SpMat::InnerIterator it(qp.Q, k); it; ++it)
        trips.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < n; ++i)
      trips.emplace_back(i, i, diag_extra[i] + delta_p);
    for (int k = 0; k < qp.A.outerSize(); ++k)
      for (SpMat::InnerIterator it(qp.A, k); it; ++it) {
        trips.emplace_back(n + it.row(), it.col(), it.value());
        trips.emplace_back(it.col(), n + it.row(), it.value());
      }
    for (Eigen::Index i = 0; i < m; ++i) trips.emplace_back(n + i, n + i, -delta_d);
    SpMat K(n + m, n + m);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
  };

  Vec dx(n), dy(m), dz_lo(n), dz_hi(n);
  Vec dx_aff(n), dz_lo_aff(n), dz_hi_aff(n);

  double best_score = std::numeric_limits<double>::infinity();
  int no_progress = 0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter;
    const Vec Qx = qp.Q * res.x;
    Vec r_d = Qx + qp.q - res.z_lo + res.z_hi;
    if (m > 0) r_d += qp.A.transpose() * res.y;
    const Vec r_p = m > 0 ? Vec(qp.A * res.x - qp.b) : Vec();
    const double mu = complementarity(w, res.x, qp, res.z_lo, res.z_hi);

    res.dual_residual = r_d.lpNorm<Eigen::Infinity>();
    res.primal_residual = m > 0 ? r_p.lpNorm<Eigen::Infinity>() : 0.0;
    res.mu = mu;
    if (res.dual_residual <= opts.tol * q_scale && res.primal_residual <= opts.tol * b_scale &&
        mu <= opts.tol * q_scale) {
      res.status = QpStatus::optimal;
      return res;
    }
    const double score = std::max({mu / q_scale, res.primal_residual / b_scale,
                                   res.dual_residual / q_scale});
    if (score < 0.95 * best_score) {
      best_score = score;
      no_progress = 0;
    } else if (++no_progress >= 15) {
      res.status = QpStatus::max_iterations;  // stalled
      return res;
    }

    // barrier diagonal
    Vec D = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w.has_lo[i]) D[i] += res.z_lo[i] / (res.x[i] - qp.lb[i]);
      if (w.has_hi[i]) D[i] += res.z_hi[i] / (qp.ub[i] - res.x[i]);
    }

    SpMat K = assemble(D);
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    int bumps = 0;
    while (ldlt.info() != Eigen::Success && bumps < 6) {
      delta_p *= 100.0;
      delta_d *= 100.0;
      K = assemble(D);
      ldlt.factorize(K);
      ++bumps;
    }
    if (ldlt.info() != Eigen::Success) {
      res.status = QpStatus::numerical_failure;
      return res;
    }

    auto solve_kkt = [&](const Vec& rhs_x, const Vec& rhs_y) {
      Vec rhs(n + m);
      rhs.head(n) = rhs_x;
      if (m > 0) rhs.tail(m) = rhs_y;
      Vec sol = ldlt.solve(rhs);
      // one refinement pass against the regularized residual
      Vec resid = rhs - K * sol;
      sol += ldlt.solve(resid);
      return sol;
    };

    auto recover_directions = [&](const Vec& sol, const Vec& r_cl, const Vec& r_cu, Vec& out_dx,
                                  Vec& out_dy, Vec& out_dz_lo, Vec& out_dz_hi) {
      out_dx = sol.head(n);
      if (m > 0) out_dy = sol.tail(m);
      for (Eigen::Index i = 0; i < n; ++i) {
        out_dz_lo[i] = w.has_lo[i]
                           ? (-r_cl[i] - res.z_lo[i] * out_dx[i]) / (res.x[i] - qp.lb[i])
                           : 0.0;
        out_dz_hi[i] = w.has_hi[i]
                           ? (-r_cu[i] + res.z_hi[i] * out_dx[i]) / (qp.ub[i] - res.x[i])
                           : 0.0;
      }
    };

    auto rhs_for = [&](const Vec& r_cl, const Vec& r_cu) {
      Vec rhs_x = -r_d;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (w.has_lo[i]) rhs_x[i] -= r_cl[i] / (res.x[i] - qp.lb[i]);
        if (w.has_hi[i]) rhs_x[i] += r_cu[i] / (qp.ub[i] - res.x[i]);
      }
      return rhs_x;
    };

    // predictor (affine) step
    Vec r_cl_aff = Vec::Zero(n), r_cu_aff = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w.has_lo[i]) r_cl_aff[i] = (res.x[i] - qp.lb[i]) * res.z_lo[i];
      if (w.has_hi[i]) r_cu_aff[i] = (qp.ub[i] - res.x[i]) * res.z_hi[i];
    }
    Vec sol = solve_kkt(rhs_for(r_cl_aff, r_cu_aff), m > 0 ? Vec(-r_p) : Vec());
    recover_directions(sol, r_cl_aff, r_cu_aff, dx_aff, dy, dz_lo_aff, dz_hi_aff);
    if (!dx_aff.allFinite()) {
      res.status = QpStatus::numerical_failure;
      return res;
    }

    double sigma = 0.0;
    if (w.n_comp > 0 && mu > 0.0) {
      Vec lo_floor = qp.lb, hi_ceil = qp.ub;
      double a_p = max_step(w.has_lo, res.x, dx_aff, lo_floor);
      {
        // upper bounds: x + a dx <= ub
        for (Eigen::Index i = 0; i < n; ++i) {
          if (w.has_hi[i] && dx_aff[i] > 0.0)
            a_p = std::min(a_p, (qp.ub[i] - res.x[i]) / dx_aff[i]);
        }
      }
      const Vec zero_floor = Vec::Zero(n);
      double a_d = max_step(w.has_lo, res.z_lo, dz_lo_aff, zero_floor);
      a_d = std::min(a_d, max_step(w.has_hi, res.z_hi, dz_hi_aff, zero_floor));

      double mu_aff = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (w.has_lo[i])
          mu_aff += (res.x[i] + a_p * dx_aff[i] - qp.lb[i]) * (res.z_lo[i] + a_d * dz_lo_aff[i]);
        if (w.has_hi[i])
          mu_aff += (qp.ub[i] - res.x[i] - a_p * dx_aff[i]) * (res.z_hi[i] + a_d * dz_hi_aff[i]);
      }
      mu_aff /= w.n_comp;
      sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    }

    // corrector
    Vec r_cl = r_cl_aff, r_cu = r_cu_aff;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w.has_lo[i]) r_cl[i] += dx_aff[i] * dz_lo_aff[i] - sigma * mu;
      if (w.has_hi[i]) r_cu[i] += -dx_aff[i] * dz_hi_aff[i] - sigma * mu;
    }
    sol = solve_kkt(rhs_for(r_cl, r_cu), m > 0 ? Vec(-r_p) : Vec());
    recover_directions(sol, r_cl, r_cu, dx, dy, dz_lo, dz_hi);
    if (!dx.allFinite()) {
      res.status = QpStatus::numerical_failure;
      return res;
    }

    // step lengths with fraction-to-boundary
    const double tau = std::max(0.995, 1.0 - mu);
    double a_p = 1.0, a_d = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w.has_lo[i] && dx[i] < 0.0)
        a_p = std::min(a_p, tau * (qp.lb[i] - res.x[i]) / dx[i]);
      if (w.has_hi[i] && dx[i] > 0.0)
        a_p = std::min(a_p, tau * (qp.ub[i] - res.x[i]) / dx[i]);
      if (w.has_lo[i] && dz_lo[i] < 0.0) a_d = std::min(a_d, -tau * res.z_lo[i] / dz_lo[i]);
      if (w.has_hi[i] && dz_hi[i] < 0.0) a_d = std::min(a_d, -tau * res.z_hi[i] / dz_hi[i]);
    }
    if (w.n_comp == 0) a_p = a_d = 1.0;  // pure Newton on an equality QP

    res.x += a_p * dx;
    if (m > 0) res.y += a_d * dy;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w.has_lo[i]) res.z_lo[i] += a_d * dz_lo[i];
      if (w.has_hi[i]) res.z_hi[i] += a_d * dz_hi[i];
    }
  }
  res.status = QpStatus::max_iterations;
  return res;
}

}  // namespace antiroll
