#include "antiroll/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

namespace antiroll {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l1_violation(const Vec& c_eq, const Vec& c_in) {
  double v = c_eq.size() > 0 ? c_eq.cwiseAbs().sum() : 0.0;
  for (Eigen::Index i = 0; i < c_in.size(); ++i) v += std::max(0.0, c_in[i]);
  return v;
}

double max_violation(const Vec& c_eq, const Vec& c_in) {
  double v = c_eq.size() > 0 ? c_eq.lpNorm<Eigen::Infinity>() : 0.0;
  for (Eigen::Index i = 0; i < c_in.size(); ++i) v = std::max(v, c_in[i]);
  return v;
}

/// Damped BFGS over a block-diagonal variable partition.
class BlockHessian {
 public:
  BlockHessian(const NlpProblem& p) {
    blocks_ = p.hessian_blocks;
    if (blocks_.empty()) blocks_.push_back({0, p.dim});
    init_diag_ = p.hessian_init_diag ? *p.hessian_init_diag : Vec::Ones(p.dim);
    reset();
  }

  void reset() {
    B_.clear();
    for (const auto& [off, size] : blocks_) {
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(size, size);
      for (int i = 0; i < size; ++i) B(i, i) = std::max(init_diag_[off + i], 1e-8);
      B_.push_back(std::move(B));
    }
  }

  void update(const Vec& s, const Vec& y) {
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto [off, size] = blocks_[k];
      const Vec sk = s.segment(off, size);
      const Vec yk = y.segment(off, size);
      const double ss = sk.squaredNorm();
      if (ss < 1e-24) continue;
      Eigen::MatrixXd& B = B_[k];
      const Vec Bs = B * sk;
      const double sBs = sk.dot(Bs);
      double sy = sk.dot(yk);
      Vec yk_used = yk;
      if (sy < 0.2 * sBs) {  // Powell damping keeps B positive definite
        const double theta = 0.8 * sBs / (sBs - sy);
        yk_used = theta * yk + (1.0 - theta) * Bs;
        sy = sk.dot(yk_used);
      }
      if (sBs < 1e-16 || sy < 1e-16) continue;
      // skip updates that would inject extreme curvature
      if (!yk_used.allFinite() || yk_used.squaredNorm() / sy > 1e10) continue;
      B -= (Bs * Bs.transpose()) / sBs;
      B += (yk_used * yk_used.transpose()) / sy;
    }
  }

  void add_to(std::vector<Eigen::Triplet<double>>& trips) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto [off, size] = blocks_[k];
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
          if (B_[k](i, j) != 0.0) trips.emplace_back(off + i, off + j, B_[k](i, j));
    }
  }

  double quad_form(const Vec& p) const {
    double v = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto [off, size] = blocks_[k];
      const Vec pk = p.segment(off, size);
      v += pk.dot(B_[k] * pk);
    }
    return v;
  }

 private:
  std::vector<std::pair<int, int>> blocks_;
  Vec init_diag_;
  std::vector<Eigen::MatrixXd> B_;
};

struct QpOutcome {
  Vec p;
  Vec y_eq, z_in, z_lo, z_hi;
  double elastic = 0.0;    // l1 mass left in the elastic variables
  double theta_lin = 0.0;  // linearized violation after the step
  int iterations = 0;
  bool ok = false;         // usable direction
  bool converged = false;  // full interior-point convergence
};

/// Elastic l1 QP subproblem in box-equality form with variables
/// [p; s (ineq slack); e (ineq elastic); v, w (eq elastic +/-)].
QpOutcome solve_subproblem(const NlpProblem& nlp, const BlockHessian& hess, const Vec& z,
                           const Vec& g, const SpMat& J_eq, const SpMat& J_in, const Vec& c_eq,
                           const Vec& c_in, double penalty, double prox,
                           const SolverOptions& opts) {
  const int n = nlp.dim;
  const int me = nlp.num_eq;
  const int mi = nlp.num_ineq;
  const int n_qp = n + 2 * mi + 2 * me;
  const int s_off = n, e_off = n + mi, v_off = n + 2 * mi, w_off = n + 2 * mi + me;

  BoxQp qp;
  qp.q = Vec::Zero(n_qp);
  qp.q.head(n) = g;
  qp.q.segment(e_off, mi).setConstant(penalty);
  qp.q.segment(v_off, me).setConstant(penalty);
  qp.q.segment(w_off, me).setConstant(penalty);

  qp.lb = Vec::Constant(n_qp, 0.0);
  qp.ub = Vec::Constant(n_qp, kInf);
  qp.lb.head(n) = nlp.lb - z;
  qp.ub.head(n) = nlp.ub - z;

  std::vector<Eigen::Triplet<double>> q_trips;
  hess.add_to(q_trips);
  if (prox > 0.0)
    for (int i = 0; i < n; ++i) q_trips.emplace_back(i, i, prox);
  qp.Q.resize(n_qp, n_qp);
  qp.Q.setFromTriplets(q_trips.begin(), q_trips.end());

  std::vector<Eigen::Triplet<double>> a_trips;
  a_trips.reserve(J_eq.nonZeros() + J_in.nonZeros() + 2 * me + 2 * mi);
  for (int k = 0; k < J_eq.outerSize(); ++k)
    for (SpMat::InnerIterator it(J_eq, k); it; ++it)
      a_trips.emplace_back(it.row(), it.col(), it.value());
  for (int r = 0; r < me; ++r) {
    a_trips.emplace_back(r, v_off + r, 1.0);
    a_trips.emplace_back(r, w_off + r, -1.0);
  }
  for (int k = 0; k < J_in.outerSize(); ++k)
    for (SpMat::InnerIterator it(J_in, k); it; ++it)
      a_trips.emplace_back(me + it.row(), it.col(), it.value());
  for (int r = 0; r < mi; ++r) {
    a_trips.emplace_back(me + r, s_off + r, 1.0);
    a_trips.emplace_back(me + r, e_off + r, -1.0);
  }
  qp.A.resize(me + mi, n_qp);
  qp.A.setFromTriplets(a_trips.begin(), a_trips.end());
  qp.b = Vec(me + mi);
  qp.b.head(me) = -c_eq;
  qp.b.tail(mi) = -c_in;

  QpOptions qopts;
  qopts.tol = opts.qp_tol;
  qopts.max_iter = opts.qp_max_iter;
  const QpResult r = solve_box_qp(qp, qopts);

  QpOutcome out;
  out.iterations = r.iterations;
  out.converged = r.status == QpStatus::optimal;
  out.ok = r.status != QpStatus::numerical_failure && r.x.allFinite();
  if (!out.ok) return out;
  out.p = r.x.head(n);
  out.y_eq = r.y.head(me);
  out.z_in = r.y.tail(mi).cwiseMax(0.0);
  out.z_lo = r.z_lo.head(n);
  out.z_hi = r.z_hi.head(n);
  out.elastic = r.x.segment(e_off, mi).sum() + r.x.segment(v_off, me).sum() +
                r.x.segment(w_off, me).sum();
  // linearized violation: |c_eq + Jp|_1 + |(c_in + Jp)^+|_1
  Vec lin_eq = c_eq + J_eq * out.p;
  Vec lin_in = c_in + J_in * out.p;
  out.theta_lin = l1_violation(lin_eq, lin_in);
  return out;
}

struct EvalPoint {
  double f = 0.0;
  Vec c_eq, c_in;
  bool ok = false;
};

EvalPoint try_evaluate(const NlpProblem& nlp, const Vec& z) {
  EvalPoint e;
  e.c_eq.resize(nlp.num_eq);
  e.c_in.resize(nlp.num_ineq);
  try {
    nlp.evaluate(z, e.f, e.c_eq, e.c_in);
    e.ok = std::isfinite(e.f) && e.c_eq.allFinite() && e.c_in.allFinite();
  } catch (const Error&) {
    e.ok = false;
  }
  return e;
}

KktResiduals compute_kkt(const NlpProblem& nlp, const Vec& z, const Vec& g, const SpMat& J_eq,
                         const SpMat& J_in, const Vec& c_eq, const Vec& c_in,
                         const Multipliers& m) {
  KktResiduals k;
  Vec stat = g;
  if (nlp.num_eq > 0) stat += J_eq.transpose() * m.y_eq;
  if (nlp.num_ineq > 0) stat += J_in.transpose() * m.z_ineq;
  stat -= m.z_lo;
  stat += m.z_hi;
  k.stationarity = stat.lpNorm<Eigen::Infinity>();

  double feas = max_violation(c_eq, c_in);
  for (int i = 0; i < nlp.dim; ++i) {
    if (std::isfinite(nlp.lb[i])) feas = std::max(feas, nlp.lb[i] - z[i]);
    if (std::isfinite(nlp.ub[i])) feas = std::max(feas, z[i] - nlp.ub[i]);
  }
  k.feasibility = feas;

  double comp = 0.0;
  for (int i = 0; i < nlp.num_ineq; ++i) comp = std::max(comp, std::abs(m.z_ineq[i] * c_in[i]));
  for (int i = 0; i < nlp.dim; ++i) {
    if (std::isfinite(nlp.lb[i]))
      comp = std::max(comp, std::abs(m.z_lo[i] * (z[i] - nlp.lb[i])));
    else
      comp = std::max(comp, std::abs(m.z_lo[i]));
    if (std::isfinite(nlp.ub[i]))
      comp = std::max(comp, std::abs(m.z_hi[i] * (nlp.ub[i] - z[i])));
    else
      comp = std::max(comp, std::abs(m.z_hi[i]));
  }
  k.complementarity = comp;
  return k;
}

double multiplier_scale(const Multipliers& m, int n_con) {
  if (n_con == 0) return 1.0;
  const double sum = m.y_eq.cwiseAbs().sum() + m.z_ineq.cwiseAbs().sum() +
                     m.z_lo.cwiseAbs().sum() + m.z_hi.cwiseAbs().sum();
  constexpr double s_max = 100.0;
  return std::max(s_max, sum / n_con) / s_max;
}

}  // namespace

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::evaluation_failure: return "evaluation-failure";
  }
  return "unknown";
}

KktResiduals kkt_residuals(const NlpProblem& nlp, const Vec& z, const Multipliers& mults) {
  double f;
  Vec c_eq(nlp.num_eq), c_in(nlp.num_ineq);
  nlp.evaluate(z, f, c_eq, c_in);
  Vec g(nlp.dim);
  SpMat J_eq(nlp.num_eq, nlp.dim), J_in(nlp.num_ineq, nlp.dim);
  nlp.derivatives(z, g, J_eq, J_in);
  return compute_kkt(nlp, z, g, J_eq, J_in, c_eq, c_in, mults);
}

SolveResult solve_nlp(const NlpProblem& nlp, const Vec& z0, const SolverOptions& opts) {
  if (z0.size() != nlp.dim)
    raise(ErrorCode::dimension_mismatch, "solve_nlp: initial point has wrong dimension");

  SolveResult res;
  res.z = z0.cwiseMax(nlp.lb).cwiseMin(nlp.ub);
  res.multipliers.y_eq = Vec::Zero(nlp.num_eq);
  res.multipliers.z_ineq = Vec::Zero(nlp.num_ineq);
  res.multipliers.z_lo = Vec::Zero(nlp.dim);
  res.multipliers.z_hi = Vec::Zero(nlp.dim);

  EvalPoint cur = try_evaluate(nlp, res.z);
  if (!cur.ok) {
    res.report.status = SolveStatus::evaluation_failure;
    res.report.message = "objective/constraint evaluation failed at the initial point";
    return res;
  }

  nlp.derivatives(res.z, g, J_eq, J_in);

  BlockHessian hess(nlp);
  double penalty = opts.penalty_init;
  double prox = 0.0;  // Levenberg-style damping, adapted to line-search behavior
  int ls_failures = 0;
  int qp_iters_total = 0;
  double theta_track = std::numeric_limits<double>::infinity();
  int theta_stall = 0;

  Vec best_z = res.z;
  double best_theta = l1_violation(cur.c_eq, cur.c_in);
  double best_f = cur.f;
  auto better = [&](double th, double f) {
    const double tol = std::max(opts.feas_tol, 1e-12);
    if (th <= tol && best_theta <= tol) return f < best_f;
    return th < best_theta;
  };

  Vec g(nlp.dim);
  SpMat J_eq(nlp.num_eq, nlp.dim), J_in(nlp.num_ineq, nlp.dim);

  // Jump to a constraint-restored point when it does not inflate the merit;
  // the quasi-Newton pair across the jump is skipped by the caller.
  auto attempt_restore = [&]() -> bool {
    if (!nlp.restore) return false;
    Vec z_r = res.z;
    if (!nlp.restore(z_r)) return false;
    z_r = z_r.cwiseMax(nlp.lb).cwiseMin(nlp.ub);
    const EvalPoint er = try_evaluate(nlp, z_r);
    if (!er.ok) return false;
    const double th_r = l1_violation(er.c_eq, er.c_in);
    const double merit_r = er.f + penalty * th_r;
    const double merit_c = cur.f + penalty * l1_violation(cur.c_eq, cur.c_in);
    if (merit_r > merit_c + 1e-10 * (1.0 + std::abs(merit_c))) return false;
    res.z = z_r;
    cur = er;
    try {
      nlp.derivatives(res.z, g, J_eq, J_in);
    } catch (const Error&) {
      return false;
    }
    if (better(th_r, cur.f)) {
      best_z = res.z;
      best_theta = th_r;
      best_f = cur.f;
    }
    theta_track = th_r;
    theta_stall = 0;
    if (opts.verbose)
      std::fprintf(stderr, "  [sqp] restored to theta=%.3e f=%.6e\n", th_r, cur.f);
    return true;
  };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // subproblem, growing the penalty until the elastics drop out (or cap)
    QpOutcome qp;
    for (int bump = 0; bump < 8; ++bump) {
      qp = solve_subproblem(nlp, hess, res.z, g, J_eq, J_in, cur.c_eq, cur.c_in, penalty, prox,
                            opts);
      if (!qp.ok) break;
      const double theta = l1_violation(cur.c_eq, cur.c_in);
      if (opts.verbose)
        std::fprintf(stderr,
                     "  [sqp %3d bump %d] pen=%.1e qp_it=%d elastic=%.3e theta=%.3e |p|=%.3e\n",
                     iter, bump, penalty, qp.iterations, qp.elastic, theta,
                     qp.p.lpNorm<Eigen::Infinity>());
      // the step only needs to cut the linearized infeasibility, not erase it;
      // raise the penalty only when a fully solved QP fails to do even that
      if (!qp.converged || qp.theta_lin <= std::max(0.9 * theta, 1e-10) ||
          penalty >= opts.penalty_max)
        break;
      penalty = std::min(penalty * 10.0, opts.penalty_max);
    }
    qp_iters_total += qp.iterations;
    if (!qp.ok) {
      // damp and retry with fresh curvature before giving up
      ++ls_failures;
      if (ls_failures >= opts.max_ls_failures) {
        res.report.status = SolveStatus::max_iterations;
        res.report.message = "QP subproblem failed numerically";
        break;
      }
      prox = std::max(10.0 * prox, 1e-2);
      if (ls_failures >= 2) hess.reset();
      continue;
    }

    res.multipliers.y_eq = qp.y_eq;
    res.multipliers.z_ineq = qp.z_in;
    res.multipliers.z_lo = qp.z_lo;
    res.multipliers.z_hi = qp.z_hi;

    const KktResiduals kkt =
        compute_kkt(nlp, res.z, g, J_eq, J_in, cur.c_eq, cur.c_in, res.multipliers);
    const double s_d = multiplier_scale(res.multipliers, nlp.num_eq + nlp.num_ineq + nlp.dim);
    res.report.kkt = kkt;
    if (kkt.feasibility <= opts.feas_tol && kkt.stationarity <= opts.kkt_tol * s_d &&
        kkt.complementarity <= opts.kkt_tol * s_d) {
      res.report.status = SolveStatus::converged;
      break;
    }

    const double theta = l1_violation(cur.c_eq, cur.c_in);
    const double step_norm = qp.p.lpNorm<Eigen::Infinity>();
    if (step_norm <= 1e-14 * (1.0 + res.z.lpNorm<Eigen::Infinity>())) {
      if (kkt.feasibility <= opts.feas_tol) {
        res.report.status = SolveStatus::converged;
        break;
      }
      if (penalty >= opts.penalty_max) {
        // no direction even at the penalty cap: stationary point of the
        // infeasibility measure
        res.report.status = SolveStatus::infeasible;
        res.report.message = "stationary but infeasible";
        break;
      }
    }

    // l1 merit line search along p. A converged QP always yields a descent
    // direction for the merit; anything else is numerical breakdown.
    const double dir_deriv = g.dot(qp.p) + penalty * (qp.theta_lin - theta);
    if (dir_deriv > 1e-10 * (1.0 + std::abs(cur.f))) {
      ++ls_failures;
      if (ls_failures >= opts.max_ls_failures) {
        res.report.status = SolveStatus::max_iterations;
        res.report.message = "subproblem produced an ascent direction";
        break;
      }
      prox = std::max(10.0 * prox, 1e-2);
      hess.reset();
      continue;
    }
    const double merit0 = cur.f + penalty * theta;
    double alpha = 1.0;
    bool accepted = false;
    EvalPoint trial;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      Vec z_trial = res.z + alpha * qp.p;
      z_trial = z_trial.cwiseMax(nlp.lb).cwiseMin(nlp.ub);
      trial = try_evaluate(nlp, z_trial);
      double merit = kInf;
      if (trial.ok) {
        merit = trial.f + penalty * l1_violation(trial.c_eq, trial.c_in);
        if (merit <= merit0 + opts.armijo_c1 * alpha * std::min(dir_deriv, 0.0)) {
          res.z = z_trial;
          accepted = true;
          break;
        }
      }
      if (opts.verbose && ls < 6)
        std::fprintf(stderr, "    [ls %d] alpha=%.3e merit=%.9e allowed=%.9e f=%.3e th=%.3e\n",
                     ls, alpha, merit,
                     merit0 + opts.armijo_c1 * alpha * std::min(dir_deriv, 0.0),
                     trial.ok ? trial.f : -1.0,
                     trial.ok ? l1_violation(trial.c_eq, trial.c_in) : -1.0);
      // quadratic interpolation on the merit when it is informative
      double next = opts.backtrack * alpha;
      if (std::isfinite(merit) && dir_deriv < 0.0) {
        const double denom = merit - merit0 - dir_deriv * alpha;
        if (denom > 0.0) {
          const double quad = -0.5 * dir_deriv * alpha * alpha / denom;
          next = std::clamp(quad, 0.1 * alpha, 0.5 * alpha);
        }
      }
      alpha = next;
    }

    if (opts.verbose)
      std::fprintf(stderr,
                   "  [sqp %3d] accepted=%d alpha=%.3e dir=%.3e merit0=%.6e kkt=(%.2e %.2e %.2e)\n",
                   iter, int(accepted), alpha, dir_deriv, merit0, kkt.stationarity,
                   kkt.feasibility, kkt.complementarity);
    if (!accepted) {
      if (attempt_restore()) {
        ls_failures = 0;
        continue;
      }
      ++ls_failures;
      if (ls_failures >= opts.max_ls_failures) {
        res.report.status = SolveStatus::max_iterations;
        res.report.message = "repeated line-search failure";
        break;
      }
      prox = std::max(10.0 * prox, 1e-2);
      if (ls_failures >= 2) hess.reset();
      continue;
    }
    // damping control: good steps relax it, heavy backtracking tightens it
    if (alpha >= 1.0 - 1e-12) {
      prox = prox > 1e-8 ? prox / 10.0 : 0.0;
    } else if (alpha >= 0.5) {
      prox = prox > 1e-8 ? prox / 3.0 : 0.0;
    } else if (alpha >= 0.25) {
      prox /= 1.5;
      if (prox < 1e-8) prox = 0.0;
    } else {
      prox = std::min(std::max(4.0 * prox, 1e-4), 1e6);
    }

    if (alpha * step_norm <= 1e-14 * (1.0 + res.z.lpNorm<Eigen::Infinity>())) {
      // accepted but made no progress
      ++ls_failures;
      if (ls_failures >= opts.max_ls_failures) {
        res.report.status = SolveStatus::max_iterations;
        res.report.message = "stalled with negligible steps";
        break;
      }
    } else {
      ls_failures = 0;
    }

    const EvalPoint prev = cur;
    cur = trial;
    const double theta_new = l1_violation(cur.c_eq, cur.c_in);
    if (better(theta_new, cur.f)) {
      best_z = res.z;
      best_theta = theta_new;
      best_f = cur.f;
    }

    // cool the penalty once feasible: a cap far above the multiplier scale
    // only stiffens the merit landscape
    if (theta_new <= 10.0 * opts.feas_tol) {
      const double mult_norm =
          std::max(res.multipliers.y_eq.size() ? res.multipliers.y_eq.cwiseAbs().maxCoeff() : 0.0,
                   res.multipliers.z_ineq.size() ? res.multipliers.z_ineq.cwiseAbs().maxCoeff()
                                                 : 0.0);
      const double target = std::max(opts.penalty_init, 10.0 * mult_norm);
      if (penalty > 100.0 * target) penalty = target;
    }

    // gradients at the accepted point; BFGS on the Lagrangian gradient change
    Vec g_new(nlp.dim);
    SpMat J_eq_new(nlp.num_eq, nlp.dim), J_in_new(nlp.num_ineq, nlp.dim);
    try {
      nlp.derivatives(res.z, g_new, J_eq_new, J_in_new);
    } catch (const Error& e) {
      res.report.status = SolveStatus::evaluation_failure;
      res.report.message = std::string("derivative evaluation failed: ") + e.what();
      break;
    }

    Vec grad_L_old = g;
    Vec grad_L_new = g_new;
    if (nlp.num_eq > 0) {
      grad_L_old += J_eq.transpose() * res.multipliers.y_eq;
      grad_L_new += J_eq_new.transpose() * res.multipliers.y_eq;
    }
    if (nlp.num_ineq > 0) {
      grad_L_old += J_in.transpose() * res.multipliers.z_ineq;
      grad_L_new += J_in_new.transpose() * res.multipliers.z_ineq;
    }
    hess.update(alpha * qp.p, grad_L_new - grad_L_old);

    g = std::move(g_new);
    J_eq = std::move(J_eq_new);
    J_in = std::move(J_in_new);

    if (opts.callback) {
      IterationInfo info;
      info.iteration = iter;
      info.objective = cur.f;
      info.violation = theta_new;
      info.merit = cur.f + penalty * theta_new;
      info.merit_pre = merit0;
      info.penalty = penalty;
      info.step_length = alpha;
      info.qp_elastic = qp.elastic;
      opts.callback(info);
    }
    (void)prev;

    if (theta_new < 0.9 * theta_track) {
      theta_track = theta_new;
      theta_stall = 0;
    } else if (theta_new > opts.feas_tol && ++theta_stall >= 6) {
      theta_stall = 0;
      attempt_restore();
    }
  }

  if (iter >= opts.max_iter) res.report.status = SolveStatus::max_iterations;

  // fall back to the best point seen when the run did not converge
  if (res.report.status != SolveStatus::converged) {
    const EvalPoint now = try_evaluate(nlp, res.z);
    const double th_now = now.ok ? l1_violation(now.c_eq, now.c_in) : kInf;
    const double f_now = now.ok ? now.f : kInf;
    const double tol = std::max(opts.feas_tol, 1e-12);
    const bool best_wins = (best_theta <= tol && th_now <= tol) ? best_f < f_now
                                                                : best_theta < th_now;
    if (!now.ok || best_wins) res.z = best_z;
    if (res.report.status == SolveStatus::max_iterations && penalty >= opts.penalty_max) {
      const EvalPoint chk = try_evaluate(nlp, res.z);
      if (chk.ok && max_violation(chk.c_eq, chk.c_in) > 100.0 * opts.feas_tol)
        res.report.status = SolveStatus::infeasible;
    }
  }

  const EvalPoint fin = try_evaluate(nlp, res.z);
  if (fin.ok) {
    res.report.objective = fin.f;
    res.report.constraint_violation = max_violation(fin.c_eq, fin.c_in);
    try {
      Vec gf(nlp.dim);
      SpMat Je(nlp.num_eq, nlp.dim), Ji(nlp.num_ineq, nlp.dim);
      nlp.derivatives(res.z, gf, Je, Ji);
      res.report.kkt = compute_kkt(nlp, res.z, gf, Je, Ji, fin.c_eq, fin.c_in, res.multipliers);
    } catch (const Error&) {
    }
  }
  res.report.iterations = iter;
  res.report.qp_iterations = qp_iters_total;
  return res;
}

}  // namespace antiroll
