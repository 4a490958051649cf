#include "antiroll/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "antiroll/disjunction.hpp"
#include "antiroll/rollover.hpp"

namespace antiroll {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// tracking errors are metres-squared-seconds (~1e-3) against O(1) constraint
// rows; the NLP sees an upscaled objective, reports stay in natural units
constexpr double kObjectiveScale = 100.0;
}  // namespace

const char* to_string(ConstraintMode m) noexcept {
  return m == ConstraintMode::disjunctive ? "disjunctive" : "conservative";
}

const char* to_string(ForceMode m) noexcept {
  switch (m) {
    case ForceMode::free_forces: return "free";
    case ForceMode::anti_symmetric: return "anti_symmetric";
    case ForceMode::phi_parameterized: return "phi";
    case ForceMode::phi3_only: return "phi3";
  }
  return "unknown";
}

std::vector<double> Grid::times() const {
  std::vector<double> t(N);
  const double step = h();
  for (int i = 0; i < N; ++i) t[i] = t0 + step * i;
  t.back() = t_f;
  return t;
}

void Grid::validate() const {
  if (N < 2) raise(ErrorCode::invalid_parameter, "grid needs N >= 2");
  if (!(t_f > t0)) raise(ErrorCode::invalid_parameter, "grid needs t_f > t0");
}

// --- layout ------------------------------------------------------------------

void TranscribedProblem::build_layout() {
  const int N = scenario_.grid.N;
  const int nc = scenario_.has_force_vars() ? 2 : 0;
  const int nl = scenario_.constraints == ConstraintMode::disjunctive ? 2 : 0;
  stride_ = 20 + nc + nl;
  dim_ = N * stride_ + scenario_.num_phi();

  n_eq_ = 10 + 20 * (N - 1) +
          (scenario_.forces == ForceMode::anti_symmetric ? N : 0);
  const int per_node_in = 4 + (scenario_.num_phi() > 0 ? 2 : 0) + 2;
  n_ineq_ = N * per_node_in;

  x_scale_ << 10.0, 10.0, 1.0, 0.1, 0.1, 10.0, 10.0, 1.0, 1.0, 1.0;
  // the auxiliaries carry rate-of-f magnitudes, roughly one decade above the
  // corresponding state scale at the maneuver's ~0.1 s time constant
  a_scale_ = 10.0 * x_scale_;
  branch1_scale_ = cfg_.M * cfg_.g / 2.0;

  // bounds, natural units scaled into z
  lb_ = Vec::Constant(dim_, -kInf);
  ub_ = Vec::Constant(dim_, kInf);
  Vec10 x_lo, x_hi;
  x_lo << -1e4, -1e4, 0.05, -1.35, -3.2, 0.5, -60.0, -20.0, -20.0, -20.0;
  x_hi << 1e4, 1e4, 3.0, 1.35, 3.2, 60.0, 60.0, 20.0, 20.0, 20.0;
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < 10; ++k) {
      lb_[x_offset(n) + k] = x_lo[k] / x_scale_[k];
      ub_[x_offset(n) + k] = x_hi[k] / x_scale_[k];
      // auxiliaries carry rate-of-f magnitudes; generous physical bounds
      lb_[a_offset(n) + k] = -2e4 / a_scale_[k];
      ub_[a_offset(n) + k] = 2e4 / a_scale_[k];
    }
    if (scenario_.has_force_vars()) {
      for (int k = 0; k < 2; ++k) {
        lb_[force_offset(n) + k] = -cfg_.F_max / force_scale_;
        ub_[force_offset(n) + k] = cfg_.F_max / force_scale_;
      }
    }
    if (scenario_.constraints == ConstraintMode::disjunctive) {
      for (int k = 0; k < 2; ++k) {
        lb_[lambda_offset(n) + k] = 0.0;
        ub_[lambda_offset(n) + k] = 1.0;
      }
    }
  }
  for (int k = 0; k < scenario_.num_phi(); ++k) {
    lb_[phi_offset() + k] = -scenario_.phi_bound / phi_scale_;
    ub_[phi_offset() + k] = scenario_.phi_bound / phi_scale_;
  }

  // trapezoid weights
  const double h = scenario_.grid.h();
  trapezoid_w_.assign(N, h);
  trapezoid_w_.front() = h / 2.0;
  trapezoid_w_.back() = h / 2.0;

  const VehicleState s0 = initial_state(cfg_, ref_X_dot_.front());
  x_init_ = s0.to_vector();
}

void TranscribedProblem::build_coloring() {
  const int N = scenario_.grid.N;
  const int per_node_in = n_ineq_ / N;
  columns_.assign(dim_, Column{});
  linear_eq_rows_.clear();

  auto defect_rows = [&](int interval) {  // 20 rows of one interval
    std::vector<int> rows;
    rows.reserve(20);
    for (int k = 0; k < 20; ++k) rows.push_back(10 + 20 * interval + k);
    return rows;
  };

  for (int n = 0; n < N; ++n) {
    std::vector<int> eq_rows;
    if (n > 0)
      for (int r : defect_rows(n - 1)) eq_rows.push_back(r);
    if (n < N - 1)
      for (int r : defect_rows(n)) eq_rows.push_back(r);
    std::vector<int> in_rows;
    for (int k = 0; k < per_node_in; ++k) in_rows.push_back(n * per_node_in + k);

    for (int k = 0; k < stride_; ++k) {
      Column& col = columns_[n * stride_ + k];
      const bool is_lambda =
          scenario_.constraints == ConstraintMode::disjunctive && k >= stride_ - 2;
      if (!is_lambda) col.eq_rows = eq_rows;
      col.in_rows = in_rows;
    }
  }
  for (int k = 0; k < scenario_.num_phi(); ++k) {
    Column& col = columns_[phi_offset() + k];
    col.eq_rows.reserve(20 * (N - 1));
    for (int r = 10; r < 10 + 20 * (N - 1); ++r) col.eq_rows.push_back(r);
    col.in_rows.reserve(n_ineq_);
    for (int r = 0; r < n_ineq_; ++r) col.in_rows.push_back(r);
  }

  // exact rows: initial condition identity and anti-symmetry sums
  for (int k = 0; k < 10; ++k) linear_eq_rows_.emplace_back(k, x_offset(0) + k);
  if (scenario_.forces == ForceMode::anti_symmetric) {
    const int base = 10 + 20 * (N - 1);
    for (int n = 0; n < N; ++n) {
      linear_eq_rows_.emplace_back(base + n, force_offset(n));
      linear_eq_rows_.emplace_back(base + n, force_offset(n) + 1);
    }
  }

  // columns of the same per-node slot two nodes apart have disjoint supports
  color_groups_.clear();
  for (int parity = 0; parity < 2; ++parity) {
    for (int k = 0; k < stride_; ++k) {
      std::vector<int> group;
      for (int n = parity; n < N; n += 2) group.push_back(n * stride_ + k);
      if (!group.empty()) color_groups_.push_back(std::move(group));
    }
  }
  for (int k = 0; k < scenario_.num_phi(); ++k) color_groups_.push_back({phi_offset() + k});
}

TranscribedProblem TranscribedProblem::build(const VehicleConfig& cfg,
                                             const ScenarioConfig& scenario,
                                             const SteeringProfile& steer,
                                             const ReferenceTrajectory& ref) {
  cfg.validate();
  scenario.grid.validate();
  if (!(scenario.alpha.rho >= 0.0 && scenario.alpha.rho < 1.0) || scenario.alpha.gamma <= 0.5)
    raise(ErrorCode::invalid_parameter, "scenario alpha parameters are invalid");
  const std::vector<double> t = scenario.grid.times();
  if (ref.size() != t.size())
    raise(ErrorCode::build_error, "reference and grid lengths differ");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(ref.t[i] - t[i]) > 1e-9)
      raise(ErrorCode::build_error, "reference not sampled on the scenario grid");
  if (scenario.num_phi() > 0 && scenario.phi_guess.size() != 0 &&
      scenario.phi_guess.size() != scenario.num_phi())
    raise(ErrorCode::build_error, "phi guess has wrong length");

  TranscribedProblem p;
  p.cfg_ = cfg;
  p.scenario_ = scenario;
  p.steer_ = steer;
  p.t_ = t;
  p.ref_X_ = ref.X;
  p.ref_Y_ = ref.Y;
  p.ref_theta_Z_ = ref.theta_Z;
  p.ref_X_dot_ = ref.X_dot;
  p.ref_Y_dot_ = ref.Y_dot;
  p.ref_theta_Z_dot_ = ref.theta_Z_dot;
  p.build_layout();
  p.build_coloring();
  return p;
}

// --- pack / unpack ------------------------------------------------------------

Vec TranscribedProblem::pack(const DecisionVariables& v) const {
  const int N = scenario_.grid.N;
  if (int(v.x.size()) != N || int(v.a.size()) != N)
    raise(ErrorCode::dimension_mismatch, "pack: wrong node count");
  Vec z = Vec::Zero(dim_);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < 10; ++k) {
      z[x_offset(n) + k] = v.x[n][k] / x_scale_[k];
      z[a_offset(n) + k] = v.a[n][k] / a_scale_[k];
    }
    if (scenario_.has_force_vars()) {
      z[force_offset(n)] = v.F_l.at(n) / force_scale_;
      z[force_offset(n) + 1] = v.F_r.at(n) / force_scale_;
    }
    if (scenario_.constraints == ConstraintMode::disjunctive) {
      z[lambda_offset(n)] = v.lambda_left.at(n);
      z[lambda_offset(n) + 1] = v.lambda_right.at(n);
    }
  }
  for (int k = 0; k < scenario_.num_phi(); ++k) z[phi_offset() + k] = v.phi[k] / phi_scale_;
  return z;
}

DecisionVariables TranscribedProblem::unpack(const Vec& z) const {
  if (z.size() != dim_) raise(ErrorCode::dimension_mismatch, "unpack: wrong dimension");
  const int N = scenario_.grid.N;
  DecisionVariables v;
  v.x.resize(N);
  v.a.resize(N);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < 10; ++k) {
      v.x[n][k] = z[x_offset(n) + k] * x_scale_[k];
      v.a[n][k] = z[a_offset(n) + k] * a_scale_[k];
    }
  }
  if (scenario_.has_force_vars()) {
    v.F_l.resize(N);
    v.F_r.resize(N);
    for (int n = 0; n < N; ++n) {
      v.F_l[n] = z[force_offset(n)] * force_scale_;
      v.F_r[n] = z[force_offset(n) + 1] * force_scale_;
    }
  }
  if (scenario_.constraints == ConstraintMode::disjunctive) {
    v.lambda_left.resize(N);
    v.lambda_right.resize(N);
    for (int n = 0; n < N; ++n) {
      v.lambda_left[n] = z[lambda_offset(n)];
      v.lambda_right[n] = z[lambda_offset(n) + 1];
    }
  }
  if (scenario_.num_phi() > 0) {
    v.phi.resize(scenario_.num_phi());
    for (int k = 0; k < scenario_.num_phi(); ++k) v.phi[k] = z[phi_offset() + k] * phi_scale_;
  }
  return v;
}

ControlInput TranscribedProblem::control_at(const DecisionVariables& v, int n) const {
  ControlInput u;
  switch (scenario_.forces) {
    case ForceMode::free_forces:
    case ForceMode::anti_symmetric:
      u.F_l = v.F_l[n];
      u.F_r = v.F_r[n];
      break;
    case ForceMode::phi_parameterized: {
      const Vec10& x = v.x[n];
      u.F_l = v.phi[0] * x[3] + v.phi[1] * x[8] + v.phi[2] * x[9] +
              v.phi[3] * (x[2] - cfg_.Z0) + v.phi[4] * x[7];
      u.F_r = -u.F_l;
      break;
    }
    case ForceMode::phi3_only:
      u.F_l = v.phi[0] * v.x[n][9];
      u.F_r = -u.F_l;
      break;
  }
  return u;
}

// --- evaluation ----------------------------------------------------------------

void TranscribedProblem::evaluate(const Vec& z, double& f, Vec& c_eq, Vec& c_in) const {
  const DecisionVariables v = unpack(z);
  const int N = scenario_.grid.N;
  const double h = scenario_.grid.h();
  const double c = scenario_.alpha.beta / scenario_.alpha.gamma;
  const double gamma = scenario_.alpha.gamma;

  c_eq.resize(n_eq_);
  c_in.resize(n_ineq_);

  std::vector<Vec10> rhs(N);
  std::vector<ControlInput> u(N);
  std::vector<VehicleState> s(N);
  for (int n = 0; n < N; ++n) {
    s[n] = VehicleState::from_vector(v.x[n]);
    u[n] = control_at(v, n);
    rhs[n] = dynamics_rhs(cfg_, s[n], u[n], steer_.angle_rad(t_[n]),
                          scenario_.tire_smoothing_width);
  }

  for (int k = 0; k < 10; ++k) c_eq[k] = (v.x[0][k] - x_init_[k]) / x_scale_[k];
  for (int n = 0; n + 1 < N; ++n) {
    const Vec10 d1 = v.x[n + 1] - v.x[n] - (1.0 - c) * h * rhs[n] - c * h * rhs[n + 1] -
                     (0.5 - c) * h * h * v.a[n];
    const Vec10 d2 =
        v.a[n + 1] - (rhs[n + 1] - rhs[n]) / (h * gamma) - (1.0 - 1.0 / gamma) * v.a[n];
    for (int k = 0; k < 10; ++k) {
      c_eq[10 + 20 * n + k] = d1[k] / x_scale_[k];
      c_eq[10 + 20 * n + 10 + k] = d2[k] / a_scale_[k];
    }
  }
  if (scenario_.forces == ForceMode::anti_symmetric) {
    const int base = 10 + 20 * (N - 1);
    for (int n = 0; n < N; ++n) c_eq[base + n] = (v.F_l[n] + v.F_r[n]) / force_scale_;
  }

  const int per_node_in = n_ineq_ / N;
  f = 0.0;
  for (int n = 0; n < N; ++n) {
    const double dX = v.x[n][0] - ref_X_[n];
    const double dY = v.x[n][1] - ref_Y_[n];
    f += kObjectiveScale * trapezoid_w_[n] * (dX * dX + dY * dY);

    int r = n * per_node_in;
    const auto path = path_constraint_residuals(cfg_, s[n], u[n]);
    for (int k = 0; k < 4; ++k) c_in[r++] = path[k];
    if (scenario_.num_phi() > 0) {
      c_in[r++] = (u[n].F_l - cfg_.F_max) / force_scale_;
      c_in[r++] = (-u[n].F_l - cfg_.F_max) / force_scale_;
    }
    const BranchValues bv = antiroll_branch_functions(cfg_, s[n], u[n], rhs[n]);
    const double f1l = bv.f1_left / branch1_scale_;
    const double f1r = bv.f1_right / branch1_scale_;
    if (scenario_.constraints == ConstraintMode::disjunctive) {
      const double ll = v.lambda_left[n];
      const double lr = v.lambda_right[n];
      c_in[r++] = ll * f1l + (1.0 - ll) * bv.f2_left;
      c_in[r++] = lr * f1r + (1.0 - lr) * bv.f2_right;
    } else {
      c_in[r++] = f1l;
      c_in[r++] = f1r;
    }
  }
}

void TranscribedProblem::derivatives(const Vec& z, Vec& grad, SpMat& J_eq, SpMat& J_in) const {
  double f0;
  Vec eq0, in0;
  evaluate(z, f0, eq0, in0);

  // analytic objective gradient: only X and Y slots enter the trapezoid sum
  grad = Vec::Zero(dim_);
  const int N = scenario_.grid.N;
  for (int n = 0; n < N; ++n) {
    const double X = z[x_offset(n)] * x_scale_[0];
    const double Y = z[x_offset(n) + 1] * x_scale_[1];
    grad[x_offset(n)] = 2.0 * kObjectiveScale * trapezoid_w_[n] * (X - ref_X_[n]) * x_scale_[0];
    grad[x_offset(n) + 1] =
        2.0 * kObjectiveScale * trapezoid_w_[n] * (Y - ref_Y_[n]) * x_scale_[1];
  }

  std::vector<Eigen::Triplet<double>> eq_trips, in_trips;
  eq_trips.reserve(50 * dim_ / 2);
  in_trips.reserve(10 * dim_ / 2);

  Vec zp = z;
  double fp;
  Vec eqp, inp;
  for (const auto& group : color_groups_) {
    zp = z;
    for (int col : group) zp[col] += 1e-6 * (1.0 + std::abs(z[col]));
    evaluate(zp, fp, eqp, inp);
    for (int col : group) {
      const double step = 1e-6 * (1.0 + std::abs(z[col]));
      for (int row : columns_[col].eq_rows) {
        const double d = (eqp[row] - eq0[row]) / step;
        if (std::abs(d) > 1e-12) eq_trips.emplace_back(row, col, d);
      }
      for (int row : columns_[col].in_rows) {
        const double d = (inp[row] - in0[row]) / step;
        if (std::abs(d) > 1e-12) in_trips.emplace_back(row, col, d);
      }
    }
  }
  for (const auto& [row, col] : linear_eq_rows_) eq_trips.emplace_back(row, col, 1.0);

  J_eq.resize(n_eq_, dim_);
  J_eq.setFromTriplets(eq_trips.begin(), eq_trips.end());
  J_in.resize(n_ineq_, dim_);
  J_in.setFromTriplets(in_trips.begin(), in_trips.end());
}

NlpProblem TranscribedProblem::nlp() const {
  NlpProblem p;
  p.dim = dim_;
  p.lb = lb_;
  p.ub = ub_;
  p.num_eq = n_eq_;
  p.num_ineq = n_ineq_;
  p.evaluate = [this](const Vec& z, double& f, Vec& ceq, Vec& cin) {
    evaluate(z, f, ceq, cin);
  };
  p.derivatives = [this](const Vec& z, Vec& g, SpMat& Je, SpMat& Ji) {
    derivatives(z, g, Je, Ji);
  };
  const int N = scenario_.grid.N;
  for (int n = 0; n < N; ++n) p.hessian_blocks.emplace_back(n * stride_, stride_);
  if (scenario_.num_phi() > 0) p.hessian_blocks.emplace_back(phi_offset(), scenario_.num_phi());

  Vec diag = Vec::Constant(dim_, 0.1);
  for (int n = 0; n < N; ++n) {
    diag[x_offset(n)] += 2.0 * kObjectiveScale * trapezoid_w_[n] * x_scale_[0] * x_scale_[0];
    diag[x_offset(n) + 1] +=
        2.0 * kObjectiveScale * trapezoid_w_[n] * x_scale_[1] * x_scale_[1];
  }
  p.hessian_init_diag = diag;
  p.restore = [this](Vec& z) -> bool {
    DecisionVariables v = unpack(z);
    if (!integrate_decision(v)) return false;
    canonicalize_lambdas(v);
    z = pack(v);
    return true;
  };
  return p;
}

// --- guesses -------------------------------------------------------------------

void TranscribedProblem::fill_consistent_aux(DecisionVariables& v) const {
  const int N = scenario_.grid.N;
  const double h = scenario_.grid.h();
  const double gamma = scenario_.alpha.gamma;
  std::vector<Vec10> rhs(N);
  for (int n = 0; n < N; ++n) {
    rhs[n] = dynamics_rhs(cfg_, VehicleState::from_vector(v.x[n]), control_at(v, n),
                          steer_.angle_rad(t_[n]), scenario_.tire_smoothing_width);
  }
  const double eps = 1e-6;
  const Vec10 x_eps = v.x[0] + eps * rhs[0];
  const Vec10 f_eps = dynamics_rhs(cfg_, VehicleState::from_vector(x_eps), control_at(v, 0),
                                   steer_.angle_rad(t_[0] + eps), scenario_.tire_smoothing_width);
  v.a[0] = (f_eps - rhs[0]) / eps;
  for (int n = 0; n + 1 < N; ++n)
    v.a[n + 1] = (rhs[n + 1] - rhs[n]) / (h * gamma) + (1.0 - 1.0 / gamma) * v.a[n];
}

bool TranscribedProblem::integrate_decision(DecisionVariables& v) const {
  const int N = scenario_.grid.N;
  const double h = scenario_.grid.h();
  try {
    auto rhs = [&](const Vec& xv, double t) -> Vec {
      const VehicleState s = VehicleState::from_vector(xv);
      ControlInput u;
      switch (scenario_.forces) {
        case ForceMode::free_forces:
        case ForceMode::anti_symmetric: {
          const int node = std::clamp(int(std::lround((t - t_.front()) / h)), 0, N - 1);
          u = {v.F_l[node], v.F_r[node]};
          break;
        }
        case ForceMode::phi_parameterized:
          u.F_l = v.phi[0] * s.theta_X + v.phi[1] * s.theta_X_dot + v.phi[2] * s.theta_Z_dot +
                  v.phi[3] * (s.Z - cfg_.Z0) + v.phi[4] * s.Z_dot;
          u.F_r = -u.F_l;
          break;
        case ForceMode::phi3_only:
          u.F_l = v.phi[0] * s.theta_Z_dot;
          u.F_r = -u.F_l;
          break;
      }
      return dynamics_rhs(cfg_, s, u, steer_.angle_rad(t), scenario_.tire_smoothing_width);
    };
    const Vec x0 = x_init_;
    const AlphaTrajectory traj = alpha_integrate(scenario_.alpha, rhs, x0, std::nullopt, t_);
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < 10; ++k) {
        const double zx = traj.x[n][k] / x_scale_[k];
        const double za = traj.a[n][k] / a_scale_[k];
        if (zx < lb_[x_offset(n) + k] || zx > ub_[x_offset(n) + k] ||
            za < lb_[a_offset(n) + k] || za > ub_[a_offset(n) + k])
          return false;
      }
    }
    for (int n = 0; n < N; ++n) {
      v.x[n] = traj.x[n];
      v.a[n] = traj.a[n];
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

void TranscribedProblem::canonicalize_lambdas(DecisionVariables& v) const {
  if (scenario_.constraints != ConstraintMode::disjunctive) return;
  const int N = scenario_.grid.N;
  for (int n = 0; n < N; ++n) {
    try {
      const VehicleState s = VehicleState::from_vector(v.x[n]);
      const ControlInput u = control_at(v, n);
      const Vec10 d =
          dynamics_rhs(cfg_, s, u, steer_.angle_rad(t_[n]), scenario_.tire_smoothing_width);
      const BranchValues bv = antiroll_branch_functions(cfg_, s, u, d);
      auto wl = feasible_weight(Eigen::Vector2d(bv.f1_left / branch1_scale_, bv.f2_left));
      auto wr = feasible_weight(Eigen::Vector2d(bv.f1_right / branch1_scale_, bv.f2_right));
      if (wl) v.lambda_left[n] = (*wl)[0];
      if (wr) v.lambda_right[n] = (*wr)[0];
    } catch (const Error&) {
    }
  }
}

Vec TranscribedProblem::initial_guess() const {
  const int N = scenario_.grid.N;
  DecisionVariables v;
  v.x.assign(N, Vec10::Zero());
  v.a.assign(N, Vec10::Zero());

  double F_l_guess = 0.0, F_r_guess = 0.0;
  if (scenario_.has_force_vars() && scenario_.guess.kind == InitialGuessSpec::Kind::constant) {
    const double val = std::clamp(scenario_.guess.force_value, -cfg_.F_max, cfg_.F_max);
    F_l_guess = val;
    F_r_guess = scenario_.forces == ForceMode::anti_symmetric ? -val : val;
  }
  if (scenario_.has_force_vars()) {
    v.F_l.assign(N, F_l_guess);
    v.F_r.assign(N, F_r_guess);
  }
  if (scenario_.num_phi() > 0) {
    v.phi = scenario_.phi_guess.size() > 0 ? scenario_.phi_guess
                                           : Vec::Zero(scenario_.num_phi());
  }
  if (scenario_.constraints == ConstraintMode::disjunctive) {
    v.lambda_left.assign(N, 0.5);
    v.lambda_right.assign(N, 0.5);
  }

  // A guess that integrates the guessed control law satisfies the defect rows
  // from the start; fall back to the frozen-suspension reference otherwise.
  if (integrate_decision(v)) {
    canonicalize_lambdas(v);
  } else {
    for (int n = 0; n < N; ++n) {
      Vec10 x;
      x << ref_X_[n], ref_Y_[n], cfg_.Z0, 0.0, ref_theta_Z_[n], ref_X_dot_[n], ref_Y_dot_[n],
          0.0, 0.0, ref_theta_Z_dot_[n];
      v.x[n] = x;
    }
    fill_consistent_aux(v);
  }
  return pack(v);
}

Vec TranscribedProblem::initial_guess(const DecisionVariables& warm_start) const {
  DecisionVariables v = warm_start;
  if (v.a.size() != v.x.size()) {
    v.a.assign(v.x.size(), Vec10::Zero());
    fill_consistent_aux(v);
  }
  return pack(v);
}

// --- extraction ------------------------------------------------------------------

TrajectorySolution TranscribedProblem::extract(const Vec& z, const SolveReport& report) const {
  const DecisionVariables v = unpack(z);
  const int N = scenario_.grid.N;
  const double h = scenario_.grid.h();
  const double c = scenario_.alpha.beta / scenario_.alpha.gamma;
  const double gamma = scenario_.alpha.gamma;

  TrajectorySolution sol;
  sol.t = t_;
  sol.status = report.status;
  sol.kkt = report.kkt;
  sol.iterations = report.iterations;
  sol.phi = v.phi;

  std::vector<Vec10> rhs(N);
  sol.objective = 0.0;
  for (int n = 0; n < N; ++n) {
    const VehicleState s = VehicleState::from_vector(v.x[n]);
    const ControlInput u = control_at(v, n);
    sol.states.push_back(s);
    sol.aux.push_back(v.a[n]);
    sol.F_l.push_back(u.F_l);
    sol.F_r.push_back(u.F_r);
    sol.wheel_loads.push_back(wheel_reactions(cfg_, s, u));

    BranchValues bv;
    double R = kNaN;
    try {
      rhs[n] = dynamics_rhs(cfg_, s, u, steer_.angle_rad(t_[n]), scenario_.tire_smoothing_width);
      bv = antiroll_branch_functions(cfg_, s, u, rhs[n]);
      R = rollover_index(sol.wheel_loads.back());
    } catch (const Error&) {
      rhs[n].setConstant(kNaN);
      bv = {kNaN, kNaN, kNaN, kNaN};
    }
    sol.branches.push_back(bv);
    sol.R.push_back(R);

    const double dX = v.x[n][0] - ref_X_[n];
    const double dY = v.x[n][1] - ref_Y_[n];
    sol.objective += trapezoid_w_[n] * (dX * dX + dY * dY);

    const auto path = path_constraint_residuals(cfg_, s, u);
    sol.max_path_violation = std::max(sol.max_path_violation, path.maxCoeff());

    if (scenario_.constraints == ConstraintMode::disjunctive) {
      sol.lambda_left.push_back(v.lambda_left[n]);
      sol.lambda_right.push_back(v.lambda_right[n]);
      const double hl =
          v.lambda_left[n] * bv.f1_left / branch1_scale_ + (1.0 - v.lambda_left[n]) * bv.f2_left;
      const double hr = v.lambda_right[n] * bv.f1_right / branch1_scale_ +
                        (1.0 - v.lambda_right[n]) * bv.f2_right;
      sol.max_hull_violation = std::max({sol.max_hull_violation, hl, hr});
    } else {
      Eigen::Vector2d fl(bv.f1_left / branch1_scale_, bv.f2_left);
      Eigen::Vector2d fr(bv.f1_right / branch1_scale_, bv.f2_right);
      auto wl = feasible_weight(fl);
      auto wr = feasible_weight(fr);
      sol.lambda_left.push_back(wl ? (*wl)[0] : kNaN);
      sol.lambda_right.push_back(wr ? (*wr)[0] : kNaN);
      sol.max_hull_violation =
          std::max({sol.max_hull_violation, bv.f1_left / branch1_scale_,
                    bv.f1_right / branch1_scale_});
    }
  }

  for (int n = 0; n + 1 < N; ++n) {
    if (!rhs[n].allFinite() || !rhs[n + 1].allFinite()) continue;
    const Vec10 d1 = v.x[n + 1] - v.x[n] - (1.0 - c) * h * rhs[n] - c * h * rhs[n + 1] -
                     (0.5 - c) * h * h * v.a[n];
    const Vec10 d2 =
        v.a[n + 1] - (rhs[n + 1] - rhs[n]) / (h * gamma) - (1.0 - 1.0 / gamma) * v.a[n];
    sol.max_defect_residual =
        std::max({sol.max_defect_residual, d1.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff()});
  }
  return sol;
}

}  // namespace antiroll
