#include "antiroll/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "antiroll/integrators.hpp"

namespace antiroll {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_state: return "invalid state";
    case ErrorCode::degenerate_speed: return "degenerate speed";
    case ErrorCode::tire_singularity: return "tire-model singularity";
    case ErrorCode::roll_singularity: return "roll singularity";
    case ErrorCode::geometric_singularity: return "geometric singularity";
    case ErrorCode::invalid_parameter: return "invalid parameter";
    case ErrorCode::invalid_weight: return "invalid weight";
    case ErrorCode::step_failure: return "step failure";
    case ErrorCode::integration_failure: return "integration failure";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::build_error: return "build error";
    case ErrorCode::config_error: return "config error";
    case ErrorCode::undefined_index: return "undefined index";
    case ErrorCode::solver_failure: return "solver failure";
    case ErrorCode::io_error: return "io error";
  }
  return "unknown error";
}

void VehicleConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      raise(ErrorCode::invalid_parameter, std::string(name) + " must be positive");
  };
  positive(M, "M");
  positive(T, "T");
  positive(K, "K");
  positive(C, "C");
  positive(I_XX, "I_XX");
  positive(I_ZZ, "I_ZZ");
  positive(a, "a");
  positive(b, "b");
  positive(g, "g");
  positive(F_max, "F_max");
  if (!(mu > 0.0 && mu <= 2.0)) raise(ErrorCode::invalid_parameter, "mu must be in (0, 2]");
  if (!(Z_min < Z0 && Z0 < Z_max))
    raise(ErrorCode::invalid_parameter, "travel limits must satisfy Z_min < Z0 < Z_max");
}

Vec10 VehicleState::to_vector() const {
  Vec10 v;
  v << X, Y, Z, theta_X, theta_Z, X_dot, Y_dot, Z_dot, theta_X_dot, theta_Z_dot;
  return v;
}

VehicleState VehicleState::from_vector(const Eigen::Ref<const Vec10>& v) {
  VehicleState s;
  s.X = v[0];
  s.Y = v[1];
  s.Z = v[2];
  s.theta_X = v[3];
  s.theta_Z = v[4];
  s.X_dot = v[5];
  s.Y_dot = v[6];
  s.Z_dot = v[7];
  s.theta_X_dot = v[8];
  s.theta_Z_dot = v[9];
  return s;
}

bool VehicleState::finite() const { return to_vector().allFinite(); }

VehicleState initial_state(const VehicleConfig& cfg, double forward_speed) {
  VehicleState s;
  s.Z = cfg.Z0;
  s.X_dot = forward_speed;
  return s;
}

// --- steering ---------------------------------------------------------------

SteeringProfile SteeringProfile::straight(double t0, double t_f) {
  return from_breakpoints({{t0, 0.0}, {t_f, 0.0}});
}

SteeringProfile SteeringProfile::from_breakpoints(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2)
    raise(ErrorCode::invalid_parameter, "steering profile needs at least two breakpoints");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i].first < pts[i + 1].first))
      raise(ErrorCode::invalid_parameter, "steering breakpoint times must strictly increase");
  SteeringProfile p;
  p.pts_ = std::move(pts);
  return p;
}

SteeringProfile SteeringProfile::fishhook(const FishhookParams& p, double t0, double t_f) {
  const double t1 = t0 + p.ramp_start;
  const double t2 = t1 + p.ramp_time;
  const double t3 = t2 + p.dwell;
  const double t4 = t3 + p.reversal_time;
  if (!(t4 < t_f))
    raise(ErrorCode::invalid_parameter, "fishhook phases must finish before t_f");
  std::vector<std::pair<double, double>> pts;
  if (p.ramp_start > 0.0) pts.emplace_back(t0, 0.0);
  pts.emplace_back(t1, 0.0);
  pts.emplace_back(t2, p.peak_deg);
  pts.emplace_back(t3, p.peak_deg);
  pts.emplace_back(t4, -p.reverse_deg);
  pts.emplace_back(t_f, -p.reverse_deg);
  if (pts.front().first > t0) pts.insert(pts.begin(), {t0, 0.0});
  return from_breakpoints(std::move(pts));
}

double SteeringProfile::angle_deg(double t) const {
  if (pts_.empty()) return 0.0;
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), t,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

double SteeringProfile::angle_rad(double t) const { return angle_deg(t) * M_PI / 180.0; }

// --- forces -----------------------------------------------------------------

Eigen::Vector4d wheel_reactions(const VehicleConfig& cfg, const VehicleState& s,
                                const ControlInput& u) {
  if (!s.finite() || !std::isfinite(u.F_l) || !std::isfinite(u.F_r))
    raise(ErrorCode::invalid_state, "wheel_reactions: non-finite input");
  const double half_track = cfg.T / 2.0;
  const double spring_left = cfg.K * (cfg.Z0 - (s.Z + half_track * s.theta_X));
  const double spring_right = cfg.K * (cfg.Z0 - (s.Z - half_track * s.theta_X));
  const double damper_left = cfg.C * (s.Z_dot + half_track * s.theta_X_dot);
  const double damper_right = cfg.C * (s.Z_dot - half_track * s.theta_X_dot);
  const double front = cfg.front_static_load();
  const double rear = cfg.rear_static_load();
  Eigen::Vector4d F_Z;
  F_Z[0] = u.F_l + front + spring_left - damper_left;
  F_Z[1] = u.F_r + front + spring_right - damper_right;
  F_Z[2] = u.F_l + rear + spring_left - damper_left;
  F_Z[3] = u.F_r + rear + spring_right - damper_right;
  return F_Z;
}

double slip_angle_deg(const VehicleConfig& cfg, const VehicleState& s, double delta_rad,
                      int wheel) {
  const double r_X = cfg.r_X(wheel);
  const double r_Y = cfg.r_Y(wheel);
  const double cz = std::cos(s.theta_Z);
  const double sz = std::sin(s.theta_Z);
  const double num = s.X_dot * sz - s.Y_dot * cz - r_X * s.theta_Z_dot;
  const double den = s.X_dot * cz + s.Y_dot * sz - r_Y * s.theta_Z_dot;
  if (std::abs(den) < cfg.eps_speed)
    raise(ErrorCode::degenerate_speed,
          "slip angle undefined at wheel " + std::to_string(wheel));
  return (180.0 / M_PI) * (-delta_rad - std::atan(num / den));
}

namespace {

// Magic-formula chain for positive load; alpha in degrees, load in N.
double magic_formula(const TireConstants& tc, double F_Z, double alpha_deg) {
  const double Fp = F_Z / 1000.0;
  const double D = tc.a1 * Fp * Fp + tc.a2 * Fp;
  if (std::abs(D) < 1e-12)
    raise(ErrorCode::tire_singularity, "peak factor D vanished at positive load");
  const double B = tc.a3 * std::sin(tc.a4 * std::atan(tc.a5 * Fp)) / (tc.C_T * D);
  const double E = tc.a6 * Fp * Fp + tc.a7 * Fp + tc.a8;
  const double shifted = alpha_deg + tc.delta_S_h;
  const double phi = (1.0 - E) * shifted + (E / B) * std::atan(B * shifted);
  return D * std::sin(tc.C_T * std::atan(B * phi));
}

double sigmoid(double x) {
  const double t = std::clamp(x, -40.0, 40.0);
  return 1.0 / (1.0 + std::exp(-t));
}

double softplus(double x, double w) {
  const double t = x / w;
  if (t > 40.0) return x;
  if (t < -40.0) return w * std::exp(t);
  return w * std::log1p(std::exp(t));
}

}  // namespace

double tire_lateral_force(const VehicleConfig& cfg, double F_Z, double alpha_deg) {
  if (F_Z <= 0.0) return 0.0;
  return magic_formula(cfg.tire, F_Z, alpha_deg);
}

double tire_lateral_force_smoothed(const VehicleConfig& cfg, double F_Z, double alpha_deg,
                                   double width) {
  if (width <= 0.0) return tire_lateral_force(cfg, F_Z, alpha_deg);
  // sigmoid gate on the load, formula evaluated at a softplus-positive load
  const double gate = sigmoid(F_Z / width);
  if (gate < 1e-16) return 0.0;
  const double load = std::max(softplus(F_Z, width), 1e-6);
  return gate * magic_formula(cfg.tire, load, alpha_deg);
}

WheelLoads wheel_loads(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                       double delta_rad, double tire_smoothing_width) {
  WheelLoads out;
  out.F_Z = wheel_reactions(cfg, s, u);
  for (int wheel = 1; wheel <= 4; ++wheel) {
    const double delta = wheel <= 2 ? delta_rad : 0.0;
    const double alpha = slip_angle_deg(cfg, s, delta, wheel);
    out.F_Y[wheel - 1] =
        tire_lateral_force_smoothed(cfg, out.F_Z[wheel - 1], alpha, tire_smoothing_width);
  }
  return out;
}

// --- dynamics ---------------------------------------------------------------

Vec10 dynamics_rhs(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                   double delta_rad, double tire_smoothing_width) {
  if (!s.finite() || !std::isfinite(u.F_l) || !std::isfinite(u.F_r))
    raise(ErrorCode::invalid_state, "dynamics_rhs: non-finite input");
  if (std::abs(s.theta_X) >= M_PI / 2.0)
    raise(ErrorCode::roll_singularity, "dynamics_rhs: |theta_X| >= pi/2");

  const WheelLoads loads = wheel_loads(cfg, s, u, delta_rad, tire_smoothing_width);
  const double cz = std::cos(s.theta_Z);
  const double sz = std::sin(s.theta_Z);

  double sum_X = 0.0, sum_Y = 0.0, sum_moment = 0.0;
  for (int wheel = 1; wheel <= 4; ++wheel) {
    const double delta = wheel <= 2 ? delta_rad : 0.0;
    const double F_Y = loads.F_Y[wheel - 1];
    sum_X += cfg.mu * F_Y * std::sin(s.theta_Z + delta);
    sum_Y += -cfg.mu * F_Y * std::cos(s.theta_Z + delta);
    sum_moment += -cfg.mu * F_Y * std::cos(delta) * cfg.r_X(wheel) -
                  cfg.mu * F_Y * std::sin(delta) * cfg.r_Y(wheel);
  }
  const double sum_Z = loads.F_Z.sum();

  const double X_dd = sum_X / cfg.M;
  const double Y_dd = sum_Y / cfg.M;
  const double theta_Z_dd = sum_moment / cfg.I_ZZ;
  const double Z_dd = (sum_Z - cfg.M * cfg.g) / cfg.M;
  const double theta_X_dd =
      ((loads.F_Z[0] - loads.F_Z[1] + loads.F_Z[2] - loads.F_Z[3]) * cfg.T / 2.0 +
       sum_Z * s.Z * std::tan(s.theta_X) + cfg.M * s.Z * (Y_dd * cz - X_dd * sz)) /
      cfg.I_XX;

  Vec10 d;
  d << s.X_dot, s.Y_dot, s.Z_dot, s.theta_X_dot, s.theta_Z_dot, X_dd, Y_dd, Z_dd, theta_X_dd,
      theta_Z_dd;
  return d;
}

Vec10 dynamics_rhs(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                   const SteeringProfile& steer, double t, double tire_smoothing_width) {
  return dynamics_rhs(cfg, s, u, steer.angle_rad(t), tire_smoothing_width);
}

ReferenceTrajectory reference_trajectory(const VehicleConfig& cfg, const SteeringProfile& steer,
                                         const std::vector<double>& grid, double forward_speed) {
  if (grid.size() < 2)
    raise(ErrorCode::invalid_parameter, "reference grid needs at least two points");

  // Planar state (X, Y, theta_Z, Xd, Yd, theta_Zd); loads frozen at static shares.
  const Eigen::Vector4d F_Z(cfg.front_static_load(), cfg.front_static_load(),
                            cfg.rear_static_load(), cfg.rear_static_load());
  auto rhs = [&](const Vec& p, double t) -> Vec {
    VehicleState s;
    s.X = p[0];
    s.Y = p[1];
    s.Z = cfg.Z0;
    s.theta_Z = p[2];
    s.X_dot = p[3];
    s.Y_dot = p[4];
    s.theta_Z_dot = p[5];
    const double delta_front = steer.angle_rad(t);
    const double cz = std::cos(s.theta_Z);
    const double sz = std::sin(s.theta_Z);
    double sum_X = 0.0, sum_Y = 0.0, sum_moment = 0.0;
    for (int wheel = 1; wheel <= 4; ++wheel) {
      const double delta = wheel <= 2 ? delta_front : 0.0;
      const double alpha = slip_angle_deg(cfg, s, delta, wheel);
      const double F_Y = tire_lateral_force(cfg, F_Z[wheel - 1], alpha);
      sum_X += cfg.mu * F_Y * std::sin(s.theta_Z + delta);
      sum_Y += -cfg.mu * F_Y * std::cos(s.theta_Z + delta);
      sum_moment += -cfg.mu * F_Y * std::cos(delta) * cfg.r_X(wheel) -
                    cfg.mu * F_Y * std::sin(delta) * cfg.r_Y(wheel);
    }
    Vec d(6);
    d << s.X_dot, s.Y_dot, s.theta_Z_dot, sum_X / cfg.M, sum_Y / cfg.M, sum_moment / cfg.I_ZZ;
    return d;
  };

  Vec p0(6);
  p0 << 0.0, 0.0, 0.0, forward_speed, 0.0, 0.0;
  const std::vector<Vec> states = rk45_integrate(rhs, p0, grid);

  ReferenceTrajectory out;
  out.t = grid;
  for (const Vec& p : states) {
    out.X.push_back(p[0]);
    out.Y.push_back(p[1]);
    out.theta_Z.push_back(p[2]);
    out.X_dot.push_back(p[3]);
    out.Y_dot.push_back(p[4]);
    out.theta_Z_dot.push_back(p[5]);
  }
  return out;
}

Eigen::Matrix<double, 8, 1> path_constraint_residuals(const VehicleConfig& cfg,
                                                      const VehicleState& s,
                                                      const ControlInput& u) {
  const double left = s.Z + cfg.T / 2.0 * s.theta_X;
  const double right = s.Z - cfg.T / 2.0 * s.theta_X;
  Eigen::Matrix<double, 8, 1> r;
  r << cfg.Z_min - left, left - cfg.Z_max, cfg.Z_min - right, right - cfg.Z_max,
      u.F_l - cfg.F_max, -u.F_l - cfg.F_max, u.F_r - cfg.F_max, -u.F_r - cfg.F_max;
  return r;
}

BranchValues antiroll_branch_functions(const VehicleConfig& cfg, const VehicleState& s,
                                       const ControlInput& u, const Vec10& rhs) {
  if (s.Z <= cfg.eps_height)
    raise(ErrorCode::geometric_singularity, "branch functions undefined at Z <= eps");
  const Eigen::Vector4d F_Z = wheel_reactions(cfg, s, u);
  const double lat = (rhs[6] * std::cos(s.theta_Z) - rhs[5] * std::sin(s.theta_Z)) / cfg.g;
  const double geo = cfg.T / (2.0 * s.Z);
  BranchValues b;
  b.f1_left = -F_Z[0] - F_Z[2];
  b.f2_left = lat - geo;
  b.f1_right = -F_Z[1] - F_Z[3];
  b.f2_right = -lat - geo;
  return b;
}

Eigen::Vector2d conservative_constraints(const VehicleConfig& cfg, const VehicleState& s,
                                         const ControlInput& u) {
  const Eigen::Vector4d F_Z = wheel_reactions(cfg, s, u);
  return {-F_Z[0] - F_Z[2], -F_Z[1] - F_Z[3]};
}

}  // namespace antiroll
