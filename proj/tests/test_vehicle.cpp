#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "antiroll/integrators.hpp"
#include "antiroll/vehicle.hpp"

using namespace antiroll;

namespace {

VehicleConfig stock() { return VehicleConfig{}; }

VehicleState equilibrium(const VehicleConfig& cfg) { return initial_state(cfg); }

// Straight-line re-evaluation of the magic-formula chain, independent of the
// library implementation.
double tire_chain_oracle(const TireConstants& tc, double F_Z, double alpha_deg) {
  const double Fp = F_Z / 1000.0;
  const double D = tc.a1 * Fp * Fp + tc.a2 * Fp;
  const double B = tc.a3 * std::sin(tc.a4 * std::atan(tc.a5 * Fp)) / (tc.C_T * D);
  const double E = tc.a6 * Fp * Fp + tc.a7 * Fp + tc.a8;
  const double sh = alpha_deg + tc.delta_S_h;
  const double phi = (1.0 - E) * sh + (E / B) * std::atan(B * sh);
  return D * std::sin(tc.C_T * std::atan(B * phi));
}

}  // namespace

TEST_CASE("wheel reactions: static axle shares") {
  const VehicleConfig cfg = stock();
  const Eigen::Vector4d F_Z = wheel_reactions(cfg, equilibrium(cfg), {});
  CHECK(F_Z[0] == doctest::Approx(3548.2758620689655).epsilon(1e-12));
  CHECK(F_Z[1] == doctest::Approx(3548.2758620689655).epsilon(1e-12));
  CHECK(F_Z[2] == doctest::Approx(3311.7241379310345).epsilon(1e-12));
  CHECK(F_Z[3] == doctest::Approx(3311.7241379310345).epsilon(1e-12));
  // independent: b Mg / (2(a+b)) and a Mg / (2(a+b))
  CHECK(std::abs(F_Z[0] - cfg.b * cfg.M * cfg.g / (2.0 * (cfg.a + cfg.b))) < 1e-9);
  CHECK(std::abs(F_Z[2] - cfg.a * cfg.M * cfg.g / (2.0 * (cfg.a + cfg.b))) < 1e-9);
  CHECK(std::abs(F_Z.sum() - cfg.M * cfg.g) < 1e-9);
}

TEST_CASE("wheel reactions: linear in the actuator forces") {
  const VehicleConfig cfg = stock();
  const Eigen::Vector4d base = wheel_reactions(cfg, equilibrium(cfg), {});
  const Eigen::Vector4d loaded = wheel_reactions(cfg, equilibrium(cfg), {100.0, -100.0});
  CHECK(loaded[0] - base[0] == doctest::Approx(100.0));
  CHECK(loaded[2] - base[2] == doctest::Approx(100.0));
  CHECK(loaded[1] - base[1] == doctest::Approx(-100.0));
  CHECK(loaded[3] - base[3] == doctest::Approx(-100.0));
}

TEST_CASE("wheel reactions: spring term") {
  const VehicleConfig cfg = stock();
  VehicleState s = equilibrium(cfg);
  s.Z = cfg.Z0 + 0.01;
  const Eigen::Vector4d base = wheel_reactions(cfg, equilibrium(cfg), {});
  const Eigen::Vector4d lifted = wheel_reactions(cfg, s, {});
  for (int i = 0; i < 4; ++i) CHECK(lifted[i] - base[i] == doctest::Approx(-300.0));
}

TEST_CASE("wheel reactions: rejects non-finite input") {
  const VehicleConfig cfg = stock();
  VehicleState s = equilibrium(cfg);
  s.Z_dot = std::nan("");
  CHECK_THROWS_WITH_AS(wheel_reactions(cfg, s, {}), doctest::Contains("invalid state"), Error);
}

TEST_CASE("slip angle") {
  const VehicleConfig cfg = stock();
  const VehicleState s = equilibrium(cfg);
  SUBCASE("zero for straight rolling") {
    for (int wheel = 1; wheel <= 4; ++wheel) CHECK(slip_angle_deg(cfg, s, 0.0, wheel) == 0.0);
  }
  SUBCASE("pure steer offset") {
    CHECK(slip_angle_deg(cfg, s, 0.02, 1) ==
          doctest::Approx(-1.1459155902616464).epsilon(1e-12));
    CHECK(std::abs(slip_angle_deg(cfg, s, 0.02, 1) - (-(180.0 / M_PI) * 0.02)) < 1e-9);
  }
  SUBCASE("degenerate speed") {
    VehicleState stopped = s;
    stopped.X_dot = 0.0;
    CHECK_THROWS_AS((void)slip_angle_deg(cfg, stopped, 0.0, 1), Error);
    try {
      (void)slip_angle_deg(cfg, stopped, 0.0, 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_speed);
    }
  }
}

TEST_CASE("tire lateral force") {
  const VehicleConfig cfg = stock();
  SUBCASE("cutoff below zero load") {
    CHECK(tire_lateral_force(cfg, -10.0, 3.0) == 0.0);
    CHECK(tire_lateral_force(cfg, 0.0, -7.0) == 0.0);
  }
  SUBCASE("zero at zero slip") { CHECK(tire_lateral_force(cfg, 3548.28, 0.0) == 0.0); }
  SUBCASE("frozen value at the front static load") {
    const double fy = tire_lateral_force(cfg, 3548.28, 2.0);
    CHECK(fy == doctest::Approx(1802.7136526544232).epsilon(1e-12));
    CHECK(std::abs(fy - tire_chain_oracle(cfg.tire, 3548.28, 2.0)) < 1e-9);
  }
  SUBCASE("cutoff holds for any slip") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> alpha(-30.0, 30.0);
    std::uniform_real_distribution<double> load(-5000.0, 0.0);
    for (int i = 0; i < 1000; ++i) CHECK(tire_lateral_force(cfg, load(rng), alpha(rng)) == 0.0);
  }
  SUBCASE("smoothed variant matches away from the switch") {
    const double exact = tire_lateral_force(cfg, 3311.72, -4.0);
    const double smooth = tire_lateral_force_smoothed(cfg, 3311.72, -4.0, 50.0);
    CHECK(smooth == doctest::Approx(exact).epsilon(1e-12));
    CHECK(tire_lateral_force_smoothed(cfg, -2000.0, 5.0, 50.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("dynamics: equilibrium fixed point") {
  const VehicleConfig cfg = stock();
  const Vec10 d = dynamics_rhs(cfg, equilibrium(cfg), {}, 0.0);
  CHECK(d[0] == doctest::Approx(200.0 / 9.0).epsilon(1e-14));
  for (int k = 1; k < 5; ++k) CHECK(d[k] == 0.0);
  for (int k = 5; k < 10; ++k) CHECK(std::abs(d[k]) < 1e-12);
}

TEST_CASE("dynamics: heave from a spring offset") {
  const VehicleConfig cfg = stock();
  VehicleState s = equilibrium(cfg);
  s.Z = cfg.Z0 + 0.01;
  const Vec10 d = dynamics_rhs(cfg, s, {}, 0.0);
  CHECK(d[7] == doctest::Approx(-4.0 * 300.0 / 1400.0).epsilon(1e-12));
}

TEST_CASE("dynamics: roll moment from anti-symmetric forces") {
  const VehicleConfig cfg = stock();
  const Vec10 d = dynamics_rhs(cfg, equilibrium(cfg), {500.0, -500.0}, 0.0);
  CHECK(d[7] == doctest::Approx(0.0));  // forces cancel in heave
  CHECK(d[8] == doctest::Approx(2000.0 * 0.75 / 1300.0).epsilon(1e-12));
  CHECK(std::abs(d[8] - 1.1538461538461537) < 1e-9);
}

TEST_CASE("dynamics: roll singularity guard") {
  const VehicleConfig cfg = stock();
  VehicleState s = equilibrium(cfg);
  s.theta_X = M_PI / 2.0;
  try {
    (void)dynamics_rhs(cfg, s, {}, 0.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::roll_singularity);
  }
}

TEST_CASE("dynamics: independent straight-line spot check") {
  const VehicleConfig cfg = stock();
  VehicleState s;
  s.X = 3.0;
  s.Y = -0.5;
  s.Z = 0.72;
  s.theta_X = 0.04;
  s.theta_Z = 0.1;
  s.X_dot = 21.0;
  s.Y_dot = 1.2;
  s.Z_dot = -0.05;
  s.theta_X_dot = 0.2;
  s.theta_Z_dot = 0.35;
  const ControlInput u{800.0, -300.0};
  const double delta = 0.05;
  const Vec10 d = dynamics_rhs(cfg, s, u, delta);

  // independent evaluation, formula by formula
  const double half = cfg.T / 2.0;
  double F_Z[4], F_Y[4], del[4] = {delta, delta, 0.0, 0.0};
  const double rX[4] = {cfg.a, cfg.a, -cfg.b, -cfg.b};
  const double rY[4] = {half, -half, half, -half};
  for (int i = 0; i < 4; ++i) {
    const double stat =
        (i < 2 ? cfg.b : cfg.a) / (2.0 * (cfg.a + cfg.b)) * cfg.M * cfg.g;
    const double sgn = (i == 0 || i == 2) ? 1.0 : -1.0;
    const double force = (i == 0 || i == 2) ? u.F_l : u.F_r;
    F_Z[i] = force + stat + cfg.K * (cfg.Z0 - (s.Z + sgn * half * s.theta_X)) -
             cfg.C * (s.Z_dot + sgn * half * s.theta_X_dot);
    const double num = s.X_dot * std::sin(s.theta_Z) - s.Y_dot * std::cos(s.theta_Z) -
                       rX[i] * s.theta_Z_dot;
    const double den = s.X_dot * std::cos(s.theta_Z) + s.Y_dot * std::sin(s.theta_Z) -
                       rY[i] * s.theta_Z_dot;
    const double alpha = 180.0 / M_PI * (-del[i] - std::atan(num / den));
    F_Y[i] = F_Z[i] <= 0.0 ? 0.0 : tire_chain_oracle(cfg.tire, F_Z[i], alpha);
  }
  double sx = 0, sy = 0, sm = 0, sz = 0;
  for (int i = 0; i < 4; ++i) {
    sx += cfg.mu * F_Y[i] * std::sin(s.theta_Z + del[i]);
    sy += -cfg.mu * F_Y[i] * std::cos(s.theta_Z + del[i]);
    sm += -cfg.mu * F_Y[i] * std::cos(del[i]) * rX[i] - cfg.mu * F_Y[i] * std::sin(del[i]) * rY[i];
    sz += F_Z[i];
  }
  const double Xdd = sx / cfg.M;
  const double Ydd = sy / cfg.M;
  const double roll_dd =
      ((F_Z[0] - F_Z[1] + F_Z[2] - F_Z[3]) * half + sz * s.Z * std::tan(s.theta_X) +
       cfg.M * s.Z * (Ydd * std::cos(s.theta_Z) - Xdd * std::sin(s.theta_Z))) /
      cfg.I_XX;

  CHECK(std::abs(d[5] - Xdd) < 1e-9);
  CHECK(std::abs(d[6] - Ydd) < 1e-9);
  CHECK(std::abs(d[7] - (sz - cfg.M * cfg.g) / cfg.M) < 1e-9);
  CHECK(std::abs(d[8] - roll_dd) < 1e-9);
  CHECK(std::abs(d[9] - sm / cfg.I_ZZ) < 1e-9);
}

TEST_CASE("load conservation identity") {
  const VehicleConfig cfg = stock();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    VehicleState s = equilibrium(cfg);
    s.Z = cfg.Z0 + 0.2 * un(rng);
    s.Z_dot = 2.0 * un(rng);
    s.theta_X = 0.0;
    s.theta_X_dot = 3.0 * un(rng);
    const ControlInput u{5000.0 * un(rng), 5000.0 * un(rng)};
    const Eigen::Vector4d F_Z = wheel_reactions(cfg, s, u);
    const double expected = 2.0 * u.F_l + 2.0 * u.F_r + cfg.M * cfg.g +
                            4.0 * cfg.K * (cfg.Z0 - s.Z) - 4.0 * cfg.C * s.Z_dot;
    CHECK(std::abs(F_Z.sum() - expected) < 1e-8);
  }
}

TEST_CASE("anti-symmetry of the roll dynamics") {
  const VehicleConfig cfg = stock();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    VehicleState s = equilibrium(cfg);
    s.Z = cfg.Z0 + 0.1 * un(rng);
    s.Z_dot = un(rng);
    s.theta_X = 0.3 * un(rng);
    s.theta_X_dot = un(rng);
    const ControlInput u{4000.0 * un(rng), 4000.0 * un(rng)};

    VehicleState m = s;
    m.theta_X = -s.theta_X;
    m.theta_X_dot = -s.theta_X_dot;
    const ControlInput um{u.F_r, u.F_l};

    const Eigen::Vector4d F = wheel_reactions(cfg, s, u);
    const Eigen::Vector4d Fm = wheel_reactions(cfg, m, um);
    CHECK(F[0] == doctest::Approx(Fm[1]).epsilon(1e-12));
    CHECK(F[1] == doctest::Approx(Fm[0]).epsilon(1e-12));
    CHECK(F[2] == doctest::Approx(Fm[3]).epsilon(1e-12));
    CHECK(F[3] == doctest::Approx(Fm[2]).epsilon(1e-12));

    const Vec10 d = dynamics_rhs(cfg, s, u, 0.0);
    const Vec10 dm = dynamics_rhs(cfg, m, um, 0.0);
    CHECK(d[8] == doctest::Approx(-dm[8]).epsilon(1e-9));
  }
}

TEST_CASE("path constraint residuals") {
  const VehicleConfig cfg = stock();
  SUBCASE("nominal travel margins") {
    const auto r = path_constraint_residuals(cfg, equilibrium(cfg), {});
    for (int k = 0; k < 4; ++k) CHECK(r[k] == doctest::Approx(-0.2).epsilon(1e-12));
  }
  SUBCASE("force bound active") {
    const auto r = path_constraint_residuals(cfg, equilibrium(cfg), {cfg.F_max, 0.0});
    CHECK(r[4] == doctest::Approx(0.0));
    CHECK(r[5] == doctest::Approx(-2.0 * cfg.F_max));
  }
  SUBCASE("travel violation") {
    VehicleState s = equilibrium(cfg);
    s.theta_X = 0.6;
    const auto r = path_constraint_residuals(cfg, s, {});
    CHECK(r[1] == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("anti-roll branch functions") {
  const VehicleConfig cfg = stock();
  const VehicleState s = equilibrium(cfg);
  const Vec10 d = dynamics_rhs(cfg, s, {}, 0.0);
  const BranchValues bv = antiroll_branch_functions(cfg, s, {}, d);
  CHECK(bv.f1_left == doctest::Approx(-6860.0).epsilon(1e-12));
  CHECK(bv.f2_left == doctest::Approx(-0.75 / 0.7).epsilon(1e-12));
  CHECK(bv.f1_right == doctest::Approx(-6860.0).epsilon(1e-12));
  CHECK(bv.f2_right == doctest::Approx(-0.75 / 0.7).epsilon(1e-12));

  SUBCASE("matches the conservative pair by construction") {
    const Eigen::Vector2d cons = conservative_constraints(cfg, s, {});
    CHECK(bv.f1_left == cons[0]);
    CHECK(bv.f1_right == cons[1]);
  }
  SUBCASE("lifted side satisfied through the acceleration branch") {
    // synthetic: left wheels unloaded, lateral acceleration past the threshold
    Vec10 rhs = d;
    rhs[6] = 1.2 * cfg.g;  // Ydd with theta_Z = 0
    const BranchValues b2 = antiroll_branch_functions(cfg, s, {}, rhs);
    CHECK(b2.f2_left == doctest::Approx(1.2 - 0.75 / 0.7).epsilon(1e-12));
    CHECK(b2.f2_left > 0.0);
    CHECK(b2.f2_right < 0.0);
  }
  SUBCASE("geometric singularity") {
    VehicleState low = s;
    low.Z = 1e-4;
    try {
      (void)antiroll_branch_functions(cfg, low, {}, d);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::geometric_singularity);
    }
  }
}

TEST_CASE("conservative constraints") {
  const VehicleConfig cfg = stock();
  const Eigen::Vector2d c = conservative_constraints(cfg, equilibrium(cfg), {});
  CHECK(c[0] == doctest::Approx(-6860.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(-6860.0).epsilon(1e-12));
}

TEST_CASE("steering profiles") {
  SteeringProfile::FishhookParams p;
  const SteeringProfile fh = SteeringProfile::fishhook(p, 0.0, 1.5);
  CHECK(fh.angle_deg(0.0) == 0.0);
  CHECK(fh.angle_deg(p.ramp_start + p.ramp_time) == doctest::Approx(p.peak_deg));
  CHECK(fh.angle_deg(1.5) == doctest::Approx(-p.reverse_deg));
  CHECK(fh.angle_rad(0.5) == doctest::Approx(fh.angle_deg(0.5) * M_PI / 180.0));

  CHECK_THROWS_AS(SteeringProfile::from_breakpoints({{0.0, 1.0}}), Error);
  CHECK_THROWS_AS(SteeringProfile::from_breakpoints({{0.5, 1.0}, {0.5, 2.0}}), Error);
}

TEST_CASE("reference trajectory") {
  const VehicleConfig cfg = stock();
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(1.5 * i / 30.0);

  SUBCASE("straight line under zero steer") {
    const auto ref = reference_trajectory(cfg, SteeringProfile::straight(0.0, 1.5), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(ref.X[i] - 200.0 / 9.0 * grid[i]) < 1e-9);
      CHECK(std::abs(ref.Y[i]) < 1e-9);
    }
  }

  SUBCASE("fishhook path matches a fixed-step RK4 oracle") {
    const SteeringProfile steer = SteeringProfile::fishhook({}, 0.0, 1.5);
    const auto ref = reference_trajectory(cfg, steer, grid);

    // independent fixed-step RK4 at h = 1e-4 on the same planar model
    const Eigen::Vector4d F_Z(cfg.front_static_load(), cfg.front_static_load(),
                              cfg.rear_static_load(), cfg.rear_static_load());
    auto rhs = [&](const Eigen::Matrix<double, 6, 1>& p, double t) {
      VehicleState s;
      s.Z = cfg.Z0;
      s.X = p[0];
      s.Y = p[1];
      s.theta_Z = p[2];
      s.X_dot = p[3];
      s.Y_dot = p[4];
      s.theta_Z_dot = p[5];
      const double delta = steer.angle_rad(t);
      double sx = 0, sy = 0, sm = 0;
      for (int wheel = 1; wheel <= 4; ++wheel) {
        const double dl = wheel <= 2 ? delta : 0.0;
        const double alpha = slip_angle_deg(cfg, s, dl, wheel);
        const double fy = tire_lateral_force(cfg, F_Z[wheel - 1], alpha);
        sx += cfg.mu * fy * std::sin(s.theta_Z + dl);
        sy += -cfg.mu * fy * std::cos(s.theta_Z + dl);
        sm += -cfg.mu * fy * std::cos(dl) * cfg.r_X(wheel) -
              cfg.mu * fy * std::sin(dl) * cfg.r_Y(wheel);
      }
      Eigen::Matrix<double, 6, 1> d;
      d << p[3], p[4], p[5], sx / cfg.M, sy / cfg.M, sm / cfg.I_ZZ;
      return d;
    };

    Eigen::Matrix<double, 6, 1> p;
    p << 0, 0, 0, 200.0 / 9.0, 0, 0;
    const double h = 1e-4;
    std::size_t node = 0;
    double t = 0.0;
    double max_err = 0.0;
    for (int step = 0; step <= 15000; ++step) {
      if (node < grid.size() && std::abs(t - grid[node]) < h / 2) {
        max_err = std::max(max_err, std::abs(p[0] - ref.X[node]));
        max_err = std::max(max_err, std::abs(p[1] - ref.Y[node]));
        ++node;
      }
      if (step == 15000) break;
      const auto k1 = rhs(p, t);
      const auto k2 = rhs(p + 0.5 * h * k1, t + 0.5 * h);
      const auto k3 = rhs(p + 0.5 * h * k2, t + 0.5 * h);
      const auto k4 = rhs(p + h * k3, t + h);
      p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    CHECK(node == grid.size());
    CHECK(max_err < 1e-6);
    CHECK(std::abs(ref.Y.back()) > 0.1);  // the maneuver actually bends the path
  }

  SUBCASE("zero initial speed propagates the slip-angle error") {
    try {
      (void)reference_trajectory(cfg, SteeringProfile::straight(0.0, 1.5), grid, 0.0);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_speed);
    }
  }
}

TEST_CASE("config validation") {
  VehicleConfig cfg = stock();
  cfg.mu = 2.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = stock();
  cfg.Z_min = 0.8;
  cfg.Z_max = 0.75;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_NOTHROW(stock().validate());
}
