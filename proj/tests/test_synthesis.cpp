#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "antiroll/synthesis.hpp"

using namespace antiroll;

namespace {

ScenarioConfig small_scenario(ConstraintMode cm, int N) {
  ScenarioConfig sc;
  sc.constraints = cm;
  sc.grid = Grid{0.0, 1.5, N};
  sc.alpha = alpha_params(0.5);
  return sc;
}

TrajectorySolution synthetic_trajectory() {
  TrajectorySolution sol;
  for (int i = 0; i <= 20; ++i) {
    const double t = i * 0.05;
    VehicleState s;
    s.Z = 0.7 + 0.01 * std::sin(t);
    s.theta_X = 0.1 * std::sin(2.0 * t);
    s.theta_X_dot = 0.2 * std::cos(2.0 * t);
    s.theta_Z_dot = 0.5 * std::sin(3.0 * t);
    s.Z_dot = 0.01 * std::cos(t);
    sol.t.push_back(t);
    sol.states.push_back(s);
  }
  return sol;
}

}  // namespace

TEST_CASE("phi vector round trip") {
  PhiCoefficients phi{-916.5607, -2102.4, -4799.4, 3.8244e-4, -0.0078};
  const Vec v = phi.to_vector();
  const PhiCoefficients back = PhiCoefficients::from_vector(v);
  CHECK(back.phi3 == phi.phi3);
  CHECK_THROWS_AS((void)PhiCoefficients::from_vector(Vec::Zero(3)), Error);
}

TEST_CASE("dominant term ranking") {
  const TrajectorySolution traj = synthetic_trajectory();
  SUBCASE("single nonzero gain dominates") {
    const DominanceReport rep = dominant_term({1.0, 0.0, 0.0, 0.0, 0.0}, traj, 0.7);
    CHECK(rep.ranked.front().term == 0);
    CHECK_FALSE(rep.tie);
  }
  SUBCASE("all-zero gains tie") {
    const DominanceReport rep = dominant_term({0.0, 0.0, 0.0, 0.0, 0.0}, traj, 0.7);
    CHECK(rep.tie);
    for (const auto& d : rep.ranked) CHECK(d.rms == 0.0);
  }
  SUBCASE("yaw-rate gain of realistic size dominates") {
    const DominanceReport rep =
        dominant_term({-900.0, -2000.0, -4800.0, 3.8e-4, -0.008}, traj, 0.7);
    CHECK(rep.ranked.front().term == 2);
    CHECK(rep.ranked.front().rms > 0.0);
  }
}

TEST_CASE("unexcited scenario is flagged unidentifiable") {
  const VehicleConfig cfg;
  const SteeringProfile straight = SteeringProfile::straight(0.0, 1.5);
  SolverOptions opts;
  opts.max_iter = 60;
  const Phi3Result r = resynthesize_phi3(cfg, small_scenario(ConstraintMode::disjunctive, 15),
                                         straight, 0.0, opts);
  CHECK(r.report.status == SolveStatus::converged);
  CHECK(r.solution.objective < 1e-8);
  CHECK_FALSE(r.identifiable);
}

TEST_CASE("phi3 synthesis on a mild maneuver") {
  const VehicleConfig cfg;
  SteeringProfile::FishhookParams fh;
  fh.peak_deg = 3.0;
  fh.reverse_deg = 3.0;
  const SteeringProfile steer = SteeringProfile::fishhook(fh, 0.0, 1.5);
  SolverOptions opts;
  opts.max_iter = 300;
  const Phi3Result r = resynthesize_phi3(cfg, small_scenario(ConstraintMode::conservative, 31),
                                         steer, 0.0, opts);
  CHECK(r.report.status == SolveStatus::converged);
  CHECK(r.identifiable);
  CHECK(std::isfinite(r.phi3));

  SUBCASE("reconstruction: recorded force equals the law on its own states") {
    for (std::size_t n = 0; n < r.solution.states.size(); ++n) {
      CHECK(std::abs(r.solution.F_l[n] - r.phi3 * r.solution.states[n].theta_Z_dot) < 1e-8);
      CHECK(r.solution.F_r[n] == doctest::Approx(-r.solution.F_l[n]));
    }
  }
}
