#include "antiroll/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace antiroll {

Vec PhiCoefficients::to_vector() const {
  Vec v(5);
  v << phi1, phi2, phi3, phi4, phi5;
  return v;
}

PhiCoefficients PhiCoefficients::from_vector(const Eigen::Ref<const Vec>& v) {
  if (v.size() != 5) raise(ErrorCode::dimension_mismatch, "phi vector must have 5 entries");
  return {v[0], v[1], v[2], v[3], v[4]};
}

namespace {

bool yaw_rate_excited(const TrajectorySolution& sol) {
  double peak = 0.0;
  for (const auto& s : sol.states) peak = std::max(peak, std::abs(s.theta_Z_dot));
  return peak > 1e-8;
}

}  // namespace

SynthesisResult synthesize(const VehicleConfig& cfg, ScenarioConfig scenario,
                           const SteeringProfile& steer, const PhiCoefficients& phi_guess,
                           const SolverOptions& solver) {
  scenario.forces = ForceMode::phi_parameterized;
  scenario.phi_guess = phi_guess.to_vector();
  const ReferenceTrajectory ref =
      reference_trajectory(cfg, steer, scenario.grid.times());
  const TranscribedProblem problem = TranscribedProblem::build(cfg, scenario, steer, ref);
  const SolveResult r = solve_nlp(problem.nlp(), problem.initial_guess(), solver);

  SynthesisResult out;
  out.report = r.report;
  out.solution = problem.extract(r.z, r.report);
  out.phi = PhiCoefficients::from_vector(out.solution.phi);
  out.identifiable = yaw_rate_excited(out.solution);
  return out;
}

DominanceReport dominant_term(const PhiCoefficients& phi, const TrajectorySolution& traj,
                              double Z0) {
  const Vec gains = phi.to_vector();
  const std::size_t n = traj.states.size();
  if (n == 0) raise(ErrorCode::invalid_parameter, "dominant_term: empty trajectory");

  DominanceReport rep;
  for (int term = 0; term < 5; ++term) {
    TermDominance d;
    d.term = term;
    double sum_sq = 0.0;
    for (const auto& s : traj.states) {
      double signal = 0.0;
      switch (term) {
        case 0: signal = s.theta_X; break;
        case 1: signal = s.theta_X_dot; break;
        case 2: signal = s.theta_Z_dot; break;
        case 3: signal = s.Z - Z0; break;
        case 4: signal = s.Z_dot; break;
      }
      const double value = gains[term] * signal;
      sum_sq += value * value;
      d.max_abs = std::max(d.max_abs, std::abs(value));
    }
    d.rms = std::sqrt(sum_sq / double(n));
    rep.ranked.push_back(d);
  }
  std::stable_sort(rep.ranked.begin(), rep.ranked.end(),
                   [](const TermDominance& a, const TermDominance& b) { return a.rms > b.rms; });
  const double lead = rep.ranked.front().rms;
  rep.tie = lead < 1e-12 || rep.ranked[1].rms > (1.0 - 1e-9) * lead;
  return rep;
}

Phi3Result resynthesize_phi3(const VehicleConfig& cfg, ScenarioConfig scenario,
                             const SteeringProfile& steer, double phi3_guess,
                             const SolverOptions& solver) {
  scenario.forces = ForceMode::phi3_only;
  scenario.phi_guess = Vec::Constant(1, phi3_guess);
  const ReferenceTrajectory ref =
      reference_trajectory(cfg, steer, scenario.grid.times());
  const TranscribedProblem problem = TranscribedProblem::build(cfg, scenario, steer, ref);
  const SolveResult r = solve_nlp(problem.nlp(), problem.initial_guess(), solver);

  Phi3Result out;
  out.report = r.report;
  out.solution = problem.extract(r.z, r.report);
  out.phi3 = out.solution.phi[0];
  out.identifiable = yaw_rate_excited(out.solution);
  return out;
}

}  // namespace antiroll
