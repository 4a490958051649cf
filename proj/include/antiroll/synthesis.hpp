#pragma once

#include <array>
#include <string>
#include <vector>

#include "antiroll/transcription.hpp"

namespace antiroll {

/// Gains of the sensor-feedback force law
///   F_l = phi1*theta_X + phi2*theta_Xd + phi3*theta_Zd + phi4*(Z - Z0) + phi5*Zd
/// with F_r = -F_l.
struct PhiCoefficients {
  double phi1 = 0, phi2 = 0, phi3 = 0, phi4 = 0, phi5 = 0;

  Vec to_vector() const;
  static PhiCoefficients from_vector(const Eigen::Ref<const Vec>& v);
};

inline constexpr std::array<const char*, 5> kPhiTermNames = {
    "theta_X", "theta_X_dot", "theta_Z_dot", "Z_offset", "Z_dot"};

struct SynthesisResult {
  PhiCoefficients phi;
  TrajectorySolution solution;
  SolveReport report;
  bool identifiable = true;  // false when the scenario never excites theta_Zd
};

/// Solves the transcription with the five phi gains as the only controls.
SynthesisResult synthesize(const VehicleConfig& cfg, ScenarioConfig scenario,
                           const SteeringProfile& steer, const PhiCoefficients& phi_guess = {},
                           const SolverOptions& solver = {});

struct TermDominance {
  int term = 0;  // index into kPhiTermNames
  double rms = 0.0;
  double max_abs = 0.0;
};

/// Per-term force contributions over the trajectory, ranked by RMS
/// (descending). `tie` is set when leading terms are indistinguishable.
struct DominanceReport {
  std::vector<TermDominance> ranked;
  bool tie = false;
};

DominanceReport dominant_term(const PhiCoefficients& phi, const TrajectorySolution& traj,
                              double Z0);

struct Phi3Result {
  double phi3 = 0.0;
  TrajectorySolution solution;
  SolveReport report;
  bool identifiable = true;
};

/// Re-solves with the single yaw-rate gain F_l = phi3 * theta_Zd.
Phi3Result resynthesize_phi3(const VehicleConfig& cfg, ScenarioConfig scenario,
                             const SteeringProfile& steer, double phi3_guess = 0.0,
                             const SolverOptions& solver = {});

}  // namespace antiroll
