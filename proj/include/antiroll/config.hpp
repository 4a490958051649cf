#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "antiroll/nlp.hpp"
#include "antiroll/transcription.hpp"
#include "antiroll/vehicle.hpp"

namespace antiroll {

using json = nlohmann::json;

struct SimulationSection {
  double t0 = 0.0;
  double t_f = 1.5;
  int N = 151;
  double rho = 0.5;
  double forward_speed = 200.0 / 9.0;
};

struct SteeringSection {
  std::string profile = "fishhook";  // straight | fishhook | fishhook_fast |
                                     // fishhook_severe | double_lane_change | breakpoints
  SteeringProfile::FishhookParams fishhook;
  std::vector<std::pair<double, double>> breakpoints;  // (s, deg) for profile "breakpoints"
  double scale = 1.0;                                  // multiplies all angles
};

struct ScenarioSection {
  ConstraintMode constraints = ConstraintMode::disjunctive;
  ForceMode forces = ForceMode::free_forces;
  InitialGuessSpec::Kind guess = InitialGuessSpec::Kind::zero;
  double guess_force = 0.0;
  double tire_smoothing_width = 50.0;
  double phi_bound = 1e5;
  double theta_cap = 0.35;
};

struct SolverSection {
  double kkt_tol = 1e-4;
  double feas_tol = 1e-6;
  int max_iter = 500;
};

struct ControlSection {
  std::optional<double> phi3;  // gain for `validate`
};

struct SweepSection {
  std::string parameter = "peak_deg";  // peak_deg | reverse_deg | ramp_time |
                                       // reversal_time | scale
  std::vector<double> values;
  int parallelism = 1;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "report", "plot"};
};

/// One config file = one run. Unknown keys are rejected with their JSON path.
struct RunConfig {
  VehicleConfig vehicle;
  SimulationSection simulation;
  SteeringSection steering;
  ScenarioSection scenario;
  SolverSection solver;
  ControlSection control;
  std::optional<SweepSection> sweep;
  OutputSection output;
  long seed = 0;

  static RunConfig from_json(const json& j);
  static RunConfig from_file(const std::filesystem::path& path);

  /// Full echo including defaults, embedded in every report.
  json echo() const;

  Grid make_grid() const;
  SteeringProfile make_steering() const;
  ScenarioConfig make_scenario() const;
  SolverOptions make_solver_options() const;

  void validate() const;  // throws config_error
};

}  // namespace antiroll
