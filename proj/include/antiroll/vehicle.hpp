#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "antiroll/types.hpp"

namespace antiroll {

struct TireConstants {
  double C_T = 1.30;
  double delta_S_h = 0.0;  // horizontal shift, degrees
  double a1 = -22.1;
  double a2 = 1011.0;
  double a3 = 1078.0;
  double a4 = 1.82;
  double a5 = 0.208;
  double a6 = 0.0;
  double a7 = -0.354;
  double a8 = 0.707;
};

/// Physical, tire, and limit parameters of the roll model. Defaults are the
/// stock mid-size-vehicle data set used throughout the test scenarios.
struct VehicleConfig {
  double M = 1400.0;     // sprung mass [kg]
  double T = 1.5;        // track width [m]
  double K = 30000.0;    // suspension stiffness [kg/s^2]
  double C = 4000.0;     // suspension damping [kg/s]
  double I_XX = 1300.0;  // roll inertia [kg m^2]
  double I_ZZ = 4000.0;  // yaw inertia [kg m^2]
  double a = 1.4;        // CG to front axle [m]
  double b = 1.5;        // CG to rear axle [m]
  double g = 9.8;        // gravity [m/s^2]
  double mu = 1.3;       // tire/road friction
  double Z0 = 0.7;       // nominal CG height [m]
  double Z_min = 0.5;    // suspension mount travel limits [m]
  double Z_max = 0.9;
  double F_max = 10000.0;  // actuator force limit [N]
  TireConstants tire;

  double eps_speed = 1e-6;   // slip-angle denominator guard [m/s]
  double eps_height = 1e-3;  // minimum Z for the T/(2Z) branch term [m]

  // Wheel layout: 1 front-left, 2 front-right, 3 rear-left, 4 rear-right.
  double r_X(int wheel) const { return wheel <= 2 ? a : -b; }
  double r_Y(int wheel) const { return (wheel == 1 || wheel == 3) ? T / 2.0 : -T / 2.0; }

  double front_static_load() const { return b / (2.0 * (a + b)) * M * g; }
  double rear_static_load() const { return a / (2.0 * (a + b)) * M * g; }

  /// Throws invalid_parameter when a positivity/ordering invariant is broken.
  void validate() const;
};

/// First-order state, canonical ordering
/// [X, Y, Z, theta_X, theta_Z, Xd, Yd, Zd, theta_Xd, theta_Zd].
struct VehicleState {
  double X = 0, Y = 0, Z = 0, theta_X = 0, theta_Z = 0;
  double X_dot = 0, Y_dot = 0, Z_dot = 0, theta_X_dot = 0, theta_Z_dot = 0;

  static constexpr int kDim = 10;

  Vec10 to_vector() const;
  static VehicleState from_vector(const Eigen::Ref<const Vec10>& v);
  bool finite() const;
};

/// Stock initial condition: straight motion at `forward_speed`, suspension at rest.
VehicleState initial_state(const VehicleConfig& cfg, double forward_speed = 200.0 / 9.0);

struct ControlInput {
  double F_l = 0.0;  // left actuator force [N], wheels 1 and 3
  double F_r = 0.0;  // right actuator force [N], wheels 2 and 4
};

/// Front-wheel steering angle over time. Stored as piecewise-linear
/// breakpoints in (seconds, degrees); rear wheels are always unsteered.
class SteeringProfile {
 public:
  struct FishhookParams {
    double ramp_start = 0.1;     // [s]
    double ramp_time = 0.25;     // [s] 0 -> peak
    double peak_deg = 8.0;       // first steer peak
    double dwell = 0.25;         // [s] hold at peak
    double reversal_time = 0.25; // [s] peak -> -reverse
    double reverse_deg = 8.0;    // countersteer magnitude
  };

  SteeringProfile() = default;

  static SteeringProfile straight(double t0, double t_f);
  static SteeringProfile from_breakpoints(std::vector<std::pair<double, double>> pts);
  static SteeringProfile fishhook(const FishhookParams& p, double t0, double t_f);

  double angle_deg(double t) const;
  double angle_rad(double t) const;

  const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }

 private:
  std::vector<std::pair<double, double>> pts_;  // strictly increasing times
};

// --- wheel forces -----------------------------------------------------------

/// Vertical reactions F_Z1..F_Z4 [N]: static axle share + spring + damper +
/// actuator force (F_l on wheels 1,3; F_r on wheels 2,4).
Eigen::Vector4d wheel_reactions(const VehicleConfig& cfg, const VehicleState& s,
                                const ControlInput& u);

/// Tire slip angle in degrees for one wheel; `delta_rad` is that wheel's steer angle.
double slip_angle_deg(const VehicleConfig& cfg, const VehicleState& s, double delta_rad,
                      int wheel);

/// Lateral tire force [N]; exactly zero for non-positive wheel load.
double tire_lateral_force(const VehicleConfig& cfg, double F_Z, double alpha_deg);

/// Variant with the load cutoff replaced by a sigmoid of width `width` [N],
/// used by derivative-based optimization; width <= 0 falls back to the exact form.
double tire_lateral_force_smoothed(const VehicleConfig& cfg, double F_Z, double alpha_deg,
                                   double width);

struct WheelLoads {
  Eigen::Vector4d F_Z;
  Eigen::Vector4d F_Y;
};

/// All four vertical reactions and lateral tire forces at one state.
WheelLoads wheel_loads(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                       double delta_rad, double tire_smoothing_width = 0.0);

// --- dynamics ---------------------------------------------------------------

/// Time derivative of the 10-component state.
/// `tire_smoothing_width` > 0 selects the smoothed tire cutoff.
Vec10 dynamics_rhs(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                   double delta_rad, double tire_smoothing_width = 0.0);

Vec10 dynamics_rhs(const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
                   const SteeringProfile& steer, double t, double tire_smoothing_width = 0.0);

/// Planar reference path: the yaw/translation subsystem integrated with the
/// suspension frozen (Z = Z0, theta_X = 0, rates zero) and zero actuator forces.
struct ReferenceTrajectory {
  std::vector<double> t;
  std::vector<double> X, Y, theta_Z;
  std::vector<double> X_dot, Y_dot, theta_Z_dot;

  std::size_t size() const { return t.size(); }
};

ReferenceTrajectory reference_trajectory(const VehicleConfig& cfg, const SteeringProfile& steer,
                                         const std::vector<double>& grid,
                                         double forward_speed = 200.0 / 9.0);

// --- path constraints -------------------------------------------------------

/// Travel and force limit residuals, <=0 feasible:
/// [Zmin-(Z+T/2 thX), (Z+T/2 thX)-Zmax, Zmin-(Z-T/2 thX), (Z-T/2 thX)-Zmax,
///  F_l-Fmax, -F_l-Fmax, F_r-Fmax, -F_r-Fmax].
Eigen::Matrix<double, 8, 1> path_constraint_residuals(const VehicleConfig& cfg,
                                                      const VehicleState& s,
                                                      const ControlInput& u);

struct BranchValues {
  double f1_left = 0;   // -F_Z1 - F_Z3            [N]
  double f2_left = 0;   // a_lat/g - T/(2Z)        [-]
  double f1_right = 0;  // -F_Z2 - F_Z4            [N]
  double f2_right = 0;  // -a_lat/g - T/(2Z)       [-]
};

/// Branch functions of the two anti-roll disjunctions; `rhs` supplies the
/// planar accelerations (slots 5 and 6).
BranchValues antiroll_branch_functions(const VehicleConfig& cfg, const VehicleState& s,
                                       const ControlInput& u, const Vec10& rhs);

/// Conjunctive no-lift-off residuals (-F_Z1-F_Z3, -F_Z2-F_Z4), <=0 feasible.
Eigen::Vector2d conservative_constraints(const VehicleConfig& cfg, const VehicleState& s,
                                         const ControlInput& u);

}  // namespace antiroll
