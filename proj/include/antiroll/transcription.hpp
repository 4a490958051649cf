#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "antiroll/alpha_method.hpp"
#include "antiroll/nlp.hpp"
#include "antiroll/types.hpp"
#include "antiroll/vehicle.hpp"

namespace antiroll {

enum class ConstraintMode { disjunctive, conservative };
enum class ForceMode { free_forces, anti_symmetric, phi_parameterized, phi3_only };

const char* to_string(ConstraintMode m) noexcept;
const char* to_string(ForceMode m) noexcept;

/// Uniform time grid with N points and N-1 intervals.
struct Grid {
  double t0 = 0.0;
  double t_f = 1.5;
  int N = 151;

  double h() const { return (t_f - t0) / (N - 1); }
  std::vector<double> times() const;
  void validate() const;
};

struct InitialGuessSpec {
  enum class Kind { zero, constant, trajectory } kind = Kind::zero;
  double force_value = 0.0;  // for constant: F_l = v and F_r = v (free) or -v (anti-symmetric)
};

struct ScenarioConfig {
  ConstraintMode constraints = ConstraintMode::disjunctive;
  ForceMode forces = ForceMode::free_forces;
  InitialGuessSpec guess;
  Grid grid;
  AlphaParams alpha{0.5, 2.0 / 1.5 - 0.5, 1.0 / 2.25};
  double tire_smoothing_width = 50.0;  // [N]; 0 selects the exact cutoff
  double phi_bound = 1e5;
  Vec phi_guess;  // empty = zeros

  int num_phi() const {
    return forces == ForceMode::phi_parameterized ? 5
           : forces == ForceMode::phi3_only       ? 1
                                                  : 0;
  }
  bool has_force_vars() const {
    return forces == ForceMode::free_forces || forces == ForceMode::anti_symmetric;
  }
};

/// Natural-unit view of one decision vector.
struct DecisionVariables {
  std::vector<Vec10> x;  // states per node
  std::vector<Vec10> a;  // alpha-method auxiliaries per node
  std::vector<double> F_l, F_r;                  // per node; empty in phi modes
  std::vector<double> lambda_left, lambda_right; // per node; empty in conservative mode
  Vec phi;                                       // 5, 1, or empty
};

struct TrajectorySolution {
  std::vector<double> t;
  std::vector<VehicleState> states;
  std::vector<Vec10> aux;
  std::vector<double> F_l, F_r;
  std::vector<double> lambda_left, lambda_right;   // canonical weights in conservative mode
  std::vector<BranchValues> branches;              // transcription-model branch values
  std::vector<Eigen::Vector4d> wheel_loads;
  std::vector<double> R;
  Vec phi;  // empty unless a phi force mode

  double objective = 0.0;
  SolveStatus status = SolveStatus::max_iterations;
  KktResiduals kkt;
  int iterations = 0;
  double max_defect_residual = 0.0;  // natural units
  double max_path_violation = 0.0;   // travel/force residuals, natural units
  double max_hull_violation = 0.0;   // scaled hull rows
};

/// Finite-dimensional transcription of the roll-stabilization optimal control
/// problem: per-node states/auxiliaries (+forces, +hull weights), alpha-method
/// defect equalities, path/bound/disjunction inequalities, and a trapezoidal
/// path-tracking objective. Decision variables are scaled internally; all
/// public structures use natural units. Keep the object alive while the
/// NlpProblem returned by nlp() is in use.
class TranscribedProblem {
 public:
  static TranscribedProblem build(const VehicleConfig& cfg, const ScenarioConfig& scenario,
                                  const SteeringProfile& steer, const ReferenceTrajectory& ref);

  int dimension() const { return dim_; }
  int num_eq() const { return n_eq_; }
  int num_ineq() const { return n_ineq_; }
  const Vec& lower() const { return lb_; }
  const Vec& upper() const { return ub_; }
  const ScenarioConfig& scenario() const { return scenario_; }
  const VehicleConfig& vehicle() const { return cfg_; }
  const std::vector<double>& times() const { return t_; }

  Vec pack(const DecisionVariables& v) const;
  DecisionVariables unpack(const Vec& z) const;

  void evaluate(const Vec& z, double& f, Vec& c_eq, Vec& c_in) const;
  void derivatives(const Vec& z, Vec& grad, SpMat& J_eq, SpMat& J_in) const;

  /// NLP wrapper whose callbacks reference this object.
  NlpProblem nlp() const;

  /// Initial decision vector per the scenario's guess spec.
  Vec initial_guess() const;
  Vec initial_guess(const DecisionVariables& warm_start) const;

  TrajectorySolution extract(const Vec& z, const SolveReport& report) const;

  // layout introspection (scaled offsets), useful for tests
  int node_stride() const { return stride_; }
  int x_offset(int n) const { return n * stride_; }
  int a_offset(int n) const { return n * stride_ + 10; }
  int force_offset(int n) const { return n * stride_ + 20; }   // valid when has_force_vars
  int lambda_offset(int n) const { return n * stride_ + 20 + (scenario_.has_force_vars() ? 2 : 0); }
  int phi_offset() const { return scenario_.grid.N * stride_; }

 private:
  TranscribedProblem() = default;

  ControlInput control_at(const DecisionVariables& v, int n) const;
  void fill_consistent_aux(DecisionVariables& v) const;
  bool integrate_decision(DecisionVariables& v) const;
  void canonicalize_lambdas(DecisionVariables& v) const;

  VehicleConfig cfg_;
  ScenarioConfig scenario_;
  SteeringProfile steer_;
  std::vector<double> t_;
  std::vector<double> ref_X_, ref_Y_;
  std::vector<double> ref_theta_Z_, ref_X_dot_, ref_Y_dot_, ref_theta_Z_dot_;
  std::vector<double> trapezoid_w_;

  int dim_ = 0, n_eq_ = 0, n_ineq_ = 0, stride_ = 0;
  Vec lb_, ub_;
  Vec10 x_scale_, a_scale_;
  double force_scale_ = 1e3, phi_scale_ = 1e3;
  double branch1_scale_ = 1.0;  // N-valued branch normalization in hull rows
  Vec x_init_;

  // finite-difference coloring: groups of columns with disjoint row supports
  struct Column {
    std::vector<int> eq_rows, in_rows;
  };
  std::vector<Column> columns_;
  std::vector<std::vector<int>> color_groups_;
  std::vector<std::pair<int, int>> linear_eq_rows_;  // (row, col) entries fixed at 1.0
  void build_layout();
  void build_coloring();
};

}  // namespace antiroll
