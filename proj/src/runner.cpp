#include "antiroll/runner.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "antiroll/closed_loop.hpp"
#include "antiroll/csv.hpp"
#include "antiroll/rollover.hpp"
#include "antiroll/synthesis.hpp"

namespace antiroll {

namespace fs = std::filesystem;

namespace {

json kkt_json(const KktResiduals& k) {
  return {{"stationarity", k.stationarity},
          {"feasibility", k.feasibility},
          {"complementarity", k.complementarity}};
}

json intervals_json(const std::vector<std::pair<double, double>>& iv) {
  json out = json::array();
  for (const auto& [a, b] : iv) out.push_back({a, b});
  return out;
}

json rollover_json(const RolloverReport& r) {
  return {{"max_abs_R", r.summary.max_abs_R},
          {"liftoff", r.summary.liftoff},
          {"liftoff_intervals", intervals_json(r.summary.liftoff_intervals)},
          {"max_abs_theta_X", r.summary.max_abs_theta_X},
          {"terminal_abs_theta_X", r.summary.terminal_abs_theta_X},
          {"theta_X_at_peak_R", r.summary.theta_X_at_peak_R},
          {"stabilized", r.summary.stabilized}};
}

/// Every run emits the same top-level field set; unused entries stay null.
json report_skeleton(const char* kind, const RunConfig& config) {
  json j;
  j["kind"] = kind;
  j["status"] = nullptr;
  j["exit_code"] = kExitOk;
  j["objective"] = nullptr;
  j["iterations"] = nullptr;
  j["kkt"] = nullptr;
  j["phi"] = nullptr;
  j["phi3"] = nullptr;
  j["dominance"] = nullptr;
  j["rollover"] = nullptr;
  j["constraints"] = nullptr;
  j["validation"] = nullptr;
  j["sweep"] = nullptr;
  j["outputs"] = json::object();
  j["config"] = config.echo();
  return j;
}

bool wants(const RunConfig& c, const std::string& format) {
  for (const auto& f : c.output.formats)
    if (f == format) return true;
  return false;
}

void write_report(const fs::path& dir, const json& report) {
  std::ofstream out(dir / "report.json");
  if (!out) raise(ErrorCode::io_error, "cannot write report.json in " + dir.string());
  out << report.dump(2) << '\n';
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Render the standard figure layout from a trajectory CSV."""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "trajectory.csv")
with path.open() as fh:
    reader = csv.reader(fh)
    header = next(reader)
    data = [[float(v) for v in row] for row in reader]
col = {name: [row[i] for row in data] for i, name in enumerate(header)}
t = col["t"]

fig, axes = plt.subplots(2, 2, figsize=(12, 8))

ax = axes[0][0]
ax.plot(t, col["X"], label="X [m]")
ax.plot(t, col["Y"], label="Y [m]")
ax.plot(t, [v * 10 for v in col["theta_Z"]], label="theta_Z [0.1 rad]")
ax.set_title("planar states")
ax.legend(fontsize=8)

ax = axes[0][1]
ax.plot(t, col["Z"], label="Z [m]")
ax.plot(t, col["theta_X"], label="theta_X [rad]")
ax.set_title("heave and roll")
ax.legend(fontsize=8)

ax = axes[1][0]
ax.plot(t, col["F_l"], label="F_l [N]")
ax.plot(t, col["F_r"], label="F_r [N]")
ax2 = ax.twinx()
ax2.plot(t, col["lambda_left"], ":", color="gray", label="lambda_left")
ax2.plot(t, col["lambda_right"], ":", color="black", label="lambda_right")
ax2.set_ylim(-0.05, 1.05)
ax.set_title("controls and hull weights")
ax.legend(fontsize=8, loc="upper left")
ax2.legend(fontsize=8, loc="upper right")

ax = axes[1][1]
ax.plot(t, [abs(v) for v in col["R"]], label="|R|")
ax.axhline(1.0, color="red", linestyle="--", linewidth=0.8, label="lift-off onset")
ax.set_title("rollover index")
ax.legend(fontsize=8)

for row in axes:
    for a in row:
        a.set_xlabel("t [s]")
        a.grid(alpha=0.3)
fig.tight_layout()
out = path.with_suffix(".png")
fig.savefig(out, dpi=150)
print(out)
)PY";

void write_plot_script(const fs::path& dir) {
  std::ofstream out(dir / "plot.py");
  if (!out) raise(ErrorCode::io_error, "cannot write plot.py in " + dir.string());
  out << kPlotScript;
}

RolloverReport classify_solution(const TrajectorySolution& sol, double theta_cap) {
  std::vector<double> theta;
  theta.reserve(sol.states.size());
  for (const auto& s : sol.states) theta.push_back(s.theta_X);
  return classify(sol.t, sol.wheel_loads, theta, theta_cap);
}

json solution_constraints_json(const TrajectorySolution& sol, double feas_tol) {
  bool satisfied = true;
  for (const auto& bv : sol.branches) {
    if (!(std::min(bv.f1_left, bv.f2_left) <= feas_tol &&
          std::min(bv.f1_right, bv.f2_right) <= feas_tol)) {
      satisfied = false;
      break;
    }
  }
  return {{"max_defect_residual", sol.max_defect_residual},
          {"max_path_violation", sol.max_path_violation},
          {"max_hull_violation", sol.max_hull_violation},
          {"all_nodes_satisfied", satisfied}};
}

}  // namespace

RunArtifacts run_optimize(const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const SteeringProfile steer = config.make_steering();
  const ScenarioConfig scenario = config.make_scenario();
  const ReferenceTrajectory ref = reference_trajectory(
      config.vehicle, steer, scenario.grid.times(), config.simulation.forward_speed);
  const TranscribedProblem problem =
      TranscribedProblem::build(config.vehicle, scenario, steer, ref);
  const SolveResult r = solve_nlp(problem.nlp(), problem.initial_guess(),
                                  config.make_solver_options());
  const TrajectorySolution sol = problem.extract(r.z, r.report);
  const RolloverReport roll = classify_solution(sol, config.scenario.theta_cap);

  RunArtifacts art;
  art.directory = out_dir;
  art.report = report_skeleton("optimize", config);
  art.report["status"] = to_string(r.report.status);
  art.report["objective"] = sol.objective;
  art.report["iterations"] = r.report.iterations;
  art.report["kkt"] = kkt_json(r.report.kkt);
  art.report["rollover"] = rollover_json(roll);
  art.report["constraints"] = solution_constraints_json(sol, config.solver.feas_tol);
  art.exit_code = r.report.status == SolveStatus::converged ? kExitOk : kExitSolverFailure;
  art.report["exit_code"] = art.exit_code;

  if (wants(config, "csv")) {
    write_csv(out_dir / "trajectory.csv", trajectory_table(sol));
    art.report["outputs"]["trajectory_csv"] = (out_dir / "trajectory.csv").string();
  }
  if (wants(config, "plot")) {
    write_plot_script(out_dir);
    art.report["outputs"]["plot_script"] = (out_dir / "plot.py").string();
  }
  write_report(out_dir, art.report);
  return art;
}

RunArtifacts run_synthesize(const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const SteeringProfile steer = config.make_steering();
  ScenarioConfig scenario = config.make_scenario();
  const SolverOptions solver = config.make_solver_options();

  const SynthesisResult syn = synthesize(config.vehicle, scenario, steer, {}, solver);
  const DominanceReport dom = dominant_term(syn.phi, syn.solution, config.vehicle.Z0);
  const Phi3Result refit = resynthesize_phi3(config.vehicle, scenario, steer, 0.0, solver);

  RunArtifacts art;
  art.directory = out_dir;
  art.report = report_skeleton("synthesize", config);
  art.report["status"] = to_string(syn.report.status);
  art.report["objective"] = syn.solution.objective;
  art.report["iterations"] = syn.report.iterations;
  art.report["kkt"] = kkt_json(syn.report.kkt);
  art.report["phi"] = {syn.phi.phi1, syn.phi.phi2, syn.phi.phi3, syn.phi.phi4, syn.phi.phi5};
  art.report["phi3"] = refit.phi3;
  json dom_json = json::array();
  for (const auto& d : dom.ranked)
    dom_json.push_back(
        {{"term", kPhiTermNames[d.term]}, {"rms", d.rms}, {"max_abs", d.max_abs}});
  art.report["dominance"] = {{"ranked", dom_json},
                             {"tie", dom.tie},
                             {"identifiable", syn.identifiable && refit.identifiable}};
  art.report["rollover"] =
      rollover_json(classify_solution(refit.solution, config.scenario.theta_cap));
  art.report["constraints"] = solution_constraints_json(refit.solution, config.solver.feas_tol);
  art.exit_code = (syn.report.status == SolveStatus::converged &&
                   refit.report.status == SolveStatus::converged)
                      ? kExitOk
                      : kExitSolverFailure;
  art.report["exit_code"] = art.exit_code;

  if (wants(config, "csv")) {
    write_csv(out_dir / "phi_trajectory.csv", trajectory_table(syn.solution));
    write_csv(out_dir / "trajectory.csv", trajectory_table(refit.solution));
    art.report["outputs"]["phi_trajectory_csv"] = (out_dir / "phi_trajectory.csv").string();
    art.report["outputs"]["trajectory_csv"] = (out_dir / "trajectory.csv").string();
  }
  if (wants(config, "plot")) {
    write_plot_script(out_dir);
    art.report["outputs"]["plot_script"] = (out_dir / "plot.py").string();
  }
  write_report(out_dir, art.report);
  return art;
}

RunArtifacts run_validate(const RunConfig& config, const fs::path& out_dir) {
  if (!config.control.phi3)
    raise(ErrorCode::config_error, "validate requires control.phi3 in the config");
  fs::create_directories(out_dir);
  const SteeringProfile steer = config.make_steering();
  ClosedLoopOptions opts;
  opts.alpha = alpha_params(config.simulation.rho);
  opts.forward_speed = config.simulation.forward_speed;
  const ClosedLoopResult sim =
      simulate(config.vehicle, *config.control.phi3, steer, config.make_grid().times(), opts);

  RunArtifacts art;
  art.directory = out_dir;
  art.report = report_skeleton("validate", config);
  art.report["status"] = sim.roll_singularity ? "rollover-event" : "completed";
  art.report["phi3"] = *config.control.phi3;
  art.report["rollover"] = rollover_json(sim.rollover);
  art.report["validation"] = {
      {"all_satisfied", sim.all_satisfied},
      {"violation_intervals", intervals_json(sim.violation_intervals)},
      {"single_branch_intervals", intervals_json(sim.single_branch_intervals)},
      {"max_abs_force", sim.max_abs_force},
      {"roll_singularity", sim.roll_singularity},
      {"singularity_time", sim.roll_singularity ? json(sim.singularity_time) : json(nullptr)}};
  art.exit_code = kExitOk;
  art.report["exit_code"] = art.exit_code;

  if (wants(config, "csv")) {
    write_csv(out_dir / "trajectory.csv", trajectory_table(sim));
    art.report["outputs"]["trajectory_csv"] = (out_dir / "trajectory.csv").string();
  }
  if (wants(config, "plot")) {
    write_plot_script(out_dir);
    art.report["outputs"]["plot_script"] = (out_dir / "plot.py").string();
  }
  write_report(out_dir, art.report);
  return art;
}

RunArtifacts run_sweep(const RunConfig& config, const fs::path& out_dir) {
  if (!config.sweep) raise(ErrorCode::config_error, "sweep requires a sweep section");
  fs::create_directories(out_dir);
  const SweepSection& sw = *config.sweep;
  const std::size_t count = sw.values.size();

  struct Member {
    double value = 0.0;
    double phi3 = 0.0;
    double objective = 0.0;
    double max_abs_R = 0.0;
    double max_abs_theta_X = 0.0;
    bool stabilized = false;
    bool converged = false;
    TrajectorySolution solution;
  };
  std::vector<Member> members(count);

  auto run_member = [&](std::size_t i) {
    RunConfig local = config;
    if (sw.parameter == "peak_deg") local.steering.fishhook.peak_deg = sw.values[i];
    else if (sw.parameter == "reverse_deg") local.steering.fishhook.reverse_deg = sw.values[i];
    else if (sw.parameter == "ramp_time") local.steering.fishhook.ramp_time = sw.values[i];
    else if (sw.parameter == "reversal_time")
      local.steering.fishhook.reversal_time = sw.values[i];
    else if (sw.parameter == "scale") local.steering.scale = sw.values[i];

    const SteeringProfile steer = local.make_steering();
    const Phi3Result r = resynthesize_phi3(local.vehicle, local.make_scenario(), steer, 0.0,
                                           local.make_solver_options());
    Member m;
    m.value = sw.values[i];
    m.phi3 = r.phi3;
    m.objective = r.solution.objective;
    m.converged = r.report.status == SolveStatus::converged;
    const RolloverReport roll = classify_solution(r.solution, local.scenario.theta_cap);
    m.max_abs_R = roll.summary.max_abs_R;
    m.max_abs_theta_X = roll.summary.max_abs_theta_X;
    m.stabilized = roll.summary.stabilized;
    m.solution = r.solution;
    members[i] = std::move(m);
  };

  const int workers = std::max(1, std::min<int>(sw.parallelism, int(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) run_member(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr)
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run_member(i);
      });
    for (auto& th : pool) th.join();
  }

  CsvTable lut;
  lut.columns = {sw.parameter, "phi3", "converged", "objective", "max_abs_R",
                 "max_abs_theta_X", "stabilized"};
  json rows = json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < count; ++i) {
    const Member& m = members[i];
    lut.rows.push_back({m.value, m.phi3, double(m.converged), m.objective, m.max_abs_R,
                        m.max_abs_theta_X, double(m.stabilized)});
    rows.push_back({{sw.parameter, m.value},
                    {"phi3", m.phi3},
                    {"converged", m.converged},
                    {"objective", m.objective},
                    {"max_abs_R", m.max_abs_R},
                    {"stabilized", m.stabilized}});
    all_ok = all_ok && m.converged;
    if (wants(config, "csv")) {
      char name[32];
      std::snprintf(name, sizeof(name), "member_%02zu", i);
      const fs::path mdir = out_dir / name;
      fs::create_directories(mdir);
      write_csv(mdir / "trajectory.csv", trajectory_table(m.solution));
    }
  }
  write_csv(out_dir / "lut.csv", lut);

  RunArtifacts art;
  art.directory = out_dir;
  art.report = report_skeleton("sweep", config);
  art.report["status"] = all_ok ? "converged" : "partial";
  art.report["sweep"] = rows;
  art.report["outputs"]["lut_csv"] = (out_dir / "lut.csv").string();
  art.exit_code = all_ok ? kExitOk : kExitSolverFailure;
  art.report["exit_code"] = art.exit_code;
  write_report(out_dir, art.report);
  return art;
}

RunArtifacts run_analyze(const RunConfig& config, const fs::path& csv_path,
                         const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const CsvTable table = read_csv(csv_path);
  for (const auto& name : kTrajectoryColumns)
    if (table.column_index(name) < 0)
      raise(ErrorCode::io_error, csv_path.string() + ": missing column " + name);

  std::vector<double> t, theta;
  std::vector<Eigen::Vector4d> loads;
  const int it = table.column_index("t");
  const int iFl = table.column_index("F_l");
  const int iFr = table.column_index("F_r");
  for (const auto& row : table.rows) {
    Vec10 xv;
    for (int k = 0; k < 10; ++k) xv[k] = row[1 + k];
    const VehicleState s = VehicleState::from_vector(xv);
    ControlInput u{row[iFl], row[iFr]};
    t.push_back(row[it]);
    theta.push_back(s.theta_X);
    loads.push_back(wheel_reactions(config.vehicle, s, u));
  }
  const RolloverReport roll = classify(t, loads, theta, config.scenario.theta_cap);

  RunArtifacts art;
  art.directory = out_dir;
  art.report = report_skeleton("analyze", config);
  art.report["status"] = "completed";
  art.report["rollover"] = rollover_json(roll);
  art.exit_code = kExitOk;
  art.report["exit_code"] = art.exit_code;
  write_report(out_dir, art.report);
  return art;
}

}  // namespace antiroll
