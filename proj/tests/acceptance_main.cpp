// Acceptance suite: runs every acceptance criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "antiroll/closed_loop.hpp"
#include "antiroll/disjunction.hpp"
#include "antiroll/rollover.hpp"
#include "antiroll/synthesis.hpp"
#include "antiroll/transcription.hpp"

using namespace antiroll;

namespace {

struct Checker {
  int failures = 0;
  std::vector<std::string> notes;

  void run(int index, const std::string& title, const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", index, title.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

struct SolvedScenario {
  TrajectorySolution solution;
  SolveReport report;
};

struct Context {
  VehicleConfig cfg;
  SteeringProfile fishhook;
  std::map<std::string, SolvedScenario> cache;
  std::map<std::string, Phi3Result> phi3_cache;

  Context() : fishhook(SteeringProfile::fishhook({}, 0.0, 1.5)) {}

  static SolverOptions solver_options() {
    SolverOptions o;
    o.max_iter = 400;
    return o;
  }

  SolvedScenario& solve(const std::string& key, int N, ConstraintMode cm, ForceMode fm,
                        double guess_force) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ScenarioConfig sc;
    sc.constraints = cm;
    sc.forces = fm;
    sc.grid = Grid{0.0, 1.5, N};
    sc.alpha = alpha_params(0.5);
    if (guess_force != 0.0) {
      sc.guess.kind = InitialGuessSpec::Kind::constant;
      sc.guess.force_value = guess_force;
    }
    const ReferenceTrajectory ref = reference_trajectory(cfg, fishhook, sc.grid.times());
    const TranscribedProblem prob = TranscribedProblem::build(cfg, sc, fishhook, ref);
    const SolveResult r = solve_nlp(prob.nlp(), prob.initial_guess(), solver_options());
    SolvedScenario s{prob.extract(r.z, r.report), r.report};
    return cache.emplace(key, std::move(s)).first->second;
  }

  Phi3Result& fit_phi3(const std::string& key, ConstraintMode cm, double guess) {
    auto it = phi3_cache.find(key);
    if (it != phi3_cache.end()) return it->second;
    ScenarioConfig sc;
    sc.constraints = cm;
    sc.grid = Grid{0.0, 1.5, 151};
    sc.alpha = alpha_params(0.5);
    Phi3Result r = resynthesize_phi3(cfg, sc, fishhook, guess, solver_options());
    return phi3_cache.emplace(key, std::move(r)).first->second;
  }
};

double branch_scale(const VehicleConfig& cfg) { return cfg.M * cfg.g / 2.0; }

bool disjunctions_hold(const VehicleConfig& cfg, const TrajectorySolution& sol, double tol,
                       std::string& detail) {
  const double s1 = branch_scale(cfg);
  double worst = -1e300;
  for (const auto& bv : sol.branches) {
    worst = std::max(worst, std::min(bv.f1_left / s1, bv.f2_left));
    worst = std::max(worst, std::min(bv.f1_right / s1, bv.f2_right));
  }
  detail += " worst min(f1,f2)=" + std::to_string(worst);
  return worst <= tol;
}

double max_rel_force_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double ref = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ref = std::max(ref, std::abs(a[i]));
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  return ref > 0.0 ? dev / ref : 0.0;
}

std::vector<double> grid_times(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = 1.5 * i / (n - 1);
  return g;
}

}  // namespace

int main() {
  Context ctx;
  Checker chk;

  chk.run(1, "convex-hull equivalence over 10^4 random branch pairs", [&](std::string& d) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> un(-10.0, 10.0);
    int counterexamples = 0;
    for (int i = 0; i < 10000; ++i) {
      Vec f(2);
      f << un(rng), un(rng);
      const auto w = feasible_weight(f);
      const bool holds = std::min(f[0], f[1]) <= 0.0;
      if (w.has_value() != holds) ++counterexamples;
      if (w && hull_residual(f, *w) > 0.0) ++counterexamples;
    }
    d = "counterexamples=" + std::to_string(counterexamples);
    return counterexamples == 0;
  });

  chk.run(2, "alpha-method order and stiff-decay stability", [&](std::string& d) {
    const auto rhs = [](const Vec& x, double) -> Vec { return -x; };
    bool ok = true;
    for (double rho : {0.0, 0.5, 0.9}) {
      const AlphaParams p = alpha_params(rho);
      std::vector<double> errs;
      for (int n : {11, 21, 41}) {
        std::vector<double> grid(n);
        for (int i = 0; i < n; ++i) grid[i] = double(i) / (n - 1);
        const auto traj = alpha_integrate(p, rhs, Vec::Ones(1), std::nullopt, grid);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
          err = std::max(err, std::abs(traj.x[i][0] - std::exp(-grid[i])));
        errs.push_back(err);
      }
      for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double order = std::log2(errs[i] / errs[i + 1]);
        if (!(order >= 1.7 && order <= 2.3)) ok = false;
        d += " order(rho=" + std::to_string(rho).substr(0, 3) + ")=" +
             std::to_string(order).substr(0, 5);
      }
    }
    // stiff probe: strict per-step decay at stiff steps; boundedness plus
    // strong terminal decay at the mildly stiff one (complex amplification
    // eigenvalues make per-step |x| monotonicity unattainable there)
    const auto stiff = [](const Vec& x, double) -> Vec { return -1000.0 * x; };
    for (double h : {0.1, 1.0}) {
      std::vector<double> grid(11);
      for (int i = 0; i < 11; ++i) grid[i] = h * i;
      const auto traj =
          alpha_integrate(alpha_params(0.5), stiff, Vec::Ones(1), Vec::Zero(1), grid);
      for (std::size_t i = 0; i + 1 < traj.x.size(); ++i)
        if (std::abs(traj.x[i + 1][0]) > std::abs(traj.x[i][0]) + 1e-15) ok = false;
    }
    for (double h : {0.01, 0.1, 1.0}) {
      std::vector<double> grid(11);
      for (int i = 0; i < 11; ++i) grid[i] = h * i;
      const auto traj =
          alpha_integrate(alpha_params(0.5), stiff, Vec::Ones(1), Vec::Zero(1), grid);
      for (const auto& x : traj.x)
        if (std::abs(x[0]) > 1.0 + 1e-15) ok = false;
      if (std::abs(traj.x.back()[0]) >= 1e-2) ok = false;
    }
    return ok;
  });

  chk.run(3, "equilibrium scenario: feasible guess, zero-objective solve (N=61)",
          [&](std::string& d) {
            ScenarioConfig sc;
            sc.grid = Grid{0.0, 1.5, 61};
            sc.alpha = alpha_params(0.5);
            const SteeringProfile straight = SteeringProfile::straight(0.0, 1.5);
            const ReferenceTrajectory ref =
                reference_trajectory(ctx.cfg, straight, sc.grid.times());
            const TranscribedProblem prob =
                TranscribedProblem::build(ctx.cfg, sc, straight, ref);
            const Vec z0 = prob.initial_guess();
            double f;
            Vec ceq, cin;
            prob.evaluate(z0, f, ceq, cin);
            const double guess_resid = std::max(ceq.lpNorm<Eigen::Infinity>(),
                                                std::max(0.0, cin.maxCoeff()));
            const SolveResult r = solve_nlp(prob.nlp(), z0, Context::solver_options());
            d = "guess residual=" + std::to_string(guess_resid) +
                " objective=" + std::to_string(r.report.objective);
            return guess_resid <= 1e-8 && r.report.status == SolveStatus::converged &&
                   r.report.objective < 1e-8;
          });

  chk.run(4, "fishhook, disjunctive free forces: convergence and feasibility (N=121, 151)",
          [&](std::string& d) {
            bool ok = true;
            for (int N : {121, 151}) {
              auto& s = ctx.solve("disj_free_zero_" + std::to_string(N), N,
                                  ConstraintMode::disjunctive, ForceMode::free_forces, 0.0);
              d += " N" + std::to_string(N) + ":" + to_string(s.report.status);
              if (s.report.status != SolveStatus::converged) ok = false;
              if (!disjunctions_hold(ctx.cfg, s.solution, 1e-6, d)) ok = false;
              if (s.solution.max_path_violation > 1e-6) ok = false;
              for (double F : s.solution.F_l)
                if (std::abs(F) > ctx.cfg.F_max + 1e-6) ok = false;
              for (double F : s.solution.F_r)
                if (std::abs(F) > ctx.cfg.F_max + 1e-6) ok = false;
            }
            return ok;
          });

  chk.run(5, "initial-guess sensitivity: free differs, anti-symmetric agrees to 10%",
          [&](std::string& d) {
            auto& free_zero = ctx.solve("disj_free_zero_121", 121, ConstraintMode::disjunctive,
                                        ForceMode::free_forces, 0.0);
            auto& free_kN = ctx.solve("disj_free_1000_121", 121, ConstraintMode::disjunctive,
                                      ForceMode::free_forces, 1000.0);
            auto& anti_zero = ctx.solve("disj_anti_zero_121", 121, ConstraintMode::disjunctive,
                                        ForceMode::anti_symmetric, 0.0);
            auto& anti_kN = ctx.solve("disj_anti_1000_121", 121, ConstraintMode::disjunctive,
                                      ForceMode::anti_symmetric, 1000.0);
            const double free_dev =
                max_rel_force_deviation(free_zero.solution.F_l, free_kN.solution.F_l);
            const double anti_dev =
                max_rel_force_deviation(anti_zero.solution.F_l, anti_kN.solution.F_l);
            d = "free dev=" + std::to_string(free_dev) + " anti dev=" + std::to_string(anti_dev);
            const bool converged = free_zero.report.status == SolveStatus::converged &&
                                   free_kN.report.status == SolveStatus::converged &&
                                   anti_zero.report.status == SolveStatus::converged &&
                                   anti_kN.report.status == SolveStatus::converged;
            return converged && anti_dev <= 0.10;
          });

  chk.run(6, "rollover-index contrast: lift-off yet stabilized vs grounded", [&](std::string& d) {
    auto& disj = ctx.solve("disj_free_zero_151", 151, ConstraintMode::disjunctive,
                           ForceMode::free_forces, 0.0);
    auto& cons = ctx.solve("cons_free_zero_151", 151, ConstraintMode::conservative,
                           ForceMode::free_forces, 0.0);
    std::vector<double> theta;
    for (const auto& s : disj.solution.states) theta.push_back(s.theta_X);
    const RolloverReport roll_disj =
        classify(disj.solution.t, disj.solution.wheel_loads, theta);
    theta.clear();
    for (const auto& s : cons.solution.states) theta.push_back(s.theta_X);
    const RolloverReport roll_cons =
        classify(cons.solution.t, cons.solution.wheel_loads, theta);
    d = "disj max|R|=" + std::to_string(roll_disj.summary.max_abs_R) +
        " cons max|R|=" + std::to_string(roll_cons.summary.max_abs_R) +
        (roll_disj.summary.stabilized ? " stabilized" : " NOT-stabilized");
    return cons.report.status == SolveStatus::converged && roll_disj.summary.liftoff &&
           roll_disj.summary.max_abs_R > 1.0 && roll_disj.summary.stabilized &&
           roll_cons.summary.max_abs_R <= 1.0 + 1e-4;
  });

  chk.run(7, "synthesis: negative dominant yaw-rate gain within the band", [&](std::string& d) {
    ScenarioConfig sc;
    sc.constraints = ConstraintMode::disjunctive;
    sc.grid = Grid{0.0, 1.5, 151};
    sc.alpha = alpha_params(0.5);
    const SynthesisResult syn =
        synthesize(ctx.cfg, sc, ctx.fishhook, {}, Context::solver_options());
    const DominanceReport dom = dominant_term(syn.phi, syn.solution, ctx.cfg.Z0);
    auto& p3_disj = ctx.fit_phi3("disj", ConstraintMode::disjunctive, 0.0);
    auto& p3_cons = ctx.fit_phi3("cons", ConstraintMode::conservative, 0.0);
    auto& p3_active = ctx.fit_phi3("disj_active", ConstraintMode::disjunctive, -2000.0);
    d = "phi=(" + std::to_string(syn.phi.phi1) + "," + std::to_string(syn.phi.phi2) + "," +
        std::to_string(syn.phi.phi3) + "," + std::to_string(syn.phi.phi4) + "," +
        std::to_string(syn.phi.phi5) + ") phi3_disj=" + std::to_string(p3_disj.phi3) +
        " phi3_cons=" + std::to_string(p3_cons.phi3) +
        " phi3_active_guess=" + std::to_string(p3_active.phi3);
    auto in_band = [](double v) { return v >= -7200.0 && v <= -2400.0; };
    const double guess_spread =
        std::abs(p3_disj.phi3 - p3_active.phi3) / std::abs(p3_disj.phi3);
    d += " guess spread=" + std::to_string(guess_spread);
    return syn.report.status == SolveStatus::converged &&
           p3_disj.report.status == SolveStatus::converged &&
           p3_cons.report.status == SolveStatus::converged && syn.phi.phi3 < 0.0 &&
           dom.ranked.front().term == 2 && !dom.tie && in_band(syn.phi.phi3) &&
           in_band(p3_disj.phi3) && in_band(p3_cons.phi3) && guess_spread <= 0.05;
  });

  chk.run(8, "closed-loop force demands comparable across constraint modes",
          [&](std::string& d) {
            auto& p3_disj = ctx.fit_phi3("disj", ConstraintMode::disjunctive, 0.0);
            auto& p3_cons = ctx.fit_phi3("cons", ConstraintMode::conservative, 0.0);
            const ModeComparison cmp = compare_modes(ctx.cfg, p3_disj.phi3, p3_cons.phi3,
                                                     ctx.fishhook, grid_times(1501));
            d = "max|F| disj=" + std::to_string(cmp.disjunctive.max_abs_force) +
                " cons=" + std::to_string(cmp.conservative.max_abs_force) +
                " ratio=" + std::to_string(cmp.max_force_ratio);
            return cmp.max_force_ratio <= 1.5;
          });

  chk.run(9, "closed-loop validation on the generating, faster, and severe maneuvers",
          [&](std::string& d) {
            auto& p3 = ctx.fit_phi3("disj", ConstraintMode::disjunctive, 0.0);
            SteeringProfile::FishhookParams fast;
            fast.ramp_time *= 0.5;
            fast.reversal_time *= 0.5;
            SteeringProfile::FishhookParams severe = fast;
            severe.peak_deg *= 1.25;
            severe.reverse_deg *= 1.25;
            const auto grid = grid_times(1501);
            const auto a = simulate(ctx.cfg, p3.phi3, ctx.fishhook, grid);
            const auto b =
                simulate(ctx.cfg, p3.phi3, SteeringProfile::fishhook(fast, 0.0, 1.5), grid);
            const auto c =
                simulate(ctx.cfg, p3.phi3, SteeringProfile::fishhook(severe, 0.0, 1.5), grid);
            d = std::string("satisfied a/b/c=") + (a.all_satisfied ? "y" : "n") +
                (b.all_satisfied ? "y" : "n") + (c.all_satisfied ? "y" : "n") +
                " single-branch intervals on c=" +
                std::to_string(c.single_branch_intervals.size());
            return a.all_satisfied && b.all_satisfied && c.all_satisfied &&
                   !c.single_branch_intervals.empty();
          });

  chk.run(10, "model oracles match independent straight-line evaluation to 1e-9",
          [&](std::string& d) {
            const VehicleConfig& cfg = ctx.cfg;
            const VehicleState eq = initial_state(cfg);
            bool ok = true;
            const Eigen::Vector4d F_Z = wheel_reactions(cfg, eq, {});
            if (std::abs(F_Z[0] - 3548.2758620689655) > 1e-9) ok = false;
            if (std::abs(F_Z[2] - 3311.7241379310345) > 1e-9) ok = false;
            if (std::abs(F_Z.sum() - cfg.M * cfg.g) > 1e-9) ok = false;

            const double alpha = slip_angle_deg(cfg, eq, 0.02, 1);
            if (std::abs(alpha - (-(180.0 / M_PI) * 0.02)) > 1e-9) ok = false;

            // tire chain, straight-line
            {
              const auto& tc = cfg.tire;
              const double Fp = 3548.28 / 1000.0;
              const double D = tc.a1 * Fp * Fp + tc.a2 * Fp;
              const double B = tc.a3 * std::sin(tc.a4 * std::atan(tc.a5 * Fp)) / (tc.C_T * D);
              const double E = tc.a6 * Fp * Fp + tc.a7 * Fp + tc.a8;
              const double phi = (1.0 - E) * 2.0 + (E / B) * std::atan(B * 2.0);
              const double fy_oracle = D * std::sin(tc.C_T * std::atan(B * phi));
              if (std::abs(tire_lateral_force(cfg, 3548.28, 2.0) - fy_oracle) > 1e-9) ok = false;
              if (std::abs(fy_oracle - 1802.7136526544232) > 1e-6) ok = false;
            }

            // dynamics spot values
            {
              VehicleState s = eq;
              s.Z = cfg.Z0 + 0.01;
              const Vec10 dd = dynamics_rhs(cfg, s, {}, 0.0);
              if (std::abs(dd[7] - (-6.0 / 7.0)) > 1e-9) ok = false;
              const Vec10 du = dynamics_rhs(cfg, eq, {500.0, -500.0}, 0.0);
              if (std::abs(du[8] - 1500.0 / 1300.0) > 1e-9) ok = false;
              const Vec10 d0 = dynamics_rhs(cfg, eq, {}, 0.0);
              for (int k = 5; k < 10; ++k)
                if (std::abs(d0[k]) > 1e-12) ok = false;
            }
            d = ok ? "all spot values matched" : "spot value mismatch";
            return ok;
          });

  std::printf("%d of 10 criteria passed\n", 10 - chk.failures);
  return chk.failures;
}
