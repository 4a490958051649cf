#include "antiroll/config.hpp"

#include <fstream>
#include <set>

namespace antiroll {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  raise(ErrorCode::config_error, path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown field");
}

double get_num(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
  return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

void parse_vehicle(const json& j, VehicleConfig& v) {
  const std::string p = "vehicle";
  check_keys(j, p,
             {"M", "T", "K", "C", "I_XX", "I_ZZ", "a", "b", "g", "mu", "Z0", "Z_min", "Z_max",
              "F_max", "tire"});
  v.M = get_num(j, p, "M", v.M);
  v.T = get_num(j, p, "T", v.T);
  v.K = get_num(j, p, "K", v.K);
  v.C = get_num(j, p, "C", v.C);
  v.I_XX = get_num(j, p, "I_XX", v.I_XX);
  v.I_ZZ = get_num(j, p, "I_ZZ", v.I_ZZ);
  v.a = get_num(j, p, "a", v.a);
  v.b = get_num(j, p, "b", v.b);
  v.g = get_num(j, p, "g", v.g);
  v.mu = get_num(j, p, "mu", v.mu);
  v.Z0 = get_num(j, p, "Z0", v.Z0);
  v.Z_min = get_num(j, p, "Z_min", v.Z_min);
  v.Z_max = get_num(j, p, "Z_max", v.Z_max);
  v.F_max = get_num(j, p, "F_max", v.F_max);
  if (j.contains("tire")) {
    const json& t = j["tire"];
    const std::string tp = "vehicle.tire";
    check_keys(t, tp, {"C_T", "delta_S_h", "a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"});
    v.tire.C_T = get_num(t, tp, "C_T", v.tire.C_T);
    v.tire.delta_S_h = get_num(t, tp, "delta_S_h", v.tire.delta_S_h);
    v.tire.a1 = get_num(t, tp, "a1", v.tire.a1);
    v.tire.a2 = get_num(t, tp, "a2", v.tire.a2);
    v.tire.a3 = get_num(t, tp, "a3", v.tire.a3);
    v.tire.a4 = get_num(t, tp, "a4", v.tire.a4);
    v.tire.a5 = get_num(t, tp, "a5", v.tire.a5);
    v.tire.a6 = get_num(t, tp, "a6", v.tire.a6);
    v.tire.a7 = get_num(t, tp, "a7", v.tire.a7);
    v.tire.a8 = get_num(t, tp, "a8", v.tire.a8);
  }
}

ConstraintMode parse_constraints(const std::string& s) {
  if (s == "disjunctive") return ConstraintMode::disjunctive;
  if (s == "conservative") return ConstraintMode::conservative;
  fail("scenario.constraints", "unknown mode '" + s + "'");
}

ForceMode parse_forces(const std::string& s) {
  if (s == "free") return ForceMode::free_forces;
  if (s == "anti_symmetric") return ForceMode::anti_symmetric;
  if (s == "phi") return ForceMode::phi_parameterized;
  if (s == "phi3") return ForceMode::phi3_only;
  fail("scenario.forces", "unknown mode '" + s + "'");
}

InitialGuessSpec::Kind parse_guess(const std::string& s) {
  if (s == "zero") return InitialGuessSpec::Kind::zero;
  if (s == "constant") return InitialGuessSpec::Kind::constant;
  fail("scenario.guess", "unknown kind '" + s + "'");
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"vehicle", "simulation", "steering", "scenario", "solver", "control", "sweep",
              "output", "seed"});
  if (j.contains("vehicle")) parse_vehicle(j["vehicle"], c.vehicle);

  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    const std::string p = "simulation";
    check_keys(s, p, {"t0", "t_f", "N", "rho", "forward_speed"});
    c.simulation.t0 = get_num(s, p, "t0", c.simulation.t0);
    c.simulation.t_f = get_num(s, p, "t_f", c.simulation.t_f);
    c.simulation.N = get_int(s, p, "N", c.simulation.N);
    c.simulation.rho = get_num(s, p, "rho", c.simulation.rho);
    c.simulation.forward_speed = get_num(s, p, "forward_speed", c.simulation.forward_speed);
  }

  if (j.contains("steering")) {
    const json& s = j["steering"];
    const std::string p = "steering";
    check_keys(s, p, {"profile", "fishhook", "breakpoints", "scale"});
    c.steering.profile = get_str(s, p, "profile", c.steering.profile);
    c.steering.scale = get_num(s, p, "scale", c.steering.scale);
    if (s.contains("fishhook")) {
      const json& f = s["fishhook"];
      const std::string fp = "steering.fishhook";
      check_keys(f, fp,
                 {"ramp_start", "ramp_time", "peak_deg", "dwell", "reversal_time", "reverse_deg"});
      auto& fh = c.steering.fishhook;
      fh.ramp_start = get_num(f, fp, "ramp_start", fh.ramp_start);
      fh.ramp_time = get_num(f, fp, "ramp_time", fh.ramp_time);
      fh.peak_deg = get_num(f, fp, "peak_deg", fh.peak_deg);
      fh.dwell = get_num(f, fp, "dwell", fh.dwell);
      fh.reversal_time = get_num(f, fp, "reversal_time", fh.reversal_time);
      fh.reverse_deg = get_num(f, fp, "reverse_deg", fh.reverse_deg);
    }
    if (s.contains("breakpoints")) {
      if (!s["breakpoints"].is_array()) fail("steering.breakpoints", "expected an array");
      for (const auto& bp : s["breakpoints"]) {
        if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number() || !bp[1].is_number())
          fail("steering.breakpoints", "entries must be [time_s, angle_deg] pairs");
        c.steering.breakpoints.emplace_back(bp[0].get<double>(), bp[1].get<double>());
      }
    }
  }

  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    const std::string p = "scenario";
    check_keys(s, p,
               {"constraints", "forces", "guess", "guess_force", "tire_smoothing_width",
                "phi_bound", "theta_cap"});
    c.scenario.constraints = parse_constraints(get_str(s, p, "constraints", "disjunctive"));
    c.scenario.forces = parse_forces(get_str(s, p, "forces", "free"));
    c.scenario.guess = parse_guess(get_str(s, p, "guess", "zero"));
    c.scenario.guess_force = get_num(s, p, "guess_force", c.scenario.guess_force);
    c.scenario.tire_smoothing_width =
        get_num(s, p, "tire_smoothing_width", c.scenario.tire_smoothing_width);
    c.scenario.phi_bound = get_num(s, p, "phi_bound", c.scenario.phi_bound);
    c.scenario.theta_cap = get_num(s, p, "theta_cap", c.scenario.theta_cap);
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    const std::string p = "solver";
    check_keys(s, p, {"kkt_tol", "feas_tol", "max_iter"});
    c.solver.kkt_tol = get_num(s, p, "kkt_tol", c.solver.kkt_tol);
    c.solver.feas_tol = get_num(s, p, "feas_tol", c.solver.feas_tol);
    c.solver.max_iter = get_int(s, p, "max_iter", c.solver.max_iter);
  }

  if (j.contains("control")) {
    const json& s = j["control"];
    check_keys(s, "control", {"phi3"});
    if (s.contains("phi3") && !s["phi3"].is_null()) {
      if (!s["phi3"].is_number()) fail("control.phi3", "expected a number");
      c.control.phi3 = s["phi3"].get<double>();
    }
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    const std::string p = "sweep";
    check_keys(s, p, {"parameter", "values", "parallelism"});
    SweepSection sw;
    sw.parameter = get_str(s, p, "parameter", sw.parameter);
    sw.parallelism = get_int(s, p, "parallelism", sw.parallelism);
    if (s.contains("values")) {
      if (!s["values"].is_array()) fail("sweep.values", "expected an array");
      for (const auto& v : s["values"]) {
        if (!v.is_number()) fail("sweep.values", "entries must be numbers");
        sw.values.push_back(v.get<double>());
      }
    }
    c.sweep = sw;
  }

  if (j.contains("output")) {
    const json& s = j["output"];
    const std::string p = "output";
    check_keys(s, p, {"directory", "formats"});
    c.output.directory = get_str(s, p, "directory", c.output.directory);
    if (s.contains("formats")) {
      if (!s["formats"].is_array()) fail("output.formats", "expected an array");
      c.output.formats.clear();
      for (const auto& f : s["formats"]) {
        if (!f.is_string()) fail("output.formats", "entries must be strings");
        c.output.formats.push_back(f.get<std::string>());
      }
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) fail("seed", "expected an integer");
    c.seed = j["seed"].get<long>();
  }

  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::config_error, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::config_error, path.string() + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  try {
    vehicle.validate();
  } catch (const Error& e) {
    raise(ErrorCode::config_error, std::string("vehicle: ") + e.what());
  }
  if (simulation.N < 2) raise(ErrorCode::config_error, "simulation.N must be at least 2");
  if (!(simulation.t_f > simulation.t0))
    raise(ErrorCode::config_error, "simulation.t_f must exceed t0");
  if (!(simulation.rho >= 0.0 && simulation.rho < 1.0))
    raise(ErrorCode::config_error, "simulation.rho must lie in [0, 1)");
  if (!(simulation.forward_speed > 0.0))
    raise(ErrorCode::config_error, "simulation.forward_speed must be positive");

  static const std::set<std::string> kProfiles = {
      "straight", "fishhook", "fishhook_fast", "fishhook_severe", "double_lane_change",
      "breakpoints"};
  if (!kProfiles.count(steering.profile))
    raise(ErrorCode::config_error, "steering.profile: unknown profile '" + steering.profile + "'");
  if (steering.profile == "breakpoints" && steering.breakpoints.size() < 2)
    raise(ErrorCode::config_error, "steering.breakpoints: need at least two points");

  if (sweep) {
    if (sweep->values.empty()) raise(ErrorCode::config_error, "sweep.values must not be empty");
    if (sweep->parallelism < 1)
      raise(ErrorCode::config_error, "sweep.parallelism must be at least 1");
    static const std::set<std::string> kParams = {"peak_deg", "reverse_deg", "ramp_time",
                                                  "reversal_time", "scale"};
    if (!kParams.count(sweep->parameter))
      raise(ErrorCode::config_error, "sweep.parameter: unknown parameter '" + sweep->parameter +
                                         "'");
  }
}

Grid RunConfig::make_grid() const {
  Grid g;
  g.t0 = simulation.t0;
  g.t_f = simulation.t_f;
  g.N = simulation.N;
  return g;
}

SteeringProfile RunConfig::make_steering() const {
  const double t0 = simulation.t0;
  const double t_f = simulation.t_f;
  SteeringProfile base;
  if (steering.profile == "straight") {
    base = SteeringProfile::straight(t0, t_f);
  } else if (steering.profile == "breakpoints") {
    base = SteeringProfile::from_breakpoints(steering.breakpoints);
  } else if (steering.profile == "fishhook") {
    base = SteeringProfile::fishhook(steering.fishhook, t0, t_f);
  } else if (steering.profile == "fishhook_fast") {
    SteeringProfile::FishhookParams p = steering.fishhook;
    p.ramp_time *= 0.5;
    p.reversal_time *= 0.5;
    base = SteeringProfile::fishhook(p, t0, t_f);
  } else if (steering.profile == "fishhook_severe") {
    SteeringProfile::FishhookParams p = steering.fishhook;
    p.ramp_time *= 0.5;
    p.reversal_time *= 0.5;
    p.peak_deg *= 1.25;
    p.reverse_deg *= 1.25;
    base = SteeringProfile::fishhook(p, t0, t_f);
  } else if (steering.profile == "double_lane_change") {
    const double span = t_f - t0;
    auto at = [&](double frac) { return t0 + frac * span; };
    const double A = 6.0;
    base = SteeringProfile::from_breakpoints(
        {{t0, 0.0}, {at(0.08), 0.0}, {at(0.2), A}, {at(0.32), A}, {at(0.44), -A}, {at(0.56), -A},
         {at(0.68), A * 0.6}, {at(0.8), 0.0}, {t_f, 0.0}});
  }
  if (steering.scale == 1.0) return base;
  std::vector<std::pair<double, double>> pts = base.breakpoints();
  for (auto& [t, deg] : pts) deg *= steering.scale;
  return SteeringProfile::from_breakpoints(std::move(pts));
}

ScenarioConfig RunConfig::make_scenario() const {
  ScenarioConfig s;
  s.constraints = scenario.constraints;
  s.forces = scenario.forces;
  s.guess.kind = scenario.guess;
  s.guess.force_value = scenario.guess_force;
  s.grid = make_grid();
  s.alpha = alpha_params(simulation.rho);
  s.tire_smoothing_width = scenario.tire_smoothing_width;
  s.phi_bound = scenario.phi_bound;
  return s;
}

SolverOptions RunConfig::make_solver_options() const {
  SolverOptions o;
  o.kkt_tol = solver.kkt_tol;
  o.feas_tol = solver.feas_tol;
  o.max_iter = solver.max_iter;
  return o;
}

json RunConfig::echo() const {
  json j;
  j["vehicle"] = {{"M", vehicle.M},         {"T", vehicle.T},
                  {"K", vehicle.K},         {"C", vehicle.C},
                  {"I_XX", vehicle.I_XX},   {"I_ZZ", vehicle.I_ZZ},
                  {"a", vehicle.a},         {"b", vehicle.b},
                  {"g", vehicle.g},         {"mu", vehicle.mu},
                  {"Z0", vehicle.Z0},       {"Z_min", vehicle.Z_min},
                  {"Z_max", vehicle.Z_max}, {"F_max", vehicle.F_max},
                  {"tire",
                   {{"C_T", vehicle.tire.C_T},
                    {"delta_S_h", vehicle.tire.delta_S_h},
                    {"a1", vehicle.tire.a1},
                    {"a2", vehicle.tire.a2},
                    {"a3", vehicle.tire.a3},
                    {"a4", vehicle.tire.a4},
                    {"a5", vehicle.tire.a5},
                    {"a6", vehicle.tire.a6},
                    {"a7", vehicle.tire.a7},
                    {"a8", vehicle.tire.a8}}}};
  j["simulation"] = {{"t0", simulation.t0},
                     {"t_f", simulation.t_f},
                     {"N", simulation.N},
                     {"rho", simulation.rho},
                     {"forward_speed", simulation.forward_speed}};
  j["steering"] = {{"profile", steering.profile},
                   {"scale", steering.scale},
                   {"fishhook",
                    {{"ramp_start", steering.fishhook.ramp_start},
                     {"ramp_time", steering.fishhook.ramp_time},
                     {"peak_deg", steering.fishhook.peak_deg},
                     {"dwell", steering.fishhook.dwell},
                     {"reversal_time", steering.fishhook.reversal_time},
                     {"reverse_deg", steering.fishhook.reverse_deg}}}};
  json bps = json::array();
  for (const auto& [t, deg] : steering.breakpoints) bps.push_back({t, deg});
  j["steering"]["breakpoints"] = bps;
  j["scenario"] = {{"constraints", to_string(scenario.constraints)},
                   {"forces", to_string(scenario.forces)},
                   {"guess",
                    scenario.guess == InitialGuessSpec::Kind::zero ? "zero" : "constant"},
                   {"guess_force", scenario.guess_force},
                   {"tire_smoothing_width", scenario.tire_smoothing_width},
                   {"phi_bound", scenario.phi_bound},
                   {"theta_cap", scenario.theta_cap}};
  j["solver"] = {{"kkt_tol", solver.kkt_tol},
                 {"feas_tol", solver.feas_tol},
                 {"max_iter", solver.max_iter}};
  j["control"] = {{"phi3", control.phi3 ? json(*control.phi3) : json(nullptr)}};
  if (sweep) {
    j["sweep"] = {{"parameter", sweep->parameter},
                  {"values", sweep->values},
                  {"parallelism", sweep->parallelism}};
  } else {
    j["sweep"] = nullptr;
  }
  j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
  j["seed"] = seed;
  return j;
}

}  // namespace antiroll
