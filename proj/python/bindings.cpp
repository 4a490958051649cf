#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "antiroll/alpha_method.hpp"
#include "antiroll/closed_loop.hpp"
#include "antiroll/disjunction.hpp"
#include "antiroll/rollover.hpp"
#include "antiroll/synthesis.hpp"
#include "antiroll/transcription.hpp"
#include "antiroll/vehicle.hpp"

namespace py = pybind11;
using namespace antiroll;

namespace {

std::vector<double> grid_times(double t0, double t_f, int n) {
  Grid g{t0, t_f, n};
  g.validate();
  return g.times();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rollover-preventive active-suspension force computation";

  py::register_exception<Error>(m, "AntirollError");

  py::class_<TireConstants>(m, "TireConstants")
      .def(py::init<>())
      .def_readwrite("C_T", &TireConstants::C_T)
      .def_readwrite("delta_S_h", &TireConstants::delta_S_h)
      .def_readwrite("a1", &TireConstants::a1)
      .def_readwrite("a2", &TireConstants::a2)
      .def_readwrite("a3", &TireConstants::a3)
      .def_readwrite("a4", &TireConstants::a4)
      .def_readwrite("a5", &TireConstants::a5)
      .def_readwrite("a6", &TireConstants::a6)
      .def_readwrite("a7", &TireConstants::a7)
      .def_readwrite("a8", &TireConstants::a8);

  py::class_<VehicleConfig>(m, "VehicleConfig")
      .def(py::init<>())
      .def_readwrite("M", &VehicleConfig::M)
      .def_readwrite("T", &VehicleConfig::T)
      .def_readwrite("K", &VehicleConfig::K)
      .def_readwrite("C", &VehicleConfig::C)
      .def_readwrite("I_XX", &VehicleConfig::I_XX)
      .def_readwrite("I_ZZ", &VehicleConfig::I_ZZ)
      .def_readwrite("a", &VehicleConfig::a)
      .def_readwrite("b", &VehicleConfig::b)
      .def_readwrite("g", &VehicleConfig::g)
      .def_readwrite("mu", &VehicleConfig::mu)
      .def_readwrite("Z0", &VehicleConfig::Z0)
      .def_readwrite("Z_min", &VehicleConfig::Z_min)
      .def_readwrite("Z_max", &VehicleConfig::Z_max)
      .def_readwrite("F_max", &VehicleConfig::F_max)
      .def_readwrite("tire", &VehicleConfig::tire)
      .def("validate", &VehicleConfig::validate)
      .def("front_static_load", &VehicleConfig::front_static_load)
      .def("rear_static_load", &VehicleConfig::rear_static_load);

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def_readwrite("X", &VehicleState::X)
      .def_readwrite("Y", &VehicleState::Y)
      .def_readwrite("Z", &VehicleState::Z)
      .def_readwrite("theta_X", &VehicleState::theta_X)
      .def_readwrite("theta_Z", &VehicleState::theta_Z)
      .def_readwrite("X_dot", &VehicleState::X_dot)
      .def_readwrite("Y_dot", &VehicleState::Y_dot)
      .def_readwrite("Z_dot", &VehicleState::Z_dot)
      .def_readwrite("theta_X_dot", &VehicleState::theta_X_dot)
      .def_readwrite("theta_Z_dot", &VehicleState::theta_Z_dot)
      .def("to_vector", &VehicleState::to_vector)
      .def_static("from_vector",
                  [](const Vec10& v) { return VehicleState::from_vector(v); });

  py::class_<ControlInput>(m, "ControlInput")
      .def(py::init<>())
      .def(py::init([](double F_l, double F_r) {
             return ControlInput{F_l, F_r};
           }),
           py::arg("F_l"), py::arg("F_r"))
      .def_readwrite("F_l", &ControlInput::F_l)
      .def_readwrite("F_r", &ControlInput::F_r);

  py::class_<SteeringProfile::FishhookParams>(m, "FishhookParams")
      .def(py::init<>())
      .def_readwrite("ramp_start", &SteeringProfile::FishhookParams::ramp_start)
      .def_readwrite("ramp_time", &SteeringProfile::FishhookParams::ramp_time)
      .def_readwrite("peak_deg", &SteeringProfile::FishhookParams::peak_deg)
      .def_readwrite("dwell", &SteeringProfile::FishhookParams::dwell)
      .def_readwrite("reversal_time", &SteeringProfile::FishhookParams::reversal_time)
      .def_readwrite("reverse_deg", &SteeringProfile::FishhookParams::reverse_deg);

  py::class_<SteeringProfile>(m, "SteeringProfile")
      .def_static("straight", &SteeringProfile::straight, py::arg("t0"), py::arg("t_f"))
      .def_static("from_breakpoints", &SteeringProfile::from_breakpoints)
      .def_static("fishhook", &SteeringProfile::fishhook, py::arg("params"), py::arg("t0"),
                  py::arg("t_f"))
      .def("angle_deg", &SteeringProfile::angle_deg)
      .def("angle_rad", &SteeringProfile::angle_rad)
      .def("breakpoints", &SteeringProfile::breakpoints);

  m.def("initial_state", &initial_state, py::arg("config"),
        py::arg("forward_speed") = 200.0 / 9.0);
  m.def("wheel_reactions", &wheel_reactions, py::arg("config"), py::arg("state"),
        py::arg("control"));
  m.def("slip_angle_deg", &slip_angle_deg, py::arg("config"), py::arg("state"),
        py::arg("delta_rad"), py::arg("wheel"));
  m.def("tire_lateral_force", &tire_lateral_force, py::arg("config"), py::arg("F_Z"),
        py::arg("alpha_deg"));
  m.def("tire_lateral_force_smoothed", &tire_lateral_force_smoothed, py::arg("config"),
        py::arg("F_Z"), py::arg("alpha_deg"), py::arg("width"));
  m.def(
      "dynamics_rhs",
      [](const VehicleConfig& cfg, const VehicleState& s, const ControlInput& u,
         double delta_rad, double width) { return dynamics_rhs(cfg, s, u, delta_rad, width); },
      py::arg("config"), py::arg("state"), py::arg("control"), py::arg("delta_rad"),
      py::arg("tire_smoothing_width") = 0.0);
  m.def("grid_times", &grid_times, py::arg("t0"), py::arg("t_f"), py::arg("N"));

  m.def("hull_residual",
        [](const Vec& f, const Vec& lam) { return hull_residual(f, lam); });
  m.def("feasible_weight", [](const Vec& f) { return feasible_weight(f); });
  m.def("exclusive_residuals",
        [](const Eigen::Vector2d& f, const Eigen::Vector2d& lam, const Eigen::Vector2d& pi) {
          return exclusive_residuals(f, lam, pi);
        });

  py::class_<AlphaParams>(m, "AlphaParams")
      .def_readonly("rho", &AlphaParams::rho)
      .def_readonly("gamma", &AlphaParams::gamma)
      .def_readonly("beta", &AlphaParams::beta);
  m.def("alpha_params", &alpha_params, py::arg("rho"));
  m.def(
      "alpha_integrate",
      [](const AlphaParams& p, const std::function<Vec(const Vec&, double)>& rhs, const Vec& x0,
         std::optional<Vec> a0, const std::vector<double>& grid) {
        const AlphaTrajectory traj = alpha_integrate(p, rhs, x0, a0, grid);
        return py::make_tuple(traj.t, traj.x, traj.a);
      },
      py::arg("params"), py::arg("rhs"), py::arg("x0"), py::arg("a0"), py::arg("grid"));

  m.def("rollover_index", &rollover_index, py::arg("wheel_loads"));

  py::class_<ClosedLoopResult>(m, "ClosedLoopResult")
      .def_readonly("t", &ClosedLoopResult::t)
      .def_readonly("F_l", &ClosedLoopResult::F_l)
      .def_readonly("F_r", &ClosedLoopResult::F_r)
      .def_readonly("all_satisfied", &ClosedLoopResult::all_satisfied)
      .def_readonly("max_abs_force", &ClosedLoopResult::max_abs_force)
      .def_readonly("roll_singularity", &ClosedLoopResult::roll_singularity)
      .def_property_readonly("max_abs_R",
                             [](const ClosedLoopResult& r) {
                               return r.rollover.summary.max_abs_R;
                             })
      .def_property_readonly("stabilized",
                             [](const ClosedLoopResult& r) {
                               return r.rollover.summary.stabilized;
                             })
      .def_property_readonly("states", [](const ClosedLoopResult& r) {
        std::vector<Vec10> out;
        for (const auto& s : r.states) out.push_back(s.to_vector());
        return out;
      });

  m.def(
      "simulate",
      [](const VehicleConfig& cfg, double phi3, const SteeringProfile& steer,
         const std::vector<double>& grid, const std::string& integrator) {
        ClosedLoopOptions opts;
        if (integrator == "rk4")
          opts.integrator = LoopIntegrator::rk4;
        else if (integrator != "alpha")
          raise(ErrorCode::invalid_parameter, "integrator must be 'alpha' or 'rk4'");
        return simulate(cfg, phi3, steer, grid, opts);
      },
      py::arg("config"), py::arg("phi3"), py::arg("steering"), py::arg("grid"),
      py::arg("integrator") = "alpha");
}
