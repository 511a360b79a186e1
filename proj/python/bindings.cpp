#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cmwave/config.hpp"
#include "cmwave/packet.hpp"
#include "cmwave/runner.hpp"
#include "cmwave/trajectories.hpp"
#include "cmwave/verify.hpp"

namespace py = pybind11;
using namespace cmwave;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class F>
py::array_t<double> map_real(const RealArray& xs, F&& f) {
  auto in = xs.unchecked<1>();
  py::array_t<double> out(in.shape(0));
  auto o = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < in.shape(0); ++i) o(i) = f(in(i));
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<std::complex<double>> to_array(const std::vector<std::complex<double>>& v) {
  return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(v.size()), v.data());
}

ResidualFunction residual_by_name(const std::string& name) {
  if (name == "schrodinger") return schrodinger_residual;
  if (name == "continuity") return continuity_residual;
  if (name == "euler") return euler_residual;
  if (name == "newton") return newton_residual;
  if (name == "madelung_imaginary") return madelung_imaginary_residual;
  if (name == "madelung_real") return madelung_real_residual;
  throw Error(ErrorCode::InvalidArgument, "equation", "unknown equation '" + name + "'");
}

py::dict report_dict(const ResidualReport& r) {
  py::dict d;
  d["equation"] = std::string(to_string(r.equation));
  d["t"] = r.t;
  d["h"] = r.grid.spacing();
  d["h_t"] = r.h_t;
  d["l2"] = r.l2;
  d["max"] = r.max;
  d["scale"] = r.scale;
  d["rel_l2"] = r.rel_l2;
  d["rel_max"] = r.rel_max;
  d["order"] = r.order ? py::cast(*r.order) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Continuously measured Gaussian wave packets: envelope, packet, trajectories, checks";

  // Leaked on purpose: the type must outlive every translated exception.
  static PyObject* error_type = py::exception<Error>(mod, "Error", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      err.attr("field") = e.field();
      err.attr("is_validation") = is_validation_error(e.code());
      PyErr_SetObject(error_type, err.ptr());
    }
  });

  py::class_<PhysicalParams>(mod, "PhysicalParams")
      .def(py::init([](double m, double hbar, double tau, bool measurement_off, double lambda,
                       const std::string& omega, const std::string& drive) {
             PhysicalParams p;
             p.m = m;
             p.hbar = hbar;
             p.tau = tau;
             p.measurement_off = measurement_off;
             p.lambda = lambda;
             p.omega = parse_frequency(omega);
             p.drive = parse_drive(drive);
             return p;
           }),
           py::kw_only(), py::arg("m") = 1.0, py::arg("hbar") = 1.0, py::arg("tau") = 1.0,
           py::arg("measurement_off") = false, py::arg("coupling") = 0.0,
           py::arg("omega") = "constant:0", py::arg("drive") = "zero")
      .def_readwrite("m", &PhysicalParams::m)
      .def_readwrite("hbar", &PhysicalParams::hbar)
      .def_readwrite("tau", &PhysicalParams::tau)
      .def_readwrite("measurement_off", &PhysicalParams::measurement_off)
      .def_readwrite("coupling", &PhysicalParams::lambda)
      .def_property(
          "omega", [](const PhysicalParams& p) { return format_schedule(p.omega); },
          [](PhysicalParams& p, const std::string& s) { p.omega = parse_frequency(s); })
      .def_property(
          "drive", [](const PhysicalParams& p) { return format_schedule(p.drive); },
          [](PhysicalParams& p, const std::string& s) { p.drive = parse_drive(s); })
      .def("omega_at", &PhysicalParams::omega_at)
      .def("drive_at", &PhysicalParams::drive_at)
      .def("is_free", &PhysicalParams::is_free)
      .def("__eq__", [](const PhysicalParams& a, const PhysicalParams& b) { return a == b; });

  py::class_<InitialConditions>(mod, "InitialConditions")
      .def(py::init([](double x0, double v0, double a0, double b0) { return InitialConditions{x0, v0, a0, b0}; }),
           py::kw_only(), py::arg("x0") = 0.0, py::arg("v0") = 0.0, py::arg("a0") = 1.0,
           py::arg("b0") = 0.0)
      .def_readwrite("x0", &InitialConditions::x0)
      .def_readwrite("v0", &InitialConditions::v0)
      .def_readwrite("a0", &InitialConditions::a0)
      .def_readwrite("b0", &InitialConditions::b0);

  mod.def("validate", [](const PhysicalParams& p, const InitialConditions& ic) { validate(p, ic); },
          "Raise cmwave.Error when the parameters are inadmissible");
  mod.def("steady_width", &steady_width, "Stationary width for constant Omega, or None");

  py::class_<EnvelopeState>(mod, "EnvelopeState")
      .def_readonly("t", &EnvelopeState::t)
      .def_readonly("q", &EnvelopeState::q)
      .def_readonly("qdot", &EnvelopeState::qdot)
      .def_readonly("delta", &EnvelopeState::delta)
      .def_readonly("deltadot", &EnvelopeState::deltadot)
      .def_readonly("s0", &EnvelopeState::s0)
      .def("__repr__", [](const EnvelopeState& s) {
        std::ostringstream o;
        o.precision(17);
        o << "EnvelopeState(t=" << s.t << ", q=" << s.q << ", qdot=" << s.qdot << ", delta=" << s.delta
          << ", deltadot=" << s.deltadot << ", s0=" << s.s0 << ")";
        return o.str();
      });

  py::class_<EnvelopeSolution>(mod, "EnvelopeSolution")
      .def_property_readonly("t_end", &EnvelopeSolution::t_end)
      .def_property_readonly("params", &EnvelopeSolution::params)
      .def("state_at", &EnvelopeSolution::state_at, py::arg("t"))
      .def("uniform", [](const EnvelopeSolution& sol) {
        py::dict d;
        const auto states = sol.uniform_samples();
        std::vector<double> cols[6];
        for (const auto& s : states) {
          cols[0].push_back(s.t);
          cols[1].push_back(s.q);
          cols[2].push_back(s.qdot);
          cols[3].push_back(s.delta);
          cols[4].push_back(s.deltadot);
          cols[5].push_back(s.s0);
        }
        const char* names[] = {"t", "q", "qdot", "delta", "deltadot", "s0"};
        for (int i = 0; i < 6; ++i) d[names[i]] = to_array(cols[i]);
        return d;
      }, "Uniform output samples as a dict of numpy arrays");

  mod.def(
      "integrate",
      [](const PhysicalParams& p, const InitialConditions& ic, double t_end, double rtol, double atol,
         std::size_t samples, double delta_min) {
        SolverControls c;
        c.rtol = rtol;
        c.atol = atol;
        c.uniform_samples = samples;
        c.delta_min = delta_min;
        py::gil_scoped_release release;
        return integrate(p, ic, t_end, c);
      },
      py::arg("params"), py::arg("ic"), py::arg("t_end"), py::arg("rtol") = 1e-10,
      py::arg("atol") = 1e-12, py::arg("samples") = 201, py::arg("delta_min") = kDefaultDeltaMin);

  py::class_<SpatialGrid>(mod, "SpatialGrid")
      .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"), py::arg("n"))
      .def_static("centered", &SpatialGrid::centered)
      .def_static("around", &SpatialGrid::around, py::arg("state"), py::arg("window") = 10.0,
                  py::arg("n") = 2001)
      .def_property_readonly("x_min", &SpatialGrid::x_min)
      .def_property_readonly("x_max", &SpatialGrid::x_max)
      .def_property_readonly("size", &SpatialGrid::size)
      .def_property_readonly("spacing", &SpatialGrid::spacing)
      .def("points", [](const SpatialGrid& g) { return to_array(g.points()); })
      .def("refined", &SpatialGrid::refined, py::arg("factor") = 2);

  mod.def("density", [](const EnvelopeState& s, const RealArray& x) {
    return map_real(x, [&](double v) { return density(s, v); });
  });
  mod.def("phase", [](const EnvelopeState& s, const RealArray& x, const PhysicalParams& p) {
    return map_real(x, [&](double v) { return phase(s, v, p); });
  });
  mod.def("velocity_field", [](const EnvelopeState& s, const RealArray& x, const PhysicalParams& p) {
    return map_real(x, [&](double v) { return velocity_field(s, v, p); });
  });
  mod.def("quantum_potential", [](const EnvelopeState& s, const RealArray& x, const PhysicalParams& p) {
    return map_real(x, [&](double v) { return quantum_potential_closed(s, v, p); });
  });
  mod.def("quantum_potential_fd", [](const EnvelopeState& s, const SpatialGrid& g, const PhysicalParams& p) {
    return to_array(quantum_potential_fd(s, g, p));
  });
  mod.def("sample_packet", [](const EnvelopeState& s, const SpatialGrid& g, const PhysicalParams& p) {
    return to_array(sample_packet(s, g, p).values);
  });

  mod.def("stretch_factor", &stretch_factor, py::arg("solution"), py::arg("t"));
  mod.def("trajectory_closed", &trajectory_closed, py::arg("solution"), py::arg("seed"), py::arg("t"));
  mod.def(
      "trajectory_integrated",
      [](const EnvelopeSolution& sol, double seed, const std::vector<double>& times, double rtol,
         double atol) { return to_array(trajectory_integrated(sol, seed, times, rtol, atol)); },
      py::arg("solution"), py::arg("seed"), py::arg("times"), py::arg("rtol") = 1e-10,
      py::arg("atol") = 1e-12);

  mod.def("reference_grid", &reference_grid, py::arg("state"), py::arg("window") = 10.0);
  mod.def("default_time_step", &default_time_step);
  mod.def(
      "residual",
      [](const EnvelopeSolution& sol, const std::string& equation, const SpatialGrid& g, double t,
         double h_t) { return report_dict(residual_by_name(equation)(sol, g, t, h_t)); },
      py::arg("solution"), py::arg("equation"), py::arg("grid"), py::arg("t"), py::arg("h_t"));
  mod.def(
      "convergence_study",
      [](const EnvelopeSolution& sol, const std::string& equation, const SpatialGrid& g, double t,
         double h_t, std::size_t levels) {
        const auto study = convergence_study(residual_by_name(equation), sol, g, t, h_t, levels);
        py::list out;
        for (const auto& r : study.levels) out.append(report_dict(r));
        return out;
      },
      py::arg("solution"), py::arg("equation"), py::arg("grid"), py::arg("t"), py::arg("h_t"),
      py::arg("levels") = 3);
  mod.def("source_integral", &source_integral);
  mod.def(
      "fourier_free_packet",
      [](const SpatialGrid& g, const std::vector<std::complex<double>>& psi0, double t,
         const PhysicalParams& p) {
        return to_array(fourier_free_packet(PacketField{g, 0.0, psi0}, t, p).values);
      },
      py::arg("grid"), py::arg("psi0"), py::arg("t"), py::arg("params"));

  py::class_<ExperimentConfig>(mod, "ExperimentConfig")
      .def_readonly("params", &ExperimentConfig::params)
      .def_readonly("ic", &ExperimentConfig::ic)
      .def_readonly("t_end", &ExperimentConfig::t_end)
      .def_readonly("samples", &ExperimentConfig::samples)
      .def_readonly("output_dir", &ExperimentConfig::output_dir)
      .def_property_readonly("outputs",
                             [](const ExperimentConfig& c) {
                               std::vector<std::string> out;
                               for (auto o : c.outputs) out.emplace_back(to_string(o));
                               return out;
                             })
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; });
  mod.def("parse_config", &parse_config, py::arg("text"));
  mod.def("serialize_config", &serialize_config, py::arg("config"));
  mod.def("default_config_text", &default_config_text);
  mod.def(
      "run",
      [](const std::string& text, bool verify, const std::string& output_dir) {
        std::ostringstream out, err;
        const int code = run_document(text, verify ? RunMode::Verify : RunMode::Simulate, output_dir, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("text"), py::arg("verify") = false, py::arg("output_dir") = "",
      "Run a config document like the CLI; returns (exit_code, stdout, stderr)");
}
