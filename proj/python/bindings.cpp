#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "biofilm/certificate.hpp"
#include "biofilm/config.hpp"
#include "biofilm/kernel_suite.hpp"
#include "biofilm/kernels.hpp"
#include "biofilm/oracle.hpp"
#include "biofilm/output.hpp"

namespace py = pybind11;
using namespace biofilm;

namespace {

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::list arrays(const std::vector<std::vector<double>>& v) {
  py::list out;
  for (const auto& x : v) out.append(array(x));
  return out;
}

py::dict frame_dict(const Frame& f) {
  py::dict d;
  d["t"] = f.t;
  d["L"] = f.L;
  d["z"] = array(f.z);
  d["z0"] = array(f.z0);
  d["u"] = array(f.u);
  d["X"] = arrays(f.X);
  d["f"] = arrays(f.f);
  d["C"] = arrays(f.C);
  return d;
}

py::dict step_dict(const StepRecord& s) {
  py::dict d;
  d["t"] = s.t;
  d["dt"] = s.dt;
  d["L"] = s.L;
  d["Ldot"] = s.Ldot;
  d["theta"] = s.theta;
  d["phi"] = s.phi;
  d["rho"] = s.rho;
  d["iterations"] = s.iterations;
  d["max_ratio"] = s.max_ratio;
  d["boundary_residual"] = s.boundary_residual;
  d["flux_residual"] = s.flux_residual;
  d["halvings"] = s.halvings;
  d["rebaselined"] = s.rebaselined;
  return d;
}

SimulationConfig with_mode(SimulationConfig cfg, const std::string& mode) {
  if (mode.empty()) return cfg;
  if (mode != "image-corrected" && mode != "paper-literal")
    throw SolverError(ErrorCode::ValidationError, "mode must be image-corrected or paper-literal");
  cfg.problem.mode = mode == "paper-literal" ? RepresentationMode::paper_literal : RepresentationMode::image_corrected;
  cfg.problem.quadrature.mode = cfg.problem.mode;
  cfg.problem.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(biofilm_fbp, m) {
  m.doc() = "Free-boundary biofilm solver";
  m.attr("__version__") = kToolVersion;

  static py::exception<SolverError> solver_error(m, "SolverError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SolverError& e) {
      py::object err = solver_error;
      py::object inst = err(e.what());
      inst.attr("code") = to_string(e.code());
      PyErr_SetObject(solver_error.ptr(), inst.ptr());
    }
  });

  py::class_<SimulationConfig>(m, "Config")
      .def_property_readonly("L0", [](const SimulationConfig& c) { return c.problem.L0; })
      .def_property_readonly("n", [](const SimulationConfig& c) { return c.problem.kinetics.n; })
      .def_property_readonly("m", [](const SimulationConfig& c) { return c.problem.kinetics.m; })
      .def_property("dt", [](const SimulationConfig& c) { return c.march.dt; },
                    [](SimulationConfig& c, double v) { c.march.dt = v; })
      .def_property("t_end", [](const SimulationConfig& c) { return c.march.t_end; },
                    [](SimulationConfig& c, double v) {
                      c.march.t_end = v;
                      c.oracle.t_end = v;
                    })
      .def_property_readonly("mode", [](const SimulationConfig& c) { return std::string(to_string(c.problem.mode)); })
      .def_property_readonly("defaulted", [](const SimulationConfig& c) { return c.defaulted; })
      .def_property_readonly("hash", [](const SimulationConfig& c) { return config_hash(c); })
      .def("serialize", &serialize_config);

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  m.def(
      "simulate",
      [](const SimulationConfig& cfg, const std::string& mode, const std::string& out) {
        auto c = with_mode(cfg, mode);
        c.march.threads = thread_cap(c.problem.kinetics.m);
        SimulationOutput res;
        {
          py::gil_scoped_release release;
          res = run_simulation(c.problem, c.march);
          if (!out.empty()) write_output(res, c.problem, out, c.output.format, make_provenance(c));
        }
        py::list frames, steps;
        for (const auto& f : res.frames) frames.append(frame_dict(f));
        for (const auto& s : res.steps) steps.append(step_dict(s));
        py::dict d;
        d["frames"] = frames;
        d["steps"] = steps;
        d["config_hash"] = config_hash(c);
        return d;
      },
      py::arg("config"), py::arg("mode") = "", py::arg("out") = "",
      "March the configured problem; writes profile files when `out` is given.");

  m.def(
      "certify",
      [](const SimulationConfig& cfg) {
        const auto r = compute_certificate(cfg.problem);
        py::dict d;
        d["verdict"] = to_string(r.verdict);
        d["failed"] = r.failed;
        d["lambda"] = r.lambda;
        d["M"] = r.M;
        d["K1"] = r.K1;
        d["K2"] = r.K2;
        d["lipschitz"] = r.lipschitz;
        d["velocity_bound"] = r.velocity_bound;
        d["M_terms"] = std::vector<double>(std::begin(r.Mterms), std::end(r.Mterms));
        d["K2_terms"] = std::vector<double>(std::begin(r.K2terms), std::end(r.K2terms));
        d["report"] = format_report(r);
        return d;
      },
      py::arg("config"));

  m.def(
      "verify_kernels",
      [](std::uint64_t seed, int samples) {
        py::list out;
        for (const auto& c : kernels::run_kernel_suite(seed, samples)) {
          py::dict d;
          d["name"] = c.name;
          d["measured"] = c.measured;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 20240611, py::arg("samples") = 200);

  m.def(
      "compare_oracle",
      [](const SimulationConfig& cfg) {
        SimulationConfig c = cfg;
        const double ratio = c.march.dt * c.march.output_stride / c.oracle.dt;
        c.oracle.output_stride = std::abs(ratio - std::round(ratio)) < 1e-9 * ratio ? std::max(1, (int)std::round(ratio)) : 1;
        OracleComparison cmp;
        {
          py::gil_scoped_release release;
          const auto ie = run_simulation(c.problem, c.march);
          const auto oracle = solve_front_fixed(c.problem, c.oracle);
          cmp = compare_with_oracle(c.problem, ie, oracle);
        }
        py::dict d;
        d["S_diff"] = cmp.S_diff;
        d["L_diff"] = cmp.L_diff;
        d["t_worst_S"] = cmp.t_worst_S;
        d["t_worst_L"] = cmp.t_worst_L;
        d["frames"] = cmp.frames;
        return d;
      },
      py::arg("config"));

  m.def(
      "heat_kernel",
      [](double z, double t, double xi, double tau, double D) { return kernels::eval_K({z, t, xi, tau}, D); },
      py::arg("z"), py::arg("t"), py::arg("xi"), py::arg("tau"), py::arg("D") = 1.0);
}
