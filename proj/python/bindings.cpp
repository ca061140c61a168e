#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stoplab/asymptotics.hpp"
#include "stoplab/dynamics.hpp"
#include "stoplab/experiments.hpp"
#include "stoplab/sampling.hpp"
#include "stoplab/spectral.hpp"
#include "stoplab/stopping.hpp"
#include "stoplab/validation.hpp"

namespace py = pybind11;
using namespace stoplab;

namespace {

ExperimentConfig config_from(const std::string& text) {
  return ExperimentConfig::from_json(text.empty() ? nlohmann::json::object()
                                                  : nlohmann::json::parse(text));
}

std::string run_command(const std::string& command, const std::string& config_text,
                        const std::string& format) {
  ExperimentConfig config = config_from(config_text);
  config.validate();
  const OutputFormat out = parse_format(format);
  py::gil_scoped_release release;
  if (command == "risk-curve") return render(run_risk_curve(config), out);
  if (command == "topt") return render(run_topt(config), out);
  if (command == "sweep") return render(run_sweep(config).table(), out);
  if (command == "bounds") return render(run_bounds(config), out);
  if (command == "asymptotic") return render(run_asymptotic(config), out);
  if (command == "discretization") return render(run_discretization(config), out);
  throw InvalidArgument("unknown command '" + command + "'");
}

}  // namespace

PYBIND11_MODULE(_stoplab, m) {
  m.doc() = "Optimal early stopping for gradient flow on linear least squares";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Setting>(m, "Setting").value("OVER", Setting::kOver).value("UNDER", Setting::kUnder);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](Setting setting, Index n, Index d, Index p, double theta_norm_sq,
                       double sigma_sq) {
             ModelSpec s{setting, n, d, p, theta_norm_sq, sigma_sq};
             s.validate();
             return s;
           }),
           py::arg("setting"), py::arg("n"), py::arg("d"), py::arg("p"),
           py::arg("theta_norm_sq") = 1.0, py::arg("sigma_sq") = 1.0)
      .def_readonly("setting", &ModelSpec::setting)
      .def_readonly("n", &ModelSpec::n)
      .def_readonly("d", &ModelSpec::d)
      .def_readonly("p", &ModelSpec::p)
      .def_readonly("theta_norm_sq", &ModelSpec::theta_norm_sq)
      .def_readonly("sigma_sq", &ModelSpec::sigma_sq);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &Spectrum::eigenvectors)
      .def_readonly("rank_mask", &Spectrum::rank_mask)
      .def("rank", &Spectrum::rank);

  m.def("sample_gaussian_matrix",
        [](Index n, Index d, std::uint64_t seed, std::uint64_t stream_id) {
          return sample_gaussian_matrix(n, d, RngStream{seed, stream_id});
        },
        py::arg("n"), py::arg("d"), py::arg("seed"), py::arg("stream_id") = 0);
  m.def("eigen_spectrum", [](const Matrix& x) { return eigen_spectrum(x); }, py::arg("x"));
  m.def("expected_risk_over", &expected_risk_over, py::arg("spectrum"), py::arg("spec"), py::arg("t"));
  m.def("risk_derivative_over", &risk_derivative_over, py::arg("spectrum"), py::arg("spec"),
        py::arg("t"));
  m.def("gradient_flow_beta", &gradient_flow_beta, py::arg("spectrum"), py::arg("x"), py::arg("y"),
        py::arg("t"));
  m.def("discretization_bound", &discretization_bound, py::arg("x"), py::arg("y"),
        py::arg("step_size"));

  py::class_<UnderRiskModel>(m, "UnderRiskModel")
      .def(py::init([](const ModelSpec& spec, Index trials, std::uint64_t seed) {
             return UnderRiskModel(spec, trials, RngStream{seed, 0});
           }),
           py::arg("spec"), py::arg("trials"), py::arg("seed"))
      .def("risk", [](const UnderRiskModel& m, double t) {
        const McEstimate e = m.risk(t);
        return py::make_tuple(e.estimate, e.std_error);
      })
      .def("derivative", [](const UnderRiskModel& m, double t) {
        const McEstimate e = m.derivative(t);
        return py::make_tuple(e.estimate, e.std_error);
      });

  py::class_<StoppingResult>(m, "StoppingResult")
      .def_readonly("t_opt", &StoppingResult::t_opt)
      .def_readonly("bracket_lower", &StoppingResult::bracket_lower)
      .def_readonly("bracket_upper", &StoppingResult::bracket_upper)
      .def_readonly("derivative_at_t_opt", &StoppingResult::derivative_at_t_opt);
  m.def("find_topt",
        [](const std::function<double(double)>& derivative, double t_scale) {
          return find_topt(derivative, t_scale);
        },
        py::arg("derivative"), py::arg("t_scale"));

  py::class_<BoundInterval>(m, "BoundInterval")
      .def_readonly("lower", &BoundInterval::lower)
      .def_readonly("upper", &BoundInterval::upper)
      .def_readonly("hypothesis_satisfied", &BoundInterval::hypothesis_satisfied)
      .def_readonly("hypothesis_note", &BoundInterval::hypothesis_note)
      .def_readonly("gamma", &BoundInterval::gamma);
  m.def("theorem1_bounds", &theorem1_bounds, py::arg("spec"));
  m.def("theorem2_bounds", &theorem2_bounds, py::arg("spec"));
  m.def("prop2_risk_bounds", [](const ModelSpec& spec) {
    const Prop2Bounds b = prop2_risk_bounds(spec);
    return py::make_tuple(b.lower, b.upper, b.ratio_ok);
  });
  m.def("wishart_moments", &wishart_moments, py::arg("m"), py::arg("big_n"));
  m.def("exact_wishart_moments", &exact_wishart_moments, py::arg("m"), py::arg("big_n"));

  m.def("mp_density", &mp_density, py::arg("gamma"), py::arg("lam"));
  m.def("asymptotic_risk_derivative",
        [](double gamma, double theta, double sigma, double t) {
          return asymptotic_risk_derivative(gamma, theta, sigma, t);
        },
        py::arg("gamma"), py::arg("theta_norm_sq"), py::arg("sigma_sq"), py::arg("t"));

  m.def("run", &run_command, py::arg("command"), py::arg("config_json") = "",
        py::arg("format") = "json");
  m.def("validate",
        [](const std::string& config_text) {
          const ExperimentConfig config = config_from(config_text);
          py::gil_scoped_release release;
          return run_validation(config).to_json().dump();
        },
        py::arg("config_json") = "");
  m.def("check_names", &validation_check_names);
  m.attr("schema_version") = kSchemaVersion;
}
