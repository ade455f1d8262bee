#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "robest/bounds.hpp"
#include "robest/config.hpp"
#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/metric.hpp"
#include "robest/report.hpp"
#include "robest/run.hpp"
#include "robest/scenarios.hpp"

namespace py = pybind11;
using namespace robest;

namespace {

Scenario scenario_from_spec(const std::string& spec) {
    const auto j = nlohmann::json::parse(spec);
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name.rfind("preset:", 0) == 0) name.erase(0, 7);
        return paper_scenario(name);
    }
    return scenario_from_json(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sensitivity bounds and robustness metrics for parameter-dependent LTI estimators";

    static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
    static py::exception<NumericalError>    numerical(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const PreconditionError& e) {
            py::set_error(precondition, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const nlohmann::json::exception& e) {
            py::set_error(precondition, e.what());
        }
    });

    m.def("expm", &expm, py::arg("A"));
    m.def("expm_param_derivative", &expm_param_derivative, py::arg("A"), py::arg("E"), py::arg("t"));
    m.def("sym_eig_max", &sym_eig_max, py::arg("S"));
    m.def("norm2", &norm2, py::arg("M"));
    m.def("spectral_abscissa", &spectral_abscissa, py::arg("A"));
    m.def(
        "log_norm", [](const Matrix& A) { return log_norm(A).mu; }, py::arg("A"),
        "Largest eigenvalue of (A + A^T)/2.");
    m.def(
        "lyap_observability",
        [](const Matrix& A, const Matrix& Q) {
            const auto s = lyap_observability(A, Q);
            return py::make_tuple(s.P, s.residual);
        },
        py::arg("Abar"), py::arg("Q"), "Returns (P, residual) for A^T P + P A = -Q.");
    m.def("gramian_finite", &gramian_finite, py::arg("Abar"), py::arg("Cbar"), py::arg("horizon"));
    m.def(
        "decay_integrals",
        [](double mu_abs) {
            const auto a = appendixA_integrals(mu_abs);
            return py::make_tuple(a.I3, a.I2, a.I2_half);
        },
        py::arg("mu_abs"));
    m.def(
        "theorem1_constants",
        [](const Matrix& C, const Vector& x0, double mu) {
            const auto k = theorem1_constants(C, x0, mu);
            return py::make_tuple(k.K1, k.K2, k.K3);
        },
        py::arg("Cbar"), py::arg("xbar0"), py::arg("mu"));

    m.def(
        "robustness_distance",
        [](const std::vector<std::tuple<double, double, double>>& terms, bool perfect_estimator_is_robust) {
            std::vector<DistanceTerm> ts;
            for (const auto& [theta, sens, err] : terms) ts.push_back({theta, sens, err});
            MetricOptions opt;
            opt.perfect_estimator_is_robust = perfect_estimator_is_robust;
            return robustness_distance(ts, opt);
        },
        py::arg("terms"), py::arg("perfect_estimator_is_robust") = false,
        "terms: iterable of (theta_star, sens_norm, err_norm).");
    m.def("robustness_metric", &robustness_metric, py::arg("d_R"));

    m.def("preset_names", [] {
        std::vector<std::string> names;
        for (const auto& s : paper_scenarios()) names.push_back(s.name);
        return names;
    });
    m.def(
        "_analyze",
        [](const std::string& spec, const std::string& mode, bool theorem2_strict) {
            AnalysisOptions opt;
            opt.mode            = analysis_mode_from_string(mode);
            opt.theorem2_strict = theorem2_strict;
            const Scenario sc   = scenario_from_spec(spec);
            py::gil_scoped_release release;
            return to_json(analyze_scenario(sc, opt)).dump();
        },
        py::arg("spec"), py::arg("mode") = "precond", py::arg("theorem2_strict") = true);
    m.def(
        "_run",
        [](const std::string& config, const std::string& out_dir) {
            RunConfig cfg = run_config_from_json(nlohmann::json::parse(config));
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            py::gil_scoped_release release;
            const RunSummary summary = run(cfg);
            std::vector<std::string> paths;
            for (const auto& p : summary.artifacts) paths.push_back(p.string());
            return paths;
        },
        py::arg("config"), py::arg("out_dir") = "");
}
