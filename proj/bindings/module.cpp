#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrob/distribution.hpp"
#include "qrob/metrics.hpp"
#include "qrob/numerics.hpp"
#include "qrob/risk.hpp"
#include "qrob/robustness.hpp"

namespace py = pybind11;
using namespace qrob;

PYBIND11_MODULE(_qrob, m) {
    m.doc() = "probability metrics, risk functionals and robustness checks";

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream_id") = 0)
        .def("next_uniform01", &RngStream::next_uniform01)
        .def("next_u64", &RngStream::next_u64);

    py::class_<GaugeFunction>(m, "GaugeFunction")
        .def_static("abs_pow", &GaugeFunction::abs_pow, py::arg("p"))
        .def_static("phi_p", &GaugeFunction::phi_p, py::arg("p"))
        .def_static("max_one_pow", &GaugeFunction::max_one_pow, py::arg("p"))
        .def_static("u_shaped_table", &GaugeFunction::u_shaped_table,
                    py::arg("breakpoints"), py::arg("values"))
        .def("__call__", &GaugeFunction::operator())
        .def_property_readonly("growth_order", &GaugeFunction::growth_order)
        .def_property_readonly("is_u_shaped", &GaugeFunction::is_u_shaped);

    py::class_<Distribution>(m, "Distribution")
        .def_static("dirac", &Distribution::dirac, py::arg("c"))
        .def_static("uniform", &Distribution::uniform, py::arg("a"), py::arg("b"))
        .def_static("normal", &Distribution::normal, py::arg("mu"), py::arg("sigma"))
        .def_static("pareto", &Distribution::pareto, py::arg("scale"), py::arg("alpha"),
                    py::arg("reflected") = false)
        .def_static(
            "empirical",
            [](std::vector<double> samples) {
                return Distribution::empirical(std::move(samples));
            },
            py::arg("samples"))
        .def_static("mixture", &Distribution::mixture, py::arg("weight"),
                    py::arg("left"), py::arg("right"))
        .def("cdf", &Distribution::cdf)
        .def("cdf_left", &Distribution::cdf_left)
        .def("quantile", &Distribution::quantile)
        .def(
            "sample",
            [](const Distribution& d, std::size_t n, std::uint64_t seed,
               std::uint64_t stream_id) {
                RngStream rng(seed, stream_id);
                return d.sample(n, rng);
            },
            py::arg("n"), py::arg("seed"), py::arg("stream_id") = 0)
        .def_property_readonly("finite_moment_order", &Distribution::finite_moment_order)
        .def("has_finite_moment", &Distribution::has_finite_moment)
        .def("__repr__", &Distribution::describe);

    m.def("contaminate", &contaminate, py::arg("base"), py::arg("eps"), py::arg("noise"));
    m.def("is_admissible", &is_admissible, py::arg("dist"), py::arg("p"));
    m.def("moment", &moment, py::arg("dist"), py::arg("phi"), py::arg("tol") = 1e-10);

    py::class_<MetricValue>(m, "MetricValue")
        .def_readonly("value", &MetricValue::value)
        .def_readonly("lo", &MetricValue::lo)
        .def_readonly("hi", &MetricValue::hi)
        .def_property_readonly("exactness", &MetricValue::exactness_str)
        .def("__float__", [](const MetricValue& v) { return v.value; })
        .def("__repr__", [](const MetricValue& v) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "MetricValue(%.12g, %s)", v.value,
                          v.exactness_str().c_str());
            return std::string(buf);
        });

    m.def("kantorovich", &kantorovich, py::arg("P"), py::arg("Q"), py::arg("tol") = 1e-9);
    m.def("fortet_mourier", &fortet_mourier, py::arg("P"), py::arg("Q"), py::arg("p"),
          py::arg("tol") = 1e-9);
    m.def("fortet_mourier_quadrature", &fortet_mourier_quadrature, py::arg("P"),
          py::arg("Q"), py::arg("p"), py::arg("tol") = 1e-9);
    m.def("kolmogorov", &kolmogorov, py::arg("P"), py::arg("Q"));
    m.def("weighted_kolmogorov", &weighted_kolmogorov, py::arg("P"), py::arg("Q"),
          py::arg("phi"));
    m.def("levy", &levy, py::arg("P"), py::arg("Q"), py::arg("tol") = 1e-6);
    m.def(
        "prokhorov",
        [](const Distribution& P, const Distribution& Q, double tol) {
            return prokhorov(P, Q, tol);
        },
        py::arg("P"), py::arg("Q"), py::arg("tol") = 1e-9);
    m.def("d_phi", &d_phi, py::arg("P"), py::arg("Q"), py::arg("phi"),
          py::arg("tol") = 1e-10);
    m.def(
        "bl_bracket",
        [](const Distribution& P, const Distribution& Q, double tol) {
            const auto* ep = P.as_empirical();
            const auto* eq = Q.as_empirical();
            if (!ep || !eq)
                throw std::invalid_argument("bl_bracket: needs empirical laws");
            return bl_bracket(*ep, *eq, tol);
        },
        py::arg("P"), py::arg("Q"), py::arg("tol") = 1e-9);

    py::class_<RiskFunctionalSpec>(m, "RiskFunctionalSpec")
        .def_static("expectation", &RiskFunctionalSpec::expectation)
        .def_static("cvar", &RiskFunctionalSpec::cvar, py::arg("tau"))
        .def_static("upper_semideviation", &RiskFunctionalSpec::upper_semideviation)
        .def_static(
            "oce_piecewise_linear",
            [](double gamma1, double gamma2) {
                return RiskFunctionalSpec::oce(PiecewiseLinearUtility{gamma1, gamma2});
            },
            py::arg("gamma1"), py::arg("gamma2"))
        .def_static("oce_quadratic",
                    [] { return RiskFunctionalSpec::oce(QuadraticUtility{}); })
        .def_static(
            "shortfall_deposit_insurance",
            [](double x0) {
                return RiskFunctionalSpec::shortfall(DepositInsuranceLoss{}, x0);
            },
            py::arg("x0"))
        .def_static(
            "shortfall_pth_power",
            [](double p, double x0) {
                return RiskFunctionalSpec::shortfall(PthPowerLoss{p}, x0);
            },
            py::arg("p"), py::arg("x0"))
        .def_static("pth_moment", &RiskFunctionalSpec::pth_moment, py::arg("p"))
        .def("__repr__", &RiskFunctionalSpec::name);

    py::class_<LipschitzCertificate>(m, "LipschitzCertificate")
        .def_readonly("L", &LipschitzCertificate::L)
        .def_readonly("p", &LipschitzCertificate::p)
        .def_readonly("iqr", &LipschitzCertificate::iqr)
        .def_readonly("conditions", &LipschitzCertificate::conditions);

    m.def("certificate", &certificate, py::arg("spec"));
    m.def("evaluate", &evaluate, py::arg("spec"), py::arg("G"), py::arg("tol") = 1e-10);

    py::class_<PairedSampleCheck>(m, "PairedSampleCheck")
        .def_readonly("lhs", &PairedSampleCheck::lhs)
        .def_readonly("rhs", &PairedSampleCheck::rhs)
        .def_readonly("holds", &PairedSampleCheck::holds)
        .def_readonly("condition_met", &PairedSampleCheck::condition_met)
        .def_readonly("scan_p", &PairedSampleCheck::scan_p);

    m.def(
        "paired_lipschitz_check",
        [](const RiskFunctionalSpec& spec, std::vector<double> samples,
           std::vector<double> perturbed, double tol) {
            return paired_lipschitz_check(spec, samples, perturbed, tol);
        },
        py::arg("spec"), py::arg("samples"), py::arg("perturbed"),
        py::arg("tol") = 1e-12);

    m.def(
        "estimator_law",
        [](const RiskFunctionalSpec& spec, const Distribution& dist, std::size_t N,
           std::size_t M, std::uint64_t seed, int threads) {
            return estimator_law(spec, dist, N, M, seed, threads).samples();
        },
        py::arg("spec"), py::arg("dist"), py::arg("N"), py::arg("M"), py::arg("seed"),
        py::arg("threads") = 1);

    py::class_<EstimatorLawReport>(m, "EstimatorLawReport")
        .def_readonly("d_input", &EstimatorLawReport::d_input)
        .def_readonly("d_estimator_laws", &EstimatorLawReport::d_estimator_laws)
        .def_readonly("bound", &EstimatorLawReport::bound)
        .def_readonly("gap_ratio", &EstimatorLawReport::gap_ratio)
        .def_readonly("mc_halfwidth", &EstimatorLawReport::mc_halfwidth)
        .def_readonly("condition_met", &EstimatorLawReport::condition_met);

    m.def("robustness_gap", &robustness_gap, py::arg("spec"), py::arg("P"), py::arg("Q"),
          py::arg("N"), py::arg("M"), py::arg("seed"), py::arg("tol") = 1e-10,
          py::arg("threads") = 1);

    py::class_<IqrScan>(m, "IqrScan")
        .def_readonly("p_grid", &IqrScan::p_grid)
        .def_readonly("violation_fraction", &IqrScan::violation_fraction)
        .def_readonly("checked", &IqrScan::checked)
        .def_readonly("reported_iqr", &IqrScan::reported_iqr);

    m.def("iqr_scan", &iqr_scan, py::arg("spec"), py::arg("trial_count"),
          py::arg("p_grid") = std::vector<double>{1.0, 1.25, 1.5, 2.0, 3.0},
          py::arg("seed") = 0, py::arg("max_n") = 50);
}
