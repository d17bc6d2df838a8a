#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/functional.h>

#include "reflectionless/cli.hpp"
#include "reflectionless/errors.hpp"
#include "reflectionless/identities.hpp"
#include "reflectionless/numerics.hpp"
#include "reflectionless/soliton.hpp"
#include "reflectionless/transforms.hpp"

namespace py = pybind11;
using namespace refl;

namespace {

template <class F>
py::array_t<double> map_array(const py::array_t<double, py::array::forcecast>& x, F f) {
    py::array_t<double> out(x.request().shape);
    const double* in = x.data();
    double* o = out.mutable_data();
    for (py::ssize_t i = 0; i < x.size(); ++i) o[i] = f(in[i]);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reflectionless potentials, their tau functions and deformations";

    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<SingularityError>(m, "SingularityError", numerical);
    py::register_exception<DomainError>(m, "DomainError", numerical);
    py::register_exception<RangeError>(m, "RangeError", numerical);
    py::register_exception<SolverError>(m, "SolverError", numerical);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

    py::class_<SolitonConfig>(m, "SolitonConfig")
        .def(py::init([](std::vector<double> k, std::vector<double> c, std::map<int, double> times) {
                 return SolitonConfig::make(std::move(k), std::move(c), std::move(times));
             }),
             py::arg("k"), py::arg("c"), py::arg("times") = std::map<int, double>{})
        .def_readonly("k", &SolitonConfig::k)
        .def_readonly("c", &SolitonConfig::c)
        .def_readonly("times", &SolitonConfig::times)
        .def("__len__", &SolitonConfig::size)
        .def("energies", &SolitonConfig::energies)
        .def("to_json", [](const SolitonConfig& c) { return config_to_json(c); })
        .def_static("from_json", &parse_config)
        .def("__repr__", [](const SolitonConfig& c) { return "SolitonConfig(" + config_to_json(c) + ")"; });

    m.def("apply_time_flows", &apply_time_flows);

    m.def("potential", &potential, py::arg("cfg"), py::arg("x"));
    m.def("potential", [](const SolitonConfig& cfg, py::array_t<double, py::array::forcecast> x) {
        return map_array(x, [&cfg](double v) { return potential(cfg, v); });
    }, py::arg("cfg"), py::arg("x"));
    m.def("potential_derivatives",
          [](const SolitonConfig& cfg, double x, int order) {
              const Jet j = potential_jet(cfg, x, order);
              std::vector<double> out;
              for (int d = 0; d <= order; ++d) out.push_back(j.derivative(d));
              return out;
          },
          py::arg("cfg"), py::arg("x"), py::arg("order") = 3);
    m.def("eigenfunction", [](const SolitonConfig& cfg, int j, double x) { return eigenfunction(cfg, j, x, 0)[0]; },
          py::arg("cfg"), py::arg("j"), py::arg("x"));
    m.def("eigenfunction", [](const SolitonConfig& cfg, int j, py::array_t<double, py::array::forcecast> x) {
        return map_array(x, [&cfg, j](double v) { return eigenfunction(cfg, j, v, 0)[0]; });
    }, py::arg("cfg"), py::arg("j"), py::arg("x"));
    m.def("tau", [](const SolitonConfig& cfg, double x) {
        const TauEval t = tau_det(cfg, x, 0);
        return std::make_pair(t.gauge_exponent, t.jet[0]);
    }, py::arg("cfg"), py::arg("x"), "(log scale, value) with tau = exp(log scale) * value.");
    m.def("tau_hirota", [](const SolitonConfig& cfg, double x) {
        const LogValue v = tau_hirota(cfg, x);
        return std::make_pair(v.log_abs, v.sign);
    }, py::arg("cfg"), py::arg("x"), "(log |tau|, sign) from the exponential sum.");
    m.def("dt_potential", &dt_potential, py::arg("cfg"), py::arg("x"));
    m.def("default_grid", &default_grid, py::arg("cfg"), py::arg("points") = 2001);

    py::enum_<Scheme>(m, "Scheme")
        .value("darboux_ground", Scheme::darboux_ground)
        .value("krein_adler", Scheme::krein_adler)
        .value("am_delete", Scheme::am_delete)
        .value("am_add", Scheme::am_add)
        .value("generic_darboux", Scheme::generic_darboux)
        .value("generic_am", Scheme::generic_am);

    py::class_<TransformResult>(m, "TransformResult")
        .def_readonly("before", &TransformResult::before)
        .def_readonly("after", &TransformResult::after)
        .def_readonly("scheme", &TransformResult::scheme)
        .def_readonly("deleted", &TransformResult::deleted)
        .def_readonly("xi_exponent", &TransformResult::xi_exponent)
        .def_readonly("am_params", &TransformResult::am_params)
        .def_readonly("singular", &TransformResult::singular);

    m.def("darboux_ground", &darboux_ground, py::arg("cfg"));
    m.def("krein_adler_check", &krein_adler_check, py::arg("n"), py::arg("deleted"));
    m.def("krein_adler_delete", &krein_adler_delete, py::arg("cfg"), py::arg("deleted"),
          py::arg("unsafe") = false);
    m.def("am_delete", &am_delete, py::arg("cfg"), py::arg("deleted"));
    m.def("am_add", &am_add, py::arg("cfg"), py::arg("e"));

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("name", &VerificationReport::name)
        .def_readonly("equation", &VerificationReport::equation)
        .def_readonly("max_abs_deviation", &VerificationReport::max_abs_deviation)
        .def_readonly("constancy", &VerificationReport::constancy)
        .def_readonly("measured_constant", &VerificationReport::measured_constant)
        .def_readonly("tolerance", &VerificationReport::tolerance)
        .def_readonly("excluded", &VerificationReport::excluded)
        .def_readonly("passed", &VerificationReport::pass)
        .def("__repr__", [](const VerificationReport& r) {
            std::ostringstream os;
            os << "<VerificationReport " << r.name << (r.pass ? " pass" : " FAIL") << ">";
            return os.str();
        });

    m.def("verify_wronskian_identity", &verify_wronskian_identity, py::arg("cfg"), py::arg("deleted"),
          py::arg("grid"), py::arg("tol") = kConstancyTolerance);
    m.def("verify_bilinear_derivative", &verify_bilinear_derivative, py::arg("cfg"), py::arg("j"), py::arg("l"),
          py::arg("grid"), py::arg("tol") = kResidualTolerance);
    m.def("verify_deletion_determinant", &verify_deletion_determinant, py::arg("cfg"), py::arg("deleted"),
          py::arg("grid"), py::arg("tol") = kConstancyTolerance);
    m.def("verify_addition_determinant", &verify_addition_determinant, py::arg("cfg"), py::arg("e"),
          py::arg("grid"), py::arg("tol") = kConstancyTolerance);
    m.def("verify_tau_split", &verify_tau_split, py::arg("cfg"), py::arg("j"), py::arg("grid"),
          py::arg("tol") = kResidualTolerance);
    m.def("verify_seed_wronskian", &verify_seed_wronskian, py::arg("k"), py::arg("c_tilde"), py::arg("grid"),
          py::arg("tol") = kResidualTolerance);
    m.def("seed_to_soliton", &seed_to_soliton, py::arg("k"), py::arg("c_tilde"));
    m.def("soliton_to_seed", &soliton_to_seed, py::arg("cfg"));
    m.def("random_config", [](std::uint64_t seed, int n) { return random_config(seed, n); }, py::arg("seed"),
          py::arg("n"));
    m.def("verify_all", &verify_all, py::arg("cfg"), py::arg("seed"), py::arg("grid"));
    m.def("run_identity_suite", [](std::uint64_t seed, int configs) {
        FuzzOptions o;
        o.seed = seed;
        o.configs = configs;
        py::gil_scoped_release release;
        return run_identity_suite(o);
    }, py::arg("seed") = FuzzOptions{}.seed, py::arg("configs") = FuzzOptions{}.configs);

    py::class_<ScatteringResult>(m, "ScatteringResult")
        .def_readonly("k", &ScatteringResult::k)
        .def_readonly("r", &ScatteringResult::reflection_amp)
        .def_readonly("t", &ScatteringResult::transmission_amp)
        .def_readonly("unitarity_defect", &ScatteringResult::unitarity_defect)
        .def_readonly("halfwidth", &ScatteringResult::halfwidth)
        .def_readonly("steps", &ScatteringResult::steps);

    m.def("bound_spectrum", [](const SolitonConfig& cfg, double step) {
        return bound_spectrum(cfg, step).energies;
    }, py::arg("cfg"), py::arg("step") = 1e-3);
    m.def("scatter", [](const SolitonConfig& cfg, double k) {
        return scatter([&cfg](double x) { return potential(cfg, x); }, k);
    }, py::arg("cfg"), py::arg("k"));
    m.def("reflectionless_transmission", &reflectionless_transmission, py::arg("kappa"), py::arg("k"));
    m.def("kdv_residual", &kdv_residual, py::arg("cfg"), py::arg("x"), py::arg("t") = 0.0);
    m.def("phase_shift", [](const SolitonConfig& cfg, double big_t) {
        const PhaseShiftReport r = phase_shift_check(cfg, big_t);
        py::dict d;
        d["expected_shift_fast"] = r.expected_shift_fast;
        d["expected_shift_slow"] = r.expected_shift_slow;
        d["measured"] = std::vector<std::vector<double>>{{r.measured[0][0], r.measured[0][1]},
                                                         {r.measured[1][0], r.measured[1][1]}};
        d["max_deviation"] = r.max_deviation;
        return d;
    }, py::arg("cfg"), py::arg("T") = 3.0);

    m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run the command-line tool in process: (exit code, stdout, stderr).");
}
