#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/expr.hpp"
#include "tscal/integral.hpp"
#include "tscal/oracles.hpp"
#include "tscal/timescale.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tscal;

namespace {

py::tuple cell_tuple(const Cell& cell) {
    if (const auto* j = std::get_if<Jump>(&cell)) return py::make_tuple("jump", j->t, j->sigma_t);
    if (const auto* s = std::get_if<Segment>(&cell)) return py::make_tuple("segment", s->lo, s->hi);
    return py::make_tuple("tail", 0.0, std::get<AccumulationTail>(cell).hi);
}

DerivConfig deriv_config(double tol) {
    DerivConfig cfg;
    cfg.tol = tol;
    return cfg;
}

IntegralConfig integral_config(double quad_tol) {
    IntegralConfig cfg;
    cfg.quad_tol = quad_tol;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_tscal, m) {
    m.doc() = "Conformable fractional calculus on time scales";
    m.attr("__version__") = TSCAL_VERSION;

    static py::exception<Error> error(m, "Error");
    static py::exception<tscal::ParseError> parse_error(m, "ParseError", error.ptr());
    static py::exception<MathError> math_error(m, "MathError", error.ptr());
    static py::exception<UnknownLaw> unknown_law(m, "UnknownLaw", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const tscal::ParseError& e) {
            py::set_error(parse_error, e.what());
        } catch (const MathError& e) {
            py::set_error(math_error, e.what());
        } catch (const UnknownLaw& e) {
            py::set_error(unknown_law, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<Expr>(m, "Expr")
        .def(py::init([](const std::string& source) { return parse_expr(source); }), py::arg("source"))
        .def("__call__", [](const Expr& e, double t) { return eval(e, t); })
        .def("derivative", [](const Expr& e) { return derivative(e); })
        .def("render", [](const Expr& e) { return render(e); })
        .def("__repr__", [](const Expr& e) { return "Expr('" + render(e) + "')"; })
        .def("__str__", [](const Expr& e) { return render(e); });
    py::implicitly_convertible<py::str, Expr>();

    py::class_<TimeScale>(m, "TimeScale")
        .def(py::init([](const std::string& spec) { return parse_scale(spec); }), py::arg("spec"))
        .def("contains", &TimeScale::contains)
        .def("nearest", &TimeScale::nearest)
        .def("sigma", &TimeScale::sigma)
        .def("mu", &TimeScale::mu)
        .def("rho", &TimeScale::rho)
        .def("classify", [](const TimeScale& ts, double t) { return to_string(ts.classify(t)); })
        .def("in_kappa", &TimeScale::in_kappa)
        .def("min", &TimeScale::min)
        .def("max", &TimeScale::max)
        .def("decompose", [](const TimeScale& ts, double a, double b) {
            py::list out;
            for (const auto& c : ts.decompose(a, b)) out.append(cell_tuple(c));
            return out;
        })
        .def("describe", &TimeScale::describe)
        .def("__repr__", [](const TimeScale& ts) { return "TimeScale('" + ts.describe() + "')"; });
    py::implicitly_convertible<py::str, TimeScale>();

    const double default_tol = DerivConfig{}.tol;
    const double default_quad = IntegralConfig{}.quad_tol;

    m.def(
        "t_alpha",
        [](const Expr& f, const TimeScale& ts, double t, double alpha, double tol) {
            return conformable_derivative(f, ts, t, alpha, deriv_config(tol));
        },
        py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("alpha"), py::arg("tol") = default_tol,
        "T_alpha(f)(t); orders above 1 use the higher-order definition.");
    m.def(
        "t_alpha_at_zero",
        [](const Expr& f, const TimeScale& ts, double alpha, double tol) {
            const auto z = t_alpha_at_zero(f, ts, alpha, deriv_config(tol));
            return py::make_tuple(z.value, z.error_estimate);
        },
        py::arg("f"), py::arg("scale"), py::arg("alpha"), py::arg("tol") = default_tol);
    m.def(
        "t_alpha_higher",
        [](const Expr& f, const TimeScale& ts, double t, double alpha, double tol) {
            const auto h = t_alpha_higher(f, ts, t, AlphaOrder::from(alpha), deriv_config(tol));
            return py::dict(py::arg("value") = h.value, py::arg("cross_check") = h.cross_check,
                            py::arg("disagreement") = h.disagreement);
        },
        py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("alpha"), py::arg("tol") = default_tol);
    m.def(
        "delta_derivative_n",
        [](const Expr& f, const TimeScale& ts, double t, int n) { return delta_derivative_n(f, ts, t, n); },
        py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("n"));
    m.def("power_rule", &power_rule, py::arg("scale"), py::arg("t"), py::arg("alpha"), py::arg("m"), py::arg("c"),
          py::arg("reciprocal") = false);
    m.def(
        "sigma_shift",
        [](const Expr& f, const TimeScale& ts, double t, double alpha) { return sigma_shift(f, ts, t, alpha); },
        py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("alpha"));
    m.def(
        "chain_rule_witness",
        [](const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha) {
            const auto w = chain_rule_witness(f, g, ts, t, alpha);
            return py::dict(py::arg("c") = w.c, py::arg("residual") = w.residual,
                            py::arg("composite_derivative") = w.composite_derivative,
                            py::arg("inner_derivative") = w.inner_derivative);
        },
        py::arg("f"), py::arg("g"), py::arg("scale"), py::arg("t"), py::arg("alpha"));
    m.def(
        "naive_chain_gap",
        [](const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha) {
            return naive_chain_gap(f, g, ts, t, alpha);
        },
        py::arg("f"), py::arg("g"), py::arg("scale"), py::arg("t"), py::arg("alpha"));

    m.def(
        "cauchy",
        [](const Expr& f, const TimeScale& ts, double a, double b, double alpha, double quad_tol) {
            const auto r = cauchy(f, ts, a, b, alpha, integral_config(quad_tol));
            return py::dict(py::arg("value") = r.value, py::arg("est_error") = r.est_error,
                            py::arg("cells_used") = r.cells_used);
        },
        py::arg("f"), py::arg("scale"), py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("quad_tol") = default_quad);
    m.def("single_grain", &single_grain, py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("alpha"));
    m.def(
        "indefinite",
        [](const Expr& f, const TimeScale& ts, double base, double t, double alpha) {
            return indefinite(f, ts, base, t, alpha);
        },
        py::arg("f"), py::arg("scale"), py::arg("base"), py::arg("t"), py::arg("alpha"));
    m.def(
        "ftc_check",
        [](const Expr& f, const TimeScale& ts, const std::vector<double>& points, double alpha) {
            const auto rep = ftc_check(f, ts, points, alpha);
            py::list pts;
            for (const auto& p : rep.points)
                pts.append(py::dict(py::arg("t") = p.t, py::arg("expected") = p.expected,
                                    py::arg("recovered") = p.recovered, py::arg("deviation") = p.deviation,
                                    py::arg("error") = p.error));
            return py::dict(py::arg("points") = pts, py::arg("max_deviation") = rep.max_deviation,
                            py::arg("passed") = rep.passed);
        },
        py::arg("f"), py::arg("scale"), py::arg("points"), py::arg("alpha"));
    m.def(
        "monotonicity_check",
        [](const Expr& f, const TimeScale& ts, double a, double b, double alpha) {
            const auto rep = monotonicity_check(f, ts, a, b, alpha);
            py::list violations;
            for (const auto& v : rep.violations) violations.append(py::make_tuple(v.s, v.t, v.f_s, v.f_t));
            return py::dict(py::arg("status") = to_string(rep.status), py::arg("samples") = rep.samples,
                            py::arg("min_derivative") = rep.min_derivative, py::arg("violations") = violations);
        },
        py::arg("f"), py::arg("scale"), py::arg("a"), py::arg("b"), py::arg("alpha"));

    m.def("definition_scan", &definition_scan, py::arg("f"), py::arg("scale"), py::arg("t"), py::arg("alpha"),
          py::arg("candidate"), py::arg("epsilon"));
    m.def("law_names", &law_names);
    m.def(
        "run_law_suite",
        [](const std::string& law, std::size_t trials, std::uint64_t seed) {
            const auto rep = run_law_suite(law, trials, seed);
            py::list failures;
            for (const auto& f : rep.failures) failures.append(py::make_tuple(f.inputs, f.residual));
            return py::dict(py::arg("law") = rep.law, py::arg("cases_run") = rep.cases_run,
                            py::arg("max_abs_residual") = rep.max_abs_residual,
                            py::arg("max_rel_residual") = rep.max_rel_residual, py::arg("tolerance") = rep.tolerance,
                            py::arg("failures") = failures, py::arg("expected_failure") = rep.expected_failure,
                            py::arg("passed") = rep.passed);
        },
        py::arg("law"), py::arg("trials"), py::arg("seed"));
}
