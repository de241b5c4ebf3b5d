#include "cli.hpp"

#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/expr.hpp"
#include "tscal/format.hpp"
#include "tscal/integral.hpp"
#include "tscal/oracles.hpp"
#include "tscal/timescale.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tscal::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
    std::string scale;
    std::string expr;
    std::string f;
    std::string g;
    std::optional<double> alpha;
    std::vector<double> at;
    std::optional<double> from;
    std::optional<double> to;
    int count = 0;
    std::string output = "json";
    std::optional<double> tol;
    std::optional<double> quad_tol;
    std::uint64_t seed = 0;
    std::vector<std::string> laws;
    std::size_t trials = 100;
};

struct Tolerances {
    DerivConfig deriv;
    IntegralConfig integral;
};

/// TSCAL_TOL holds either a bare number (the derivative tolerance) or
/// comma separated key=value pairs: tol, quad_tol, step_count,
/// richardson_depth, zero_limit_points, max_subdivisions.
void apply_env(Tolerances& tols, const char* text) {
    if (text == nullptr || *text == '\0') return;
    auto number = [](const std::string& s, const std::string& key) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw std::invalid_argument("TSCAL_TOL: bad value for " + key + ": '" + s + "'");
        return v;
    };
    const std::string env(text);
    if (env.find('=') == std::string::npos) {
        tols.deriv.tol = number(env, "tol");
        return;
    }
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("TSCAL_TOL: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double v = number(item.substr(eq + 1), key);
        if (key == "tol") tols.deriv.tol = v;
        else if (key == "quad_tol") tols.integral.quad_tol = v;
        else if (key == "step_count") tols.deriv.step_count = static_cast<int>(v);
        else if (key == "richardson_depth") tols.deriv.richardson_depth = static_cast<int>(v);
        else if (key == "zero_limit_points") tols.deriv.zero_limit_points = static_cast<int>(v);
        else if (key == "max_subdivisions") tols.integral.max_subdivisions = static_cast<std::size_t>(v);
        else throw std::invalid_argument("TSCAL_TOL: unknown key '" + key + "'");
    }
}

Tolerances resolve_tolerances(const Options& opt) {
    Tolerances tols;
    apply_env(tols, std::getenv("TSCAL_TOL"));
    if (opt.tol) tols.deriv.tol = *opt.tol;
    if (opt.quad_tol) tols.integral.quad_tol = *opt.quad_tol;
    tols.deriv.validate();
    tols.integral.validate();
    return tols;
}

ordered_json meta(const Tolerances& tols, const Options& opt) {
    ordered_json t;
    t["tol"] = tols.deriv.tol;
    t["initial_step_factor"] = tols.deriv.initial_step_factor;
    t["step_ratio"] = tols.deriv.step_ratio;
    t["step_count"] = tols.deriv.step_count;
    t["richardson_depth"] = tols.deriv.richardson_depth;
    t["zero_limit_points"] = tols.deriv.zero_limit_points;
    t["quad_tol"] = tols.integral.quad_tol;
    t["max_subdivisions"] = tols.integral.max_subdivisions;
    t["q_tail_exponent"] = tols.integral.q_tail_exponent;
    ordered_json m;
    m["tolerances"] = t;
    m["seed"] = opt.seed;
    m["version"] = TSCAL_VERSION;
    return m;
}

struct Point {
    double requested;
    double t;
};

// Explicit points must already be scale points (up to the membership
// tolerance); range points are snapped to the nearest scale point.
std::vector<Point> resolve_points(const TimeScale& ts, const Options& opt) {
    std::vector<Point> out;
    if (!opt.at.empty()) {
        for (double t : opt.at) {
            if (!ts.contains(t)) throw NotInScale(t);
            out.push_back({t, ts.nearest(t)});
        }
        return out;
    }
    if (!opt.from || !opt.to || opt.count < 1)
        throw std::invalid_argument("give points with --at, or a range with --from, --to and --count");
    if (*opt.from > *opt.to) throw std::invalid_argument("--from must not exceed --to");
    for (int i = 0; i < opt.count; ++i) {
        const double x = opt.count == 1 ? *opt.from
                                         : *opt.from + (*opt.to - *opt.from) * (static_cast<double>(i) / (opt.count - 1));
        const double t = ts.nearest(x);
        if (!out.empty() && out.back().t == t) continue;
        out.push_back({x, t});
    }
    return out;
}

ordered_json row(const TimeScale& ts, const Point& p) {
    ordered_json r;
    r["t"] = p.t;
    r["sigma"] = ts.sigma(p.t);
    r["mu"] = ts.mu(p.t);
    r["class"] = to_string(ts.classify(p.t));
    r["requested"] = p.requested;
    r["snap"] = std::abs(p.t - p.requested);
    return r;
}

void check_output(const std::string& output) {
    if (output != "json" && output != "csv") throw std::invalid_argument("--output must be json or csv");
}

std::string csv_field(const ordered_json& v) {
    if (v.is_number_float()) return format_real(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + "\"";
    }
    if (v.is_null()) return "";
    return v.dump();
}

void emit(std::ostream& out, const std::string& format, const ordered_json& doc, const std::vector<std::string>& columns,
          const ordered_json& rows) {
    if (format == "json") {
        out << doc.dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "");
            if (r.contains(columns[i])) out << csv_field(r[columns[i]]);
        }
        out << "\n";
    }
}

ordered_json header(const Options& opt, const std::string& expr) {
    ordered_json doc;
    doc["scale"] = opt.scale;
    doc["alpha"] = *opt.alpha;
    doc["expr"] = expr;
    return doc;
}

int cmd_deriv(const Options& opt, std::ostream& out) {
    check_output(opt.output);
    const auto tols = resolve_tolerances(opt);
    const auto ts = parse_scale(opt.scale);
    const Expr f = parse_expr(opt.expr);
    const double alpha = *opt.alpha;
    AlphaOrder::from(alpha);

    ordered_json rows = ordered_json::array();
    for (const auto& p : resolve_points(ts, opt)) {
        ordered_json r = row(ts, p);
        if (p.t == 0 && alpha <= 1) {
            const auto z = t_alpha_at_zero(f, ts, alpha, tols.deriv);
            r["value"] = z.value;
            r["est_error"] = z.error_estimate;
        } else {
            r["value"] = conformable_derivative(f, ts, p.t, alpha, tols.deriv);
        }
        rows.push_back(std::move(r));
    }
    ordered_json doc = header(opt, opt.expr);
    doc["results"] = rows;
    doc["meta"] = meta(tols, opt);
    emit(out, opt.output, doc, {"t", "sigma", "mu", "class", "value", "est_error", "requested", "snap"}, rows);
    return kOk;
}

int cmd_integ(const Options& opt, std::ostream& out) {
    check_output(opt.output);
    const auto tols = resolve_tolerances(opt);
    const auto ts = parse_scale(opt.scale);
    const Expr f = parse_expr(opt.expr);
    if (!opt.from || !opt.to) throw std::invalid_argument("integ needs --from and --to");
    for (double x : {*opt.from, *opt.to})
        if (!ts.contains(x)) throw NotInScale(x);
    const double a = ts.nearest(*opt.from);
    const double b = ts.nearest(*opt.to);

    const auto result = cauchy(f, ts, a, b, *opt.alpha, tols.integral);
    ordered_json r = row(ts, {*opt.to, b});
    r["value"] = result.value;
    r["est_error"] = result.est_error;
    r["from"] = a;
    r["cells_used"] = result.cells_used;
    ordered_json rows = ordered_json::array({r});

    ordered_json doc = header(opt, opt.expr);
    doc["results"] = rows;
    doc["meta"] = meta(tols, opt);
    emit(out, opt.output, doc, {"from", "t", "sigma", "mu", "class", "value", "est_error", "cells_used"}, rows);
    return kOk;
}

int cmd_witness(const Options& opt, std::ostream& out) {
    check_output(opt.output);
    const auto tols = resolve_tolerances(opt);
    const auto ts = parse_scale(opt.scale);
    const Expr f = parse_expr(opt.f);
    const Expr g = parse_expr(opt.g);

    ordered_json rows = ordered_json::array();
    for (const auto& p : resolve_points(ts, opt)) {
        const auto w = chain_rule_witness(f, g, ts, p.t, *opt.alpha, tols.deriv);
        ordered_json r = row(ts, p);
        r["value"] = w.c;
        r["c"] = w.c;
        r["residual"] = w.residual;
        r["composite_derivative"] = w.composite_derivative;
        r["inner_derivative"] = w.inner_derivative;
        rows.push_back(std::move(r));
    }
    ordered_json doc = header(opt, "f=" + opt.f + "; g=" + opt.g);
    doc["results"] = rows;
    doc["meta"] = meta(tols, opt);
    emit(out, opt.output, doc, {"t", "sigma", "mu", "class", "c", "residual", "composite_derivative", "inner_derivative"},
         rows);
    return kOk;
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
    check_output(opt.output);
    const auto tols = resolve_tolerances(opt);
    const auto laws = opt.laws.empty() ? law_names() : opt.laws;
    ordered_json reports = ordered_json::array();
    bool all_passed = true;
    for (const auto& law : laws) {
        const auto rep = run_law_suite(law, opt.trials, opt.seed);
        ordered_json r;
        r["law"] = rep.law;
        r["cases_run"] = rep.cases_run;
        r["max_abs_residual"] = rep.max_abs_residual;
        r["max_rel_residual"] = rep.max_rel_residual;
        r["tolerance"] = rep.tolerance;
        r["expected_failure"] = rep.expected_failure;
        r["passed"] = rep.passed;
        ordered_json failures = ordered_json::array();
        for (const auto& f : rep.failures) failures.push_back({{"inputs", f.inputs}, {"residual", f.residual}});
        r["failure_count"] = rep.failures.size();
        r["failures"] = failures;
        reports.push_back(std::move(r));
        if (!rep.passed) {
            all_passed = false;
            err << "law " << rep.law << " failed in " << rep.failures.size() << " of " << rep.cases_run << " cases\n";
        }
    }
    ordered_json doc;
    doc["laws"] = reports;
    doc["passed"] = all_passed;
    doc["meta"] = meta(tols, opt);
    emit(out, opt.output, doc, {"law", "cases_run", "max_abs_residual", "max_rel_residual", "tolerance", "failure_count",
                                "expected_failure", "passed"},
         reports);
    return all_passed ? kOk : kVerification;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conformable fractional derivatives and integrals on time scales", "tscal"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(TSCAL_VERSION));
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--output", opt.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--tol", opt.tol, "relative tolerance of dense limits");
        sub->add_option("--quad-tol", opt.quad_tol, "quadrature tolerance");
        sub->add_option("--seed", opt.seed, "seed recorded in the output");
    };
    auto points = [&](CLI::App* sub) {
        sub->add_option("--at", opt.at, "evaluation point (repeatable)")->allow_extra_args(false);
        sub->add_option("--from", opt.from, "range start");
        sub->add_option("--to", opt.to, "range end");
        sub->add_option("--count", opt.count, "number of range points")->check(CLI::PositiveNumber);
    };

    auto* deriv = app.add_subcommand("deriv", "T_alpha(f) at points of a time scale");
    deriv->add_option("--scale", opt.scale, "time scale spec")->required();
    deriv->add_option("--expr", opt.expr, "function of t")->required();
    deriv->add_option("--alpha", opt.alpha, "order alpha > 0")->required();
    points(deriv);
    common(deriv);

    auto* integ = app.add_subcommand("integ", "Cauchy alpha-fractional integral from --from to --to");
    integ->add_option("--scale", opt.scale, "time scale spec")->required();
    integ->add_option("--expr", opt.expr, "integrand, a function of t")->required();
    integ->add_option("--alpha", opt.alpha, "order in (0, 1]")->required();
    integ->add_option("--from", opt.from, "lower limit")->required();
    integ->add_option("--to", opt.to, "upper limit")->required();
    common(integ);

    auto* witness = app.add_subcommand("witness", "chain-rule point c in [t, sigma(t)]");
    witness->add_option("--scale", opt.scale, "time scale spec")->required();
    witness->add_option("--f", opt.f, "outer function")->required();
    witness->add_option("--g", opt.g, "inner function")->required();
    witness->add_option("--alpha", opt.alpha, "order in (0, 1]")->required();
    points(witness);
    common(witness);

    auto* verify = app.add_subcommand("verify", "run randomized law suites");
    verify->add_option("--law", opt.laws, "law name (repeatable; default all)")->allow_extra_args(false);
    verify->add_option("--trials", opt.trials, "cases per law")->check(CLI::PositiveNumber);
    common(verify);

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << TSCAL_VERSION << "\n";
        return kOk;
    } catch (const CLI::Error& e) {
        err << "tscal: " << e.what() << "\n";
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) err << sub->help();
        return kUsage;
    }

    try {
        if (*deriv) return cmd_deriv(opt, out);
        if (*integ) return cmd_integ(opt, out);
        if (*witness) return cmd_witness(opt, out);
        return cmd_verify(opt, out, err);
    } catch (const tscal::ParseError& e) {
        err << "tscal: parse error: " << e.what() << "\n";
        return kParse;
    } catch (const MathError& e) {
        err << "tscal: math error: " << e.what() << "\n";
        return kMath;
    } catch (const UnknownLaw& e) {
        err << "tscal: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "tscal: " << e.what() << "\n";
        return kUsage;
    }
}

} // namespace tscal::cli
