#include "tscal/oracles.hpp"

#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/format.hpp"
#include "tscal/integral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <random>

namespace tscal {

bool definition_scan(const Expr& f, const TimeScale& ts, double t, double alpha, double candidate, double epsilon) {
    if (!ts.contains(t)) throw NotInScale(t);
    if (!(t > 0)) throw NonPositivePoint(t);
    if (!ts.in_kappa(t)) throw NotInKappa(t);

    const double sigma = ts.sigma(t);
    const double f_sigma = eval(f, sigma);
    const double scale = std::pow(t, 1 - alpha);
    const double rho = ts.rho(t);
    const auto [lo, hi] = ts.continuum_around(t);
    constexpr double ulp = std::numeric_limits<double>::epsilon();

    auto holds = [&](double s) {
        const double f_s = eval(f, s);
        const double lhs = std::abs((f_sigma - f_s) * scale - candidate * (sigma - s));
        const double slack = 8 * ulp * ((std::abs(f_sigma) + std::abs(f_s)) * scale + std::abs(candidate * (sigma - s)));
        return lhs <= epsilon * std::abs(sigma - s) + slack;
    };

    // At a right-dense point sigma - s shrinks with delta, and below ~1e-8 the
    // rounding slack would absorb any candidate.
    const int k_max = sigma > t ? 14 : 8;
    for (int k = 0; k <= k_max; ++k) {
        const double delta = std::max(1.0, t) * std::pow(10.0, -k);
        std::vector<double> neighbourhood{t};
        if (rho < t && t - rho < delta) neighbourhood.push_back(rho);
        if (sigma > t && sigma - t < delta) neighbourhood.push_back(sigma);
        for (int j = 0; j <= 24; ++j) {
            const double step = delta * std::pow(0.5, j + 1);
            if (t - step >= lo && t - lo > 0) neighbourhood.push_back(t - step);
            if (t + step <= hi && hi - t > 0) neighbourhood.push_back(t + step);
        }
        if (std::all_of(neighbourhood.begin(), neighbourhood.end(), holds)) return true;
    }
    return false;
}

namespace {

// Portable draws: std::uniform_*_distribution differs between standard
// libraries, and reports must be reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double a, double b) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }
    int integer(int lo, int hi) { // inclusive
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return uniform(0, 1) < p; }
    template <class T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
    }

private:
    std::mt19937_64 engine_;
};

double round_to(double x, double grain) { return std::round(x / grain) * grain; }

Expr random_polynomial(Rng& rng, int max_degree) {
    const int degree = rng.integer(0, max_degree);
    Expr p = Expr::constant(round_to(rng.uniform(-3, 3), 0.125));
    for (int i = 1; i <= degree; ++i) {
        double c = round_to(rng.uniform(-3, 3), 0.125);
        if (i == degree && c == 0) c = 1;
        p = p + Expr::constant(c) * pow(Expr::variable(), i);
    }
    return p;
}

// Polynomial, or polynomial in log t (all sampled points are positive).
Expr random_function(Rng& rng, int max_degree = 4) {
    Expr p = random_polynomial(rng, max_degree);
    if (rng.chance(0.25)) return compose(p, apply(Func::Log, Expr::variable()));
    return p;
}

enum class Family { Reals, Lattice, QClosure, QPowers, Periodic, Finite };

TimeScale random_scale(Rng& rng, const std::vector<Family>& families) {
    switch (rng.pick(families)) {
    case Family::Reals: return TimeScale::reals();
    case Family::Lattice: return TimeScale::uniform_lattice(rng.pick(std::vector<double>{0.25, 0.5, 1, 2}));
    case Family::QClosure: return TimeScale::q_lattice_closure(rng.pick(std::vector<double>{1.5, 2, 3}));
    case Family::QPowers: return TimeScale::q_powers(rng.pick(std::vector<double>{1.5, 2, 3}));
    case Family::Periodic: {
        const double a = rng.pick(std::vector<double>{0.5, 1, 2});
        const double b = rng.pick(std::vector<double>{0.25, 0.5, 1});
        return TimeScale::periodic_union(a, b);
    }
    case Family::Finite: {
        std::vector<double> points;
        double x = round_to(rng.uniform(0.25, 1), 0.03125);
        for (int i = 0; i < 10; ++i) {
            points.push_back(x);
            x += round_to(rng.uniform(0.125, 1.5), 0.03125);
        }
        return TimeScale::finite_set(std::move(points));
    }
    }
    return TimeScale::reals();
}

const std::vector<Family> kAllFamilies{Family::Reals,  Family::Lattice,  Family::QClosure,
                                       Family::QPowers, Family::Periodic, Family::Finite};

// A positive point of T^kappa in roughly (0, 6], leaving `jumps_needed`
// further forward jumps inside T^kappa on finite sets.
double random_point(Rng& rng, const TimeScale& ts, int jumps_needed = 1) {
    const auto& v = ts.variant();
    if (std::holds_alternative<RealInterval>(v)) return round_to(rng.uniform(0.25, 6), 1.0 / 1024);
    if (const auto* l = std::get_if<UniformLattice>(&v)) return l->h * rng.integer(1, static_cast<int>(6 / l->h));
    if (const auto* q = std::get_if<QLatticeClosure>(&v))
        return std::pow(q->q, rng.integer(-4, static_cast<int>(std::log(6.0) / std::log(q->q))));
    if (const auto* q = std::get_if<QPowers>(&v))
        return std::pow(q->q, rng.integer(0, static_cast<int>(std::log(6.0) / std::log(q->q))));
    if (const auto* p = std::get_if<PeriodicUnion>(&v)) {
        const double period = p->a + p->b;
        const int k = rng.integer(0, std::max(0, static_cast<int>(5 / period)));
        const double start = k * period;
        if (rng.chance(0.3)) return start + p->a; // right-scattered endpoint
        return start + p->a * round_to(rng.uniform(0.05, 0.95), 1.0 / 1024);
    }
    const auto& pts = std::get<FiniteSet>(v).points;
    return pts[static_cast<std::size_t>(rng.integer(0, static_cast<int>(pts.size()) - 1 - jumps_needed))];
}

// Two ordered scale points a < b, occasionally with a = 0 where the
// integral is improper but convergent.
std::pair<double, double> random_interval(Rng& rng, const TimeScale& ts, double alpha) {
    double a = random_point(rng, ts, 0);
    double b = random_point(rng, ts, 0);
    for (int i = 0; i < 8 && a == b; ++i) b = random_point(rng, ts, 0);
    if (a > b) std::swap(a, b);
    const bool zero_ok = ts.contains(0.0) && (alpha == 1 || ts.mu(0.0) == 0);
    if (zero_ok && rng.chance(0.15)) a = 0;
    return {a, b};
}

double random_alpha(Rng& rng) {
    if (rng.chance(0.15)) return 1.0;
    return round_to(rng.uniform(0.05, 1), 1.0 / 64);
}

// |residual| / max(1, sum of |terms|).
double relative(double residual, std::initializer_list<double> terms) {
    double size = 0;
    for (double x : terms) size += std::abs(x);
    return std::abs(residual) / std::max(1.0, size);
}

std::string describe_case(const std::vector<std::pair<std::string, std::string>>& fields) {
    std::string out;
    for (const auto& [key, value] : fields) {
        if (!out.empty()) out += ", ";
        out += key + "=" + value;
    }
    return out;
}

struct Outcome {
    double residual; // signed, in the law's own units
    double rel_residual;
    std::string inputs;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

using Trial = std::function<Outcome(Rng&, std::size_t)>;

struct LawSpec {
    double tolerance;
    bool expected_failure;
    Trial trial;
};

constexpr double kQuadTol = IntegralConfig{}.quad_tol;

std::string s(double x) { return format_real(x); }

Outcome sum_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng), g = random_function(rng);
    const double lhs = t_alpha(f + g, ts, t, alpha);
    const double a = t_alpha(f, ts, t, alpha), b = t_alpha(g, ts, t, alpha);
    const double r = lhs - (a + b);
    return {r, relative(r, {lhs, a, b}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome scalar_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng);
    const double lambda = round_to(rng.uniform(-3, 3), 1.0 / 64);
    const double lhs = t_alpha(Expr::constant(lambda) * f, ts, t, alpha);
    const double rhs = lambda * t_alpha(f, ts, t, alpha);
    const double r = lhs - rhs;
    return {r, relative(r, {lhs, rhs}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"lambda", s(lambda)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome product_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng, 3), g = random_function(rng, 3);
    const double st = ts.sigma(t);
    const double tfg = t_alpha(f * g, ts, t, alpha);
    const double tf = t_alpha(f, ts, t, alpha), tg = t_alpha(g, ts, t, alpha);
    const double ft = eval(f, t), gt = eval(g, t), fs = eval(f, st), gs = eval(g, st);
    const double form1 = tf * gt + fs * tg;
    const double form2 = tf * gs + ft * tg;
    const double r1 = tfg - form1, r2 = tfg - form2;
    const double r = std::abs(r1) >= std::abs(r2) ? r1 : r2;
    return {std::abs(r),
            std::max(relative(r1, {tfg, tf * gt, fs * tg}), relative(r2, {tfg, tf * gs, ft * tg})),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

// Draws g with g(t) g(sigma(t)) bounded away from 0.
Expr nonvanishing(Rng& rng, const TimeScale& ts, double t) {
    const double st = ts.sigma(t);
    for (;;) {
        const Expr g = random_function(rng, 3);
        if (std::abs(eval(g, t)) > 0.25 && std::abs(eval(g, st)) > 0.25) return g;
    }
}

Outcome reciprocal_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr g = nonvanishing(rng, ts, t);
    const double lhs = t_alpha(Expr::constant(1) / g, ts, t, alpha);
    const double tg = t_alpha(g, ts, t, alpha);
    const double rhs = -tg / (eval(g, t) * eval(g, ts.sigma(t)));
    const double r = lhs - rhs;
    return {r, relative(r, {lhs, rhs}),
            describe_case({{"scale", ts.describe()}, {"g", render(g)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome quotient_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng, 3);
    const Expr g = nonvanishing(rng, ts, t);
    const double lhs = t_alpha(f / g, ts, t, alpha);
    const double tf = t_alpha(f, ts, t, alpha), tg = t_alpha(g, ts, t, alpha);
    const double gt = eval(g, t), ft = eval(f, t);
    const double rhs = (tf * gt - ft * tg) / (gt * eval(g, ts.sigma(t)));
    const double r = lhs - rhs;
    return {r, relative(r, {lhs, rhs}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome sigma_shift_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng);
    const double lhs = sigma_shift(f, ts, t, alpha);
    const double rhs = eval(f, ts.sigma(t));
    const double r = lhs - rhs;
    return {r, relative(r, {lhs, rhs}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome ftc_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_function(rng);
    const auto report = ftc_check(f, ts, {t}, alpha);
    const auto& p = report.points.front();
    const std::string inputs =
        describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"t", s(t)}, {"alpha", s(alpha)}});
    if (!p.error.empty()) return {kInf, kInf, inputs + ": " + p.error};
    return {p.recovered - p.expected, p.deviation, inputs};
}

Outcome integral_linearity_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double alpha = random_alpha(rng);
    const auto [a, b] = random_interval(rng, ts, alpha);
    // log is unbounded at 0, so improper cases stay polynomial.
    const Expr f = a == 0 ? random_polynomial(rng, 3) : random_function(rng, 3);
    const Expr g = a == 0 ? random_polynomial(rng, 3) : random_function(rng, 3);
    const double lambda = round_to(rng.uniform(-3, 3), 1.0 / 64);
    const double i_f = cauchy(f, ts, a, b, alpha).value;
    const double i_g = cauchy(g, ts, a, b, alpha).value;
    const double i_sum = cauchy(f + g, ts, a, b, alpha).value;
    const double i_scaled = cauchy(Expr::constant(lambda) * f, ts, a, b, alpha).value;
    const double r_sum = i_sum - i_f - i_g;
    const double r_scaled = i_scaled - lambda * i_f;
    const double rel = std::max(relative(r_sum, {i_sum, i_f, i_g}), relative(r_scaled, {i_scaled, lambda * i_f}));
    return {std::abs(r_sum) >= std::abs(r_scaled) ? r_sum : r_scaled, rel,
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"lambda", s(lambda)},
                           {"a", s(a)}, {"b", s(b)}, {"alpha", s(alpha)}})};
}

Outcome integral_additivity_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double alpha = random_alpha(rng);
    auto [a, b] = random_interval(rng, ts, alpha);
    double c = random_point(rng, ts, 0);
    std::array<double, 3> sorted{a, b, c};
    std::sort(sorted.begin(), sorted.end());
    a = sorted[0];
    c = sorted[1];
    b = sorted[2];
    const Expr f = a == 0 ? random_polynomial(rng, 4) : random_function(rng);
    const double ab = cauchy(f, ts, a, b, alpha).value;
    const double ac = cauchy(f, ts, a, c, alpha).value;
    const double cb = cauchy(f, ts, c, b, alpha).value;
    const double ba = cauchy(f, ts, b, a, alpha).value;
    const std::string inputs = describe_case(
        {{"scale", ts.describe()}, {"f", render(f)}, {"a", s(a)}, {"c", s(c)}, {"b", s(b)}, {"alpha", s(alpha)}});
    // Reversal is exact by construction; any difference at all is a failure.
    if (ab + ba != 0) return {ab + ba, kInf, inputs + " (reversal)"};
    const double r = ab - ac - cb;
    return {r, relative(r, {ab, ac, cb}), inputs};
}

Outcome integral_positivity_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double alpha = random_alpha(rng);
    const auto [a, b] = random_interval(rng, ts, alpha);
    const Expr p = random_polynomial(rng, 2);
    const Expr f = p * p + Expr::constant(round_to(rng.uniform(0.01, 1), 1.0 / 128));
    const double value = cauchy(f, ts, a, b, alpha).value;
    const double r = std::min(0.0, value);
    return {r, std::abs(r),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"a", s(a)}, {"b", s(b)}, {"alpha", s(alpha)},
                           {"integral", s(value)}})};
}

Outcome integral_domination_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double alpha = random_alpha(rng);
    const auto [a, b] = random_interval(rng, ts, alpha);
    const Expr f = random_polynomial(rng, 3);
    const Expr g = apply(Func::Abs, f) + Expr::constant(round_to(rng.uniform(0, 1), 1.0 / 128));
    const double i_f = cauchy(f, ts, a, b, alpha).value;
    const double i_g = cauchy(g, ts, a, b, alpha).value;
    const double excess = std::max(0.0, std::abs(i_f) - i_g);
    return {excess, relative(excess, {i_f, i_g}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"a", s(a)}, {"b", s(b)},
                           {"alpha", s(alpha)}})};
}

Outcome chain_witness_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double t = random_point(rng, ts);
    const double alpha = random_alpha(rng);
    const Expr f = random_polynomial(rng, 2), g = random_polynomial(rng, 2);
    const std::string inputs =
        describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"g", render(g)}, {"t", s(t)}, {"alpha", s(alpha)}});
    const auto w = chain_rule_witness(f, g, ts, t, alpha);
    if (w.c < t || w.c > ts.sigma(t))
        return {kInf, kInf,
                inputs + ": c=" + s(w.c) + " outside [t, sigma(t)]"};
    // Normalised so the acceptance bound 1e-8 (1 + |T(f o g)|) reads as 1e-8.
    return {w.residual, std::abs(w.residual) / (1 + std::abs(w.composite_derivative)), inputs};
}

Outcome naive_chain_law(Rng& rng, std::size_t index) {
    const auto ts = TimeScale::uniform_lattice(1);
    double t = 4, alpha = 0.5;
    if (index > 0) {
        t = rng.integer(2, 20);
        alpha = round_to(rng.uniform(0.05, 0.95), 1.0 / 64);
    }
    const Expr id = Expr::variable();
    const double gap = naive_chain_gap(id, id, ts, t, alpha);
    return {gap, std::abs(gap),
            describe_case({{"scale", ts.describe()}, {"f", "t"}, {"g", "t"}, {"t", s(t)}, {"alpha", s(alpha)},
                           {"gap", s(gap)}})};
}

Outcome power_rule_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, {Family::Lattice, Family::QPowers, Family::Reals});
    const double alpha = random_alpha(rng);
    const int m = rng.integer(1, 4);
    const double c = rng.pick(std::vector<double>{0, 1, -1});
    const bool reciprocal = rng.chance(0.5);
    double t = random_point(rng, ts);
    for (int i = 0; i < 64 && reciprocal && (std::abs(t - c) < 0.2 || std::abs(ts.sigma(t) - c) < 0.2); ++i)
        t = random_point(rng, ts);
    const Expr base = pow(Expr::variable() - Expr::constant(c), m);
    const Expr f = reciprocal ? Expr::constant(1) / base : base;
    const double closed = power_rule(ts, t, alpha, m, c, reciprocal);
    const double numeric = t_alpha(f, ts, t, alpha);
    const double r = numeric - closed;
    return {r, relative(r, {numeric, closed}),
            describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"t", s(t)}, {"alpha", s(alpha)}})};
}

Outcome higher_order_law(Rng& rng, std::size_t) {
    const auto ts = random_scale(rng, kAllFamilies);
    const double alpha = round_to(rng.uniform(1.02, 3), 1.0 / 64);
    const auto order = AlphaOrder::from(alpha);
    const double t = random_point(rng, ts, order.n + 1);
    const Expr f = random_polynomial(rng, 4);
    const std::string inputs =
        describe_case({{"scale", ts.describe()}, {"f", render(f)}, {"t", s(t)}, {"alpha", s(alpha)}});
    try {
        const auto h = t_alpha_higher(f, ts, t, order);
        return {h.value - h.cross_check, relative(h.disagreement, {h.value, h.cross_check}), inputs};
    } catch (const InternalDisagreement& e) {
        return {kInf, kInf,
                inputs + ": " + e.what()};
    }
}

const std::map<std::string, LawSpec>& registry() {
    static const std::map<std::string, LawSpec> laws{
        {"sum", {1e-10, false, sum_law}},
        {"scalar", {1e-10, false, scalar_law}},
        {"product", {1e-10, false, product_law}},
        {"reciprocal", {1e-10, false, reciprocal_law}},
        {"quotient", {1e-10, false, quotient_law}},
        {"sigma_shift", {1e-10, false, sigma_shift_law}},
        {"ftc", {1e-6, false, ftc_law}},
        {"integral_linearity", {3 * kQuadTol, false, integral_linearity_law}},
        {"integral_additivity", {3 * kQuadTol, false, integral_additivity_law}},
        {"integral_positivity", {0, false, integral_positivity_law}},
        {"integral_domination", {2 * kQuadTol, false, integral_domination_law}},
        {"chain_witness", {1e-8, false, chain_witness_law}},
        {"naive_chain_counterexample", {1e-12, true, naive_chain_law}},
        {"power_rule_vs_talpha", {1e-10, false, power_rule_law}},
        {"higher_order_consistency", {1e-9, false, higher_order_law}},
    };
    return laws;
}

} // namespace

const std::vector<std::string>& law_names() {
    static const std::vector<std::string> names{
        "sum",
        "scalar",
        "product",
        "reciprocal",
        "quotient",
        "sigma_shift",
        "ftc",
        "integral_linearity",
        "integral_additivity",
        "integral_positivity",
        "integral_domination",
        "chain_witness",
        "naive_chain_counterexample",
        "power_rule_vs_talpha",
        "higher_order_consistency",
    };
    return names;
}

VerificationReport run_law_suite(const std::string& law, std::size_t trials, std::uint64_t seed) {
    const auto& laws = registry();
    const auto it = laws.find(law);
    if (it == laws.end()) throw UnknownLaw(law);
    const LawSpec& spec = it->second;

    VerificationReport report;
    report.law = law;
    report.tolerance = spec.tolerance;
    report.expected_failure = spec.expected_failure;

    Rng rng(seed);
    bool every_case_shows_gap = true;
    for (std::size_t i = 0; i < trials; ++i) {
        Outcome out;
        try {
            out = spec.trial(rng, i);
        } catch (const Error& e) {
            out = {kInf, kInf,
                   std::string("case ") + std::to_string(i) + " raised: " + e.what()};
        }
        ++report.cases_run;
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(out.residual));
        report.max_rel_residual = std::max(report.max_rel_residual, out.rel_residual);
        const bool violated = !(out.rel_residual <= spec.tolerance);
        if (violated) {
            report.failures.push_back({out.inputs, out.residual});
        } else {
            every_case_shows_gap = false;
        }
    }
    report.passed = spec.expected_failure ? (every_case_shows_gap && report.cases_run > 0) : report.failures.empty();
    return report;
}

} // namespace tscal
