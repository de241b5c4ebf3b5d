// Randomized checks of the derivative calculus laws with their own
// generators, independent of the oracle module's.
#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tscal;

namespace {

struct Case {
    TimeScale ts;
    double t;
    double alpha;
    Expr f;
    Expr g;
};

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    Expr function() {
        std::uniform_int_distribution<int> kind(0, 5);
        std::uniform_real_distribution<double> c(-2, 2);
        const double a = c(rng_), b = c(rng_), d = c(rng_);
        const Expr t = Expr::variable();
        switch (kind(rng_)) {
        case 0: return Expr::constant(a) * pow(t, 3) + Expr::constant(b) * t + Expr::constant(d);
        case 1: return Expr::constant(a) * apply(Func::Log, t) + Expr::constant(b);
        case 2: return apply(Func::Exp, Expr::constant(a / 4) * t);
        case 3: return apply(Func::Sin, Expr::constant(a) * t + Expr::constant(b));
        case 4: return Expr::constant(a) / (t + Expr::constant(3));
        default: return Expr::constant(a) * apply(Func::Sqrt, t) + Expr::constant(b) * pow(t, 2);
        }
    }

    TimeScale scale() {
        std::uniform_int_distribution<int> kind(0, 4);
        switch (kind(rng_)) {
        case 0: return TimeScale::reals();
        case 1: return TimeScale::uniform_lattice(0.5);
        case 2: return TimeScale::q_lattice_closure(1.5);
        case 3: return TimeScale::q_powers(2);
        default: return TimeScale::periodic_union(0.75, 0.5);
        }
    }

    Case next() {
        TimeScale ts = scale();
        std::uniform_real_distribution<double> where(0.3, 6), order(0.05, 1);
        double t = ts.nearest(where(rng_));
        if (!(t > 0)) t = ts.sigma(t);
        const double alpha = order(rng_);
        Expr f = function();
        Expr g = function();
        return {ts, t, alpha, f, g};
    }

private:
    std::mt19937_64 rng_;
};

double rel(double residual, std::initializer_list<double> terms) {
    double size = 0;
    for (double x : terms) size += std::abs(x);
    return std::abs(residual) / std::max(1.0, size);
}

} // namespace

TEST_CASE("property: sum, scalar and product rules") {
    Generator gen(41);
    for (int i = 0; i < 500; ++i) {
        const auto c = gen.next();
        CAPTURE(c.ts.describe());
        CAPTURE(c.t);
        CAPTURE(c.alpha);
        CAPTURE(render(c.f));
        CAPTURE(render(c.g));
        const double tf = t_alpha(c.f, c.ts, c.t, c.alpha), tg = t_alpha(c.g, c.ts, c.t, c.alpha);
        const double tsum = t_alpha(c.f + c.g, c.ts, c.t, c.alpha);
        CHECK(rel(tsum - tf - tg, {tsum, tf, tg}) <= 1e-10);

        const double lambda = -1.75;
        const double tscaled = t_alpha(Expr::constant(lambda) * c.f, c.ts, c.t, c.alpha);
        CHECK(rel(tscaled - lambda * tf, {tscaled, lambda * tf}) <= 1e-10);

        const double s = c.ts.sigma(c.t);
        const double fs = eval(c.f, s), gs = eval(c.g, s), ft = eval(c.f, c.t), gt = eval(c.g, c.t);
        const double tprod = t_alpha(c.f * c.g, c.ts, c.t, c.alpha);
        CHECK(rel(tprod - (tf * gt + fs * tg), {tprod, tf * gt, fs * tg}) <= 1e-10);
        CHECK(rel(tprod - (tf * gs + ft * tg), {tprod, tf * gs, ft * tg}) <= 1e-10);
    }
}

TEST_CASE("property: reciprocal and quotient rules away from zeros") {
    Generator gen(42);
    int run = 0;
    for (int i = 0; i < 1500 && run < 500; ++i) {
        const auto c = gen.next();
        const double s = c.ts.sigma(c.t);
        const double gt = eval(c.g, c.t), gs = eval(c.g, s);
        if (std::abs(gt) < 0.1 || std::abs(gs) < 0.1) continue;
        ++run;
        CAPTURE(c.ts.describe());
        CAPTURE(c.t);
        CAPTURE(render(c.g));
        const double tg = t_alpha(c.g, c.ts, c.t, c.alpha), tf = t_alpha(c.f, c.ts, c.t, c.alpha);
        const double trecip = t_alpha(Expr::constant(1) / c.g, c.ts, c.t, c.alpha);
        const double recip = -tg / (gt * gs);
        CHECK(rel(trecip - recip, {trecip, recip}) <= 1e-10);
        const double tquot = t_alpha(c.f / c.g, c.ts, c.t, c.alpha);
        const double quot = (tf * gt - eval(c.f, c.t) * tg) / (gt * gs);
        CHECK(rel(tquot - quot, {tquot, quot}) <= 1e-10);
    }
    CHECK(run == 500);
}

TEST_CASE("property: sigma shift") {
    Generator gen(43);
    for (int i = 0; i < 500; ++i) {
        const auto c = gen.next();
        const double shifted = sigma_shift(c.f, c.ts, c.t, c.alpha);
        const double direct = eval(c.f, c.ts.sigma(c.t));
        CAPTURE(c.ts.describe());
        CAPTURE(c.t);
        CHECK(rel(shifted - direct, {shifted, direct}) <= 1e-10);
        if (c.ts.mu(c.t) == 0) CHECK(shifted == direct);
    }
}

TEST_CASE("property: power rule agrees with the numeric derivative") {
    const std::vector<TimeScale> scales{TimeScale::uniform_lattice(1), TimeScale::uniform_lattice(0.5),
                                        TimeScale::q_powers(2), TimeScale::reals()};
    for (const auto& ts : scales) {
        for (int m = 1; m <= 4; ++m) {
            for (double c : {0.0, 1.0, -1.0}) {
                for (double t : {2.0, 4.0, 8.0}) {
                    for (double alpha : {0.3, 1.0}) {
                        CAPTURE(ts.describe());
                        CAPTURE(m);
                        CAPTURE(c);
                        CAPTURE(t);
                        const Expr base = pow(Expr::variable() - Expr::constant(c), m);
                        const double direct = t_alpha(base, ts, t, alpha);
                        const double closed = power_rule(ts, t, alpha, m, c, false);
                        CHECK(rel(direct - closed, {direct, closed}) <= 1e-10);
                        const double rdirect = t_alpha(Expr::constant(1) / base, ts, t, alpha);
                        const double rclosed = power_rule(ts, t, alpha, m, c, true);
                        CHECK(rel(rdirect - rclosed, {rdirect, rclosed}) <= 1e-10);
                    }
                }
            }
        }
    }
}

TEST_CASE("property: chain witnesses lie in [t, sigma(t)] and meet the bound") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> coef(-2, 2), order(0.05, 1);
    const std::vector<TimeScale> scales{TimeScale::q_powers(2), TimeScale::uniform_lattice(1), TimeScale::reals(),
                                        TimeScale::periodic_union(1, 1)};
    std::uniform_int_distribution<int> pick(0, 3), point(1, 4);
    for (int i = 0; i < 200; ++i) {
        const Expr t = Expr::variable();
        const Expr f = Expr::constant(coef(rng)) * pow(t, 2) + Expr::constant(coef(rng)) * t;
        const Expr g = Expr::constant(coef(rng)) * pow(t, 2) + Expr::constant(coef(rng));
        const auto& ts = scales[static_cast<std::size_t>(pick(rng))];
        const double at = ts.nearest(std::pow(2.0, point(rng) - 1) + 0.5 * (i % 2));
        const double alpha = order(rng);
        CAPTURE(ts.describe());
        CAPTURE(at);
        CAPTURE(render(f));
        CAPTURE(render(g));
        const auto w = chain_rule_witness(f, g, ts, at, alpha);
        CHECK(w.c >= at);
        CHECK(w.c <= ts.sigma(at));
        CHECK(std::abs(w.residual) <= 1e-8 * (1 + std::abs(w.composite_derivative)));
    }
}

TEST_CASE("property: definition scan pins down scattered derivatives") {
    Generator gen(45);
    int scattered = 0;
    for (int i = 0; i < 400; ++i) {
        const auto c = gen.next();
        if (c.ts.mu(c.t) == 0) continue;
        ++scattered;
        const double value = t_alpha(c.f, c.ts, c.t, c.alpha);
        CAPTURE(c.ts.describe());
        CAPTURE(c.t);
        CAPTURE(render(c.f));
        CHECK(definition_scan(c.f, c.ts, c.t, c.alpha, value, 1e-9));
        CHECK_FALSE(definition_scan(c.f, c.ts, c.t, c.alpha, value + 1e-3, 1e-9));
        CHECK_FALSE(definition_scan(c.f, c.ts, c.t, c.alpha, value - 1e-3, 1e-9));
    }
    CHECK(scattered > 100);
}
