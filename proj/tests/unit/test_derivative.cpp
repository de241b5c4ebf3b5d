#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tscal;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const Expr t_ = Expr::variable();

} // namespace

TEST_CASE("order split") {
    const auto a = AlphaOrder::from(2.1);
    CHECK(a.n == 2);
    CHECK(a.beta == doctest::Approx(0.1));
    const auto b = AlphaOrder::from(1.0);
    CHECK(b.n == 0);
    CHECK(b.beta == 1.0);
    const auto c = AlphaOrder::from(2.0);
    CHECK(c.n == 1);
    CHECK(c.beta == 1.0);
    CHECK_THROWS_AS(AlphaOrder::from(0), std::invalid_argument);
}

TEST_CASE("t_alpha examples") {
    const auto hz = TimeScale::uniform_lattice(1);
    CHECK(rel(t_alpha(parse_expr("t^2"), hz, 2, 0.5), 5 * std::sqrt(2.0)) <= 1e-15);

    for (const auto& ts : {hz, TimeScale::reals(), TimeScale::q_powers(2), TimeScale::periodic_union(1, 2)})
        for (double t : {1.0, 2.0, 4.0})
            for (double alpha : {0.1, 0.5, 1.0}) CHECK(t_alpha(parse_expr("3.5"), ts, ts.nearest(t), alpha) == 0);

    CHECK(rel(t_alpha(parse_expr("t^3"), TimeScale::reals(), 2, 0.5), 3 * std::pow(2.0, 2.5)) <= 1e-9);
    CHECK(rel(t_alpha(parse_expr("log(t)"), TimeScale::q_powers(2), 8, 0.5), std::log(2.0) / std::sqrt(8.0)) <= 1e-15);
}

TEST_CASE("t_alpha preconditions") {
    const auto hz = TimeScale::uniform_lattice(1);
    CHECK_THROWS_AS(t_alpha(t_, hz, 0, 0.5), NonPositivePoint);
    CHECK_THROWS_AS(t_alpha(t_, hz, -2, 0.5), NonPositivePoint);
    CHECK_THROWS_AS(t_alpha(t_, hz, 1.5, 0.5), NotInScale);
    CHECK_THROWS_AS(t_alpha(t_, TimeScale::finite_set({1, 2, 3}), 3, 0.5), NotInKappa);
    CHECK_THROWS_AS(t_alpha(t_, hz, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(t_alpha(t_, hz, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(t_alpha(parse_expr("abs(t-2)"), TimeScale::reals(), 2, 0.5), LimitDiverged);
    CHECK_THROWS_AS(t_alpha(parse_expr("1/(t-3)"), hz, 2, 0.5), DomainError);
}

TEST_CASE("dense points of mixed scales use the scale-relative neighbourhood") {
    // Left endpoint of a P_{1,2} interval: only the right side exists.
    const auto p = TimeScale::periodic_union(1, 2);
    CHECK(rel(t_alpha(parse_expr("t^2"), p, 3, 1), 6) <= 1e-9);
    // Interval end with only the left side available.
    const auto iv = TimeScale::interval(0, 2);
    CHECK(iv.in_kappa(2));
    CHECK(rel(t_alpha(parse_expr("t^2"), iv, 2, 1), 4) <= 1e-9);
}

TEST_CASE("limit at zero") {
    const auto qz = TimeScale::q_lattice_closure(2);
    const auto sq = t_alpha_at_zero(parse_expr("t^2"), qz, 0.5);
    CHECK(std::abs(sq.value) <= 1e-6);
    CHECK(t_alpha_at_zero(parse_expr("4"), qz, 0.3).value == 0);
    CHECK(std::abs(t_alpha_at_zero(t_, qz, 0.5).value) <= 1e-6);
    // On the line, T_1(sin)(0) = cos(0) = 1 as a right limit.
    CHECK(t_alpha_at_zero(parse_expr("sin(t)"), TimeScale::reals(), 1).value == doctest::Approx(1).epsilon(1e-8));
    CHECK(t_alpha_at_zero(parse_expr("t + 2"), TimeScale::periodic_union(1, 1), 1).value ==
          doctest::Approx(1).epsilon(1e-8));
    CHECK_THROWS_AS(t_alpha_at_zero(t_, TimeScale::q_powers(2), 0.5), ZeroNotInScale);
    CHECK_THROWS_AS(t_alpha_at_zero(t_, TimeScale::uniform_lattice(1), 0.5), ZeroNotInScale);
    // T_{1/2}(t^{1/4}) = t^{-1/4}/4 blows up at 0.
    CHECK_THROWS_AS(t_alpha_at_zero(parse_expr("t^0.25"), qz, 0.5), LimitDiverged);
}

TEST_CASE("iterated delta derivatives") {
    const auto hz = TimeScale::uniform_lattice(1);
    CHECK(delta_derivative_n(parse_expr("t^3"), hz, 1, 2) == 12);
    CHECK(delta_derivative_n(t_, hz, 5, 1) == 1);
    CHECK(delta_derivative_n(t_, TimeScale::reals(), 5, 1) == 1);
    CHECK(delta_derivative_n(parse_expr("t^2"), TimeScale::uniform_lattice(2), 4, 1) == 10);
    // On q^N0, (t^2)^Delta = (q+1) t.
    CHECK(delta_derivative_n(parse_expr("t^2"), TimeScale::q_powers(3), 9, 1) == doctest::Approx(36));
    CHECK_THROWS_AS(delta_derivative_n(t_, TimeScale::finite_set({1, 2, 3}), 2, 2), NotInKappa);
}

TEST_CASE("higher orders") {
    const auto hz = TimeScale::uniform_lattice(1);
    const auto cube = parse_expr("t^3");
    const auto at1 = t_alpha_higher(cube, hz, 1, AlphaOrder::from(2.1));
    CHECK(rel(at1.value, 6) <= 1e-9);
    CHECK(rel(at1.cross_check, 6) <= 1e-9);
    const auto at2 = t_alpha_higher(cube, hz, 2, AlphaOrder::from(2.1));
    CHECK(rel(at2.value, 6 * std::pow(2.0, 0.9)) <= 1e-9);
    CHECK(conformable_derivative(parse_expr("7"), hz, 3, 1.5) == 0);
    CHECK(rel(conformable_derivative(cube, TimeScale::reals(), 2, 1.5), 6 * 2 * std::pow(2.0, 0.5)) <= 1e-9);
    CHECK_THROWS_AS(t_alpha_higher(cube, hz, 1, AlphaOrder::from(0.5)), std::invalid_argument);
}

TEST_CASE("power rule closed forms") {
    CHECK(power_rule(TimeScale::uniform_lattice(1), 2, 1, 2, 0, false) == 5);
    CHECK(rel(power_rule(TimeScale::reals(), 2, 0.5, 3, 0, false), 3 * std::pow(2.0, 2.5)) <= 1e-15);
    CHECK(rel(power_rule(TimeScale::reals(), 2, 0.5, 1, 0, true), -1 / std::pow(2.0, 1.5)) <= 1e-15);
    CHECK_THROWS_AS(power_rule(TimeScale::uniform_lattice(1), 2, 0.5, 1, 3, true), PoleAtPoint);
    CHECK_THROWS_AS(power_rule(TimeScale::uniform_lattice(1), 2, 0.5, 1, 2, true), PoleAtPoint);
}

TEST_CASE("shifted square follows the power rule, not a three-term expansion") {
    // (t-1)^2 on hZ: t^{1-a} [(sigma(t)-1) + (t-1)] = t^{1-a} (2t - 2 + h).
    const auto hz = TimeScale::uniform_lattice(1);
    const auto f = parse_expr("(t-1)^2");
    for (double t : {1.0, 2.0, 5.0}) {
        const double alpha = 0.4;
        const double expected = std::pow(t, 1 - alpha) * (2 * t - 1);
        CHECK(rel(t_alpha(f, hz, t, alpha), expected) <= 1e-14);
        CHECK(rel(power_rule(hz, t, alpha, 2, 1, false), expected) <= 1e-14);
    }
}

TEST_CASE("sigma shift") {
    const auto hz = TimeScale::uniform_lattice(1);
    CHECK(sigma_shift(parse_expr("t^2"), hz, 2, 0.5) == doctest::Approx(9).epsilon(1e-15));
    CHECK(sigma_shift(t_, TimeScale::reals(), 5, 0.7) == 5);
    CHECK(sigma_shift(parse_expr("2.5"), TimeScale::q_powers(3), 9, 0.3) == 2.5);
}

TEST_CASE("chain rule witnesses") {
    const auto two_n = TimeScale::q_powers(2);
    const auto w1 = chain_rule_witness(parse_expr("t^2"), t_, two_n, 4, 0.5);
    CHECK(w1.c == doctest::Approx(6).epsilon(1e-12));
    CHECK(std::abs(w1.residual) <= 1e-8);
    const auto w2 = chain_rule_witness(parse_expr("t^2"), parse_expr("t^2"), two_n, 2, 0.5);
    CHECK(w2.c / 2 == doctest::Approx(std::sqrt(2.5)).epsilon(1e-10));
    const auto w3 = chain_rule_witness(t_, t_, TimeScale::reals(), 3, 1);
    CHECK(w3.c == 3);
    CHECK(std::abs(w3.residual) <= 1e-8);
    // Degenerate inner derivative: any c works and t is returned.
    const auto w4 = chain_rule_witness(parse_expr("t^2"), parse_expr("3"), two_n, 4, 0.5);
    CHECK(w4.c == 4);
}

TEST_CASE("naive chain rule gap") {
    const auto nat = TimeScale::uniform_lattice(1);
    CHECK(std::abs(naive_chain_gap(t_, t_, nat, 4, 0.5) + 2) <= 1e-12);
    CHECK(std::abs(naive_chain_gap(t_, t_, TimeScale::reals(), 1, 0.5)) <= 1e-9);
    CHECK(std::abs(naive_chain_gap(t_, t_, nat, 9, 1)) <= 1e-12);
}

TEST_CASE("property: line derivatives match f' t^(1-alpha)") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> point(0.1, 10), order(0.05, 1);
    const std::vector<Expr> corpus{parse_expr("t^2 - 3*t + 1"), parse_expr("2*t^4 - t^3"), parse_expr("log(t)"),
                                   parse_expr("log(t)^2 + t"), parse_expr("1/t"), parse_expr("sqrt(t) * t")};
    for (const auto& f : corpus) {
        const Expr df = derivative(f);
        for (int i = 0; i < 50; ++i) {
            const double t = point(rng), alpha = order(rng);
            const double expected = eval(df, t) * std::pow(t, 1 - alpha);
            CAPTURE(render(f));
            CAPTURE(t);
            CHECK(std::abs(t_alpha(f, TimeScale::reals(), t, alpha) - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST_CASE("property: alpha = 1 is the delta derivative on every variant") {
    std::mt19937_64 rng(22);
    const std::vector<TimeScale> scales{TimeScale::reals(), TimeScale::uniform_lattice(0.5), TimeScale::q_lattice_closure(2),
                                        TimeScale::q_powers(3), TimeScale::periodic_union(1, 0.5),
                                        TimeScale::finite_set({0.5, 1, 1.75, 3, 4.5, 6})};
    const std::vector<Expr> corpus{parse_expr("t^3 - 2*t"), parse_expr("log(t)"), parse_expr("exp(t/4)"),
                                   parse_expr("1/(t+1)")};
    std::uniform_int_distribution<int> pick_scale(0, static_cast<int>(scales.size()) - 1);
    std::uniform_int_distribution<int> pick_f(0, static_cast<int>(corpus.size()) - 1);
    std::uniform_real_distribution<double> u(0.3, 5.5);
    for (int i = 0; i < 200; ++i) {
        const auto& ts = scales[static_cast<std::size_t>(pick_scale(rng))];
        const auto& f = corpus[static_cast<std::size_t>(pick_f(rng))];
        double t = ts.nearest(u(rng));
        if (!(t > 0) || !ts.in_kappa(t)) continue;
        const double conformable = t_alpha(f, ts, t, 1);
        const double delta = delta_derivative_n(f, ts, t, 1);
        const double bound = ts.mu(t) > 0 ? 1e-12 * std::max(1.0, std::abs(delta)) : 1e-8 * std::max(1.0, std::abs(delta));
        CAPTURE(ts.describe());
        CAPTURE(t);
        CHECK(std::abs(conformable - delta) <= bound);
    }
}
