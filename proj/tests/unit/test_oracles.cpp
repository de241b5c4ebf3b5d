#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace tscal;

TEST_CASE("definition scan examples") {
    const auto hz = TimeScale::uniform_lattice(1);
    const auto sq = parse_expr("t^2");
    CHECK(definition_scan(sq, hz, 2, 0.5, 5 * std::sqrt(2.0), 1e-9));
    CHECK_FALSE(definition_scan(sq, hz, 2, 0.5, 5 * std::sqrt(2.0) + 0.01, 1e-9));
    CHECK(definition_scan(parse_expr("4"), TimeScale::q_powers(2), 8, 0.3, 0, 1e-12));
    CHECK_THROWS_AS(definition_scan(sq, TimeScale::finite_set({1, 2}), 2, 0.5, 0, 1e-9), NotInKappa);
}

TEST_CASE("definition scan at a right-scattered point with a continuum on its left") {
    // t = 1 ends [0,1] in P_{1,2}; the neighbourhood includes s < 1.
    const auto p = TimeScale::periodic_union(1, 2);
    const auto f = parse_expr("t^3 - t");
    const double value = t_alpha(f, p, 1, 0.6);
    CHECK(definition_scan(f, p, 1, 0.6, value, 1e-9));
    CHECK_FALSE(definition_scan(f, p, 1, 0.6, value + 1e-3, 1e-9));
    CHECK_FALSE(definition_scan(f, p, 1, 0.6, value - 1e-3, 1e-9));
}

TEST_CASE("definition scan at dense points") {
    const auto line = TimeScale::reals();
    const auto f = parse_expr("t^2");
    CHECK(definition_scan(f, line, 2, 0.5, 4 * std::sqrt(2.0), 1e-6));
    CHECK_FALSE(definition_scan(f, line, 2, 0.5, 4 * std::sqrt(2.0) + 1e-3, 1e-6));
}

TEST_CASE("law suites") {
    const auto sum = run_law_suite("sum", 500, 7);
    CHECK(sum.cases_run == 500);
    CHECK(sum.failures.empty());
    CHECK(sum.passed);

    const auto naive = run_law_suite("naive_chain_counterexample", 1, 0);
    CHECK(naive.expected_failure);
    CHECK(naive.passed);
    REQUIRE(naive.failures.size() == 1);
    CHECK(std::abs(naive.failures.front().residual + 2) <= 1e-12);
    CHECK(naive.failures.front().inputs.find("t=4") != std::string::npos);

    const auto ftc = run_law_suite("ftc", 50, 1);
    CHECK(ftc.max_rel_residual <= 1e-6);
    CHECK(ftc.passed);

    CHECK_THROWS_AS(run_law_suite("unknown_law", 1, 0), UnknownLaw);
}

TEST_CASE("every named law is registered and reproducible") {
    for (const auto& law : law_names()) {
        CAPTURE(law);
        const auto a = run_law_suite(law, 20, 99);
        const auto b = run_law_suite(law, 20, 99);
        CHECK(a.passed);
        CHECK(a.cases_run == 20);
        CHECK(a.max_abs_residual == b.max_abs_residual);
        CHECK(a.max_rel_residual == b.max_rel_residual);
        REQUIRE(a.failures.size() == b.failures.size());
        for (std::size_t i = 0; i < a.failures.size(); ++i) {
            CHECK(a.failures[i].inputs == b.failures[i].inputs);
            CHECK(a.failures[i].residual == b.failures[i].residual);
        }
    }
    CHECK(law_names().size() == 15);
}

TEST_CASE("different seeds draw different cases") {
    const auto a = run_law_suite("product", 50, 1);
    const auto b = run_law_suite("product", 50, 2);
    CHECK(a.max_abs_residual != b.max_abs_residual);
}
