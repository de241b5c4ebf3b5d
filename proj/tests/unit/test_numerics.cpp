#include "tscal/errors.hpp"
#include "tscal/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace tscal;

TEST_CASE("config validation") {
    DerivConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.step_ratio = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.step_count = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.tol = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.initial_step_factor = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("Richardson table removes the leading error terms") {
    // Samples of 1 + h + h^2 at h = 1, 1/2, 1/4: two eliminations are exact.
    RichardsonTable table(0.5, 1, 2);
    for (double h : {1.0, 0.5, 0.25}) table.push(1 + h + h * h);
    CHECK(table.saturated());
    CHECK(table.estimate() == doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("difference quotient limits") {
    const DerivConfig cfg;
    const auto sq = difference_quotient_limit([](double t) { return t * t; }, 3, 1e9, 1e9, cfg);
    CHECK(sq.value == doctest::Approx(6).epsilon(1e-12));
    // One-sided at an interval endpoint.
    const auto right = difference_quotient_limit([](double t) { return std::exp(t); }, 1, 0, 0.5, cfg);
    CHECK(right.value == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    const auto left = difference_quotient_limit([](double t) { return std::sin(t); }, 2, 0.5, 0, cfg);
    CHECK(left.value == doctest::Approx(std::cos(2.0)).epsilon(1e-9));
    CHECK_THROWS_AS(difference_quotient_limit([](double t) { return std::abs(t - 1); }, 1, 1, 1, cfg), LimitDiverged);
    CHECK_THROWS_AS(difference_quotient_limit([](double t) { return t; }, 1, 0, 0, cfg), LimitDiverged);
}

TEST_CASE("sequence acceleration") {
    std::vector<double> geometric;
    for (int k = 0; k < 12; ++k) geometric.push_back(2 + 3 * std::pow(0.5, k));
    const auto lim = accelerate_sequence(geometric);
    CHECK(lim.value == doctest::Approx(2).epsilon(1e-12));

    std::vector<double> two_modes;
    for (int k = 0; k < 12; ++k) two_modes.push_back(-1 + std::pow(0.5, k) + 0.3 * std::pow(0.25, k));
    CHECK(accelerate_sequence(two_modes).value == doctest::Approx(-1).epsilon(1e-10));
    CHECK_THROWS_AS(accelerate_sequence(std::vector<double>{}), LimitDiverged);
}

TEST_CASE("adaptive Simpson") {
    const auto cubic = adaptive_simpson([](double t) { return t * t * t; }, 0, 2, 1e-12, 1000);
    CHECK(cubic.value == doctest::Approx(4).epsilon(1e-14));
    const auto osc = adaptive_simpson([](double t) { return std::sin(t); }, 0, M_PI, 1e-12, 1 << 16);
    CHECK(osc.value == doctest::Approx(2).epsilon(1e-11));
    CHECK(adaptive_simpson([](double t) { return t; }, 1, 1, 1e-10, 10).value == 0);
    CHECK_THROWS_AS(adaptive_simpson([](double t) { return std::sin(1 / t); }, 1e-6, 1, 1e-14, 8),
                    QuadratureBudgetExceeded);
}
