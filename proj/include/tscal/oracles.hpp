#pragma once

#include "tscal/expr.hpp"
#include "tscal/timescale.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tscal {

/// Brute-force check of the defining inequality of T_alpha at a point:
/// for s in T-relative neighbourhoods of t of shrinking radius delta,
///   |[f(sigma(t)) - f(s)] t^(1-alpha) - candidate [sigma(t) - s]| <= epsilon |sigma(t) - s|
/// plus a few ulps of floating-point slack. True iff some delta works; at
/// right-dense points delta stops at max(1, t) * 1e-8.
/// Throws NotInScale, NonPositivePoint, NotInKappa.
bool definition_scan(const Expr& f, const TimeScale& ts, double t, double alpha, double candidate, double epsilon);

struct LawFailure {
    std::string inputs;
    double residual;
};

struct VerificationReport {
    std::string law;
    std::size_t cases_run = 0;
    double max_abs_residual = 0;
    double max_rel_residual = 0;
    /// Declared bound on the relative residual for this law.
    double tolerance = 0;
    std::vector<LawFailure> failures;
    /// The law is expected not to hold; it passes when every case shows the gap.
    bool expected_failure = false;
    bool passed = false;
};

/// sum, scalar, product, reciprocal, quotient, sigma_shift, ftc,
/// integral_linearity, integral_additivity, integral_positivity,
/// integral_domination, chain_witness, naive_chain_counterexample,
/// power_rule_vs_talpha, higher_order_consistency.
const std::vector<std::string>& law_names();

/// Runs `trials` random cases of a law. Bit-for-bit reproducible for a fixed
/// (law, trials, seed). Throws UnknownLaw.
VerificationReport run_law_suite(const std::string& law, std::size_t trials, std::uint64_t seed);

} // namespace tscal
