#pragma once

#include "tscal/expr.hpp"
#include "tscal/numerics.hpp"
#include "tscal/timescale.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tscal {

struct IntegralConfig {
    /// Absolute-plus-relative target: each continuum piece aims for
    /// quad_tol * max(1, |piece|).
    double quad_tol = 1e-10;
    std::size_t max_subdivisions = std::size_t{1} << 20;
    /// q^Z u {0}: jumps below q^-q_tail_exponent are summed as a geometric tail.
    int q_tail_exponent = 64;

    void validate() const;
};

struct IntegralResult {
    double value = 0;
    double est_error = 0;
    std::size_t cells_used = 0;
};

/// Cauchy alpha-fractional integral of f from a to b:
/// integral of f(t) t^(alpha-1) Delta t. Jumps contribute
/// f(t) t^(alpha-1) mu(t); continuum segments are integrated adaptively,
/// with geometric subdivision toward an integrable singularity at 0.
/// Computed on the sorted endpoints and signed, so swapping a and b negates
/// the value exactly.
IntegralResult cauchy(const Expr& f, const TimeScale& ts, double a, double b, double alpha,
                      const IntegralConfig& cfg = {});
IntegralResult cauchy(const RealFunction& f, const TimeScale& ts, double a, double b, double alpha,
                      const IntegralConfig& cfg = {});

/// f(t) mu(t) t^(alpha-1): the integral over the single step [t, sigma(t)].
double single_grain(const Expr& f, const TimeScale& ts, double t, double alpha);

/// F_alpha(t) normalised by F_alpha(base) = 0.
double indefinite(const Expr& f, const TimeScale& ts, double base, double t, double alpha,
                  const IntegralConfig& cfg = {});

struct FtcPoint {
    double t;
    double expected;  // f(t)
    double recovered; // T_alpha(F_alpha)(t), NaN when the point failed
    double deviation; // |recovered - expected| / max(1, |expected|)
    std::string error;
};

struct FtcReport {
    std::vector<FtcPoint> points;
    double max_deviation = 0;
    bool passed = false;
};

/// Checks T_alpha(F_alpha)(t) = f(t) at each point. Scattered points use the
/// jump formula on F_alpha; dense points differentiate the quadrature
/// accumulator numerically. Per-point failures are recorded, never thrown.
FtcReport ftc_check(const Expr& f, const TimeScale& ts, const std::vector<double>& points, double alpha,
                    const DerivConfig& dcfg = {}, const IntegralConfig& icfg = {});

enum class MonotonicityStatus { Monotone, Violations, HypothesisViolated };

std::string to_string(MonotonicityStatus status);

struct MonotonicityViolation {
    double s;
    double t;
    double f_s;
    double f_t;
};

struct MonotonicityReport {
    MonotonicityStatus status = MonotonicityStatus::Monotone;
    std::size_t samples = 0;
    double min_derivative = 0;
    std::vector<MonotonicityViolation> violations;
};

/// Samples [a, b] ∩ T (all points up to 1e4, else a uniform subsample).
/// When T_alpha(f) >= -1e-12 on [a, b) the report lists every sampled pair
/// s <= t with f(s) > f(t) + 1e-10 (1 + |f(t)|).
MonotonicityReport monotonicity_check(const Expr& f, const TimeScale& ts, double a, double b, double alpha,
                                      const DerivConfig& cfg = {});

} // namespace tscal
