#pragma once

#include "tscal/expr.hpp"
#include "tscal/numerics.hpp"
#include "tscal/timescale.hpp"

namespace tscal {

/// Order alpha > 0 split as alpha = n + beta with n = ceil(alpha) - 1 and
/// beta in (0, 1].
struct AlphaOrder {
    double alpha;
    int n;
    double beta;

    static AlphaOrder from(double alpha);
};

/// Conformable fractional derivative T_alpha(f)(t) for alpha in (0, 1], t > 0.
///
/// Right-scattered t: [f(sigma(t)) - f(t)] / mu(t) * t^(1-alpha), exactly.
/// Right-dense t: Richardson-extrapolated limit of the difference quotient
/// over scale points near t, times t^(1-alpha).
/// Throws NonPositivePoint, NotInScale, NotInKappa, LimitDiverged, DomainError.
double t_alpha(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg = {});
double t_alpha(const RealFunction& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg = {});

struct ZeroLimit {
    double value;
    double error_estimate;
};

/// T_alpha(f)(0) = lim_{t -> 0+} T_alpha(f)(t), extrapolated from
/// cfg.zero_limit_points scale points approaching 0. Requires 0 in the scale
/// and scale points accumulating at 0 from the right (ZeroNotInScale
/// otherwise).
ZeroLimit t_alpha_at_zero(const Expr& f, const TimeScale& ts, double alpha, const DerivConfig& cfg = {});

/// n-th delta derivative f^{Delta^n}(t): nested divided differences across
/// scattered points, n-th symbolic derivative at dense points.
double delta_derivative_n(const Expr& f, const TimeScale& ts, double t, int n, const DerivConfig& cfg = {});

struct HigherOrderResult {
    /// t^(1+n-alpha) * f^{Delta^(n+1)}(t).
    double value;
    /// T_beta(f^{Delta^n})(t).
    double cross_check;
    double disagreement;
};

/// Order alpha in (n, n+1], n >= 1. Both routes must agree within 1e-9
/// relative or InternalDisagreement is thrown.
HigherOrderResult t_alpha_higher(const Expr& f, const TimeScale& ts, double t, const AlphaOrder& order,
                                 const DerivConfig& cfg = {});

/// Dispatches on alpha: t_alpha for alpha <= 1, t_alpha_higher otherwise.
double conformable_derivative(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg = {});

/// Closed-form T_alpha of (t-c)^m, or of 1/(t-c)^m when reciprocal is set.
double power_rule(const TimeScale& ts, double t, double alpha, int m, double c, bool reciprocal);

/// f(t) + mu(t) t^(alpha-1) T_alpha(f)(t); equals f(sigma(t)).
double sigma_shift(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg = {});

struct ChainWitness {
    double c;
    double residual;
    double composite_derivative; // T_alpha(f o g)(t)
    double inner_derivative;     // T_alpha(g)(t)
};

/// Smallest c in [t, sigma(t)] with T_alpha(f o g)(t) = f'(g(c)) T_alpha(g)(t)
/// up to 1e-8 (1 + |T_alpha(f o g)(t)|). Throws NoWitnessFound.
ChainWitness chain_rule_witness(const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha,
                                const DerivConfig& cfg = {});

/// T_alpha(f o g)(t) - T_alpha(f)(g(t)) T_alpha(g)(t): how far the classical
/// chain rule is from holding. g(t) must lie in the scale.
double naive_chain_gap(const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha,
                       const DerivConfig& cfg = {});

} // namespace tscal
