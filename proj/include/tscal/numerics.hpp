#pragma once

#include "tscal/expr.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tscal {

/// Numerical policy for right-dense limits and the limit at 0.
struct DerivConfig {
    /// h0 = initial_step_factor * max(1, t), capped so steps stay inside the
    /// continuum around t (and below t/2 for t > 0).
    double initial_step_factor = 1e-3;
    double step_ratio = 0.5;
    int step_count = 20;
    int richardson_depth = 2;
    /// Relative tolerance between consecutive extrapolated estimates.
    double tol = 1e-9;
    int zero_limit_points = 12;

    void validate() const;
};

/// Richardson extrapolation over samples taken at h0 * ratio^i, where the
/// error expands in powers p, 2p, 3p, ... of h. Row i of the returned table
/// holds the estimates that use samples 0..i; entry [i][j] eliminates j
/// error terms.
class RichardsonTable {
public:
    RichardsonTable(double ratio, int power, int depth);

    void push(double sample);
    /// Best estimate from the latest row (eliminating min(i, depth) terms).
    double estimate() const;
    std::size_t size() const noexcept { return rows_.size(); }
    bool saturated() const noexcept { return static_cast<int>(rows_.size()) > depth_; }

private:
    double ratio_;
    int power_;
    int depth_;
    std::vector<std::vector<double>> rows_;
};

struct LimitResult {
    double value;
    double error_estimate;
    int steps_used;
};

/// lim_{s -> t, s in [t - left_room, t + right_room]} (fn(t) - fn(s)) / (t - s).
///
/// Uses central differences (error in h^2) when both sides have room, one
/// sided otherwise; two-sided limits are also checked for a kink by
/// comparing the forward and backward one-sided limits.
/// Throws LimitDiverged when consecutive extrapolants never agree to cfg.tol.
LimitResult difference_quotient_limit(const RealFunction& fn, double t, double left_room, double right_room,
                                      const DerivConfig& cfg);

/// Iterated Aitken extrapolation of a sequence assumed to converge
/// geometrically (sums of geometric modes). Returns the estimate whose two
/// most recent entries agree best, with that gap as the error estimate.
LimitResult accelerate_sequence(std::span<const double> values);

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    std::size_t intervals = 0;
};

/// Adaptive Simpson with Richardson-corrected panels on [a, b]. The target
/// accuracy is tol * max(1, |estimate|). Throws QuadratureBudgetExceeded
/// when more than max_intervals panels are needed.
QuadratureResult adaptive_simpson(const RealFunction& fn, double a, double b, double tol, std::size_t max_intervals);

} // namespace tscal
