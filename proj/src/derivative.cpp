#include "tscal/derivative.hpp"

#include "tscal/errors.hpp"
#include "tscal/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tscal {

namespace {

void check_alpha_unit(double alpha) {
    if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1], got " + format_real(alpha));
}

// Shared preconditions of every pointwise conformable operation.
void check_point(const TimeScale& ts, double t) {
    if (!ts.contains(t)) throw NotInScale(t);
    if (!(t > 0)) throw NonPositivePoint(t);
    if (!ts.in_kappa(t)) throw NotInKappa(t);
}

double dense_delta(const RealFunction& f, const TimeScale& ts, double t, const DerivConfig& cfg) {
    const auto [lo, hi] = ts.continuum_around(t);
    return difference_quotient_limit(f, t, t - lo, hi - t, cfg).value;
}

} // namespace

AlphaOrder AlphaOrder::from(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha))
        throw std::invalid_argument("order must be a finite alpha > 0, got " + format_real(alpha));
    const int n = static_cast<int>(std::ceil(alpha)) - 1;
    return {alpha, n, alpha - n};
}

double t_alpha(const RealFunction& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg) {
    check_alpha_unit(alpha);
    check_point(ts, t);
    const double scale = std::pow(t, 1 - alpha);
    const double mu = ts.mu(t);
    if (mu > 0) return (f(ts.sigma(t)) - f(t)) / mu * scale;
    return dense_delta(f, ts, t, cfg) * scale;
}

double t_alpha(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg) {
    return t_alpha(as_function(f), ts, t, alpha, cfg);
}

ZeroLimit t_alpha_at_zero(const Expr& f, const TimeScale& ts, double alpha, const DerivConfig& cfg) {
    check_alpha_unit(alpha);
    cfg.validate();
    if (!ts.contains(0.0)) throw ZeroNotInScale("0 is not a point of " + ts.describe());
    if (ts.mu(0.0) > 0) throw ZeroNotInScale("no points of " + ts.describe() + " approach 0 from the right");

    std::vector<double> points;
    if (const auto* q = std::get_if<QLatticeClosure>(&ts.variant())) {
        const double k0 = std::ceil(4 * std::log(2.0) / std::log(q->q));
        for (int j = 0; j < cfg.zero_limit_points; ++j) points.push_back(std::pow(q->q, -(k0 + j)));
    } else {
        const double room = ts.continuum_around(0.0).second;
        if (!(room > 0)) throw ZeroNotInScale("no points of " + ts.describe() + " approach 0 from the right");
        double t = std::min(1.0 / 16, room / 2);
        for (int j = 0; j < cfg.zero_limit_points; ++j, t /= 2) points.push_back(t);
    }

    std::vector<double> values;
    values.reserve(points.size());
    for (double t : points) values.push_back(t_alpha(f, ts, t, alpha, cfg));

    const std::size_t n = values.size();
    const double first_step = std::abs(values[1] - values[0]);
    const double last_step = std::abs(values[n - 1] - values[n - 2]);
    if (last_step > first_step && last_step > cfg.tol * std::max(1.0, std::abs(values[n - 1])))
        throw LimitDiverged("T_alpha(f)(t) does not settle as t -> 0+");

    const auto limit = accelerate_sequence(values);
    if (!(limit.error_estimate <= 1e3 * cfg.tol * std::max(1.0, std::abs(limit.value))))
        throw LimitDiverged("limit at 0 not resolved (error estimate " + format_real(limit.error_estimate) + ")");
    return {limit.value, limit.error_estimate};
}

double delta_derivative_n(const Expr& f, const TimeScale& ts, double t, int n, const DerivConfig& cfg) {
    (void)cfg;
    if (n < 1) throw std::invalid_argument("delta derivative order must be >= 1");
    if (!ts.contains(t)) throw NotInScale(t);

    // chain[j] = sigma^j(t); only extended through scattered points.
    std::vector<double> chain{t};
    std::vector<Expr> classical{f};
    std::vector<std::vector<std::optional<double>>> memo(static_cast<std::size_t>(n) + 1);

    auto classical_derivative = [&](int k) -> const Expr& {
        while (static_cast<int>(classical.size()) <= k) classical.push_back(derivative(classical.back()));
        return classical[static_cast<std::size_t>(k)];
    };

    auto value = [&](auto&& self, int k, std::size_t j) -> double {
        auto& row = memo[static_cast<std::size_t>(k)];
        if (row.size() <= j) row.resize(j + 1);
        if (row[j]) return *row[j];
        const double s = chain[j];
        double out;
        if (k == 0) {
            out = eval(f, s);
        } else {
            if (!ts.in_kappa(s)) throw NotInKappa(s);
            const double mu = ts.mu(s);
            if (mu > 0) {
                if (chain.size() <= j + 1) chain.push_back(ts.sigma(s));
                out = (self(self, k - 1, j + 1) - self(self, k - 1, j)) / mu;
            } else {
                const auto [lo, hi] = ts.continuum_around(s);
                if (!(hi > lo)) throw LimitDiverged("no scale points accumulate at t=" + format_real(s));
                out = eval(classical_derivative(k), s);
            }
        }
        memo[static_cast<std::size_t>(k)][j] = out;
        return out;
    };
    return value(value, n, 0);
}

HigherOrderResult t_alpha_higher(const Expr& f, const TimeScale& ts, double t, const AlphaOrder& order,
                                 const DerivConfig& cfg) {
    if (order.n < 1) throw std::invalid_argument("t_alpha_higher needs alpha > 1");
    check_point(ts, t);
    const double scale = std::pow(t, 1 - order.beta);
    const double primary = scale * delta_derivative_n(f, ts, t, order.n + 1, cfg);

    const RealFunction inner = [&](double s) { return delta_derivative_n(f, ts, s, order.n, cfg); };
    const double cross = t_alpha(inner, ts, t, order.beta, cfg);

    const double gap = std::abs(primary - cross);
    if (gap > 1e-9 * std::max(std::abs(primary), std::abs(cross)) && gap > 1e-12)
        throw InternalDisagreement(primary, cross);
    return {primary, cross, gap};
}

double conformable_derivative(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg) {
    const auto order = AlphaOrder::from(alpha);
    if (order.n == 0) return t_alpha(f, ts, t, alpha, cfg);
    return t_alpha_higher(f, ts, t, order, cfg).value;
}

double power_rule(const TimeScale& ts, double t, double alpha, int m, double c, bool reciprocal) {
    check_alpha_unit(alpha);
    if (m < 1) throw std::invalid_argument("power rule needs m >= 1");
    if (!ts.contains(t)) throw NotInScale(t);
    if (!(t > 0)) throw NonPositivePoint(t);
    const double s = ts.sigma(t);
    const double scale = std::pow(t, 1 - alpha);
    double total = 0;
    if (!reciprocal) {
        for (int p = 0; p < m; ++p) total += std::pow(s - c, m - 1 - p) * std::pow(t - c, p);
        return scale * total;
    }
    if ((t - c) * (s - c) == 0)
        throw PoleAtPoint("1/(t-c)^m has a pole at t=" + format_real(t) + " or sigma(t)=" + format_real(s));
    for (int p = 0; p < m; ++p) total += 1 / (std::pow(s - c, p + 1) * std::pow(t - c, m - p));
    return -scale * total;
}

double sigma_shift(const Expr& f, const TimeScale& ts, double t, double alpha, const DerivConfig& cfg) {
    const double derivative_value = t_alpha(f, ts, t, alpha, cfg);
    return eval(f, t) + ts.mu(t) * std::pow(t, alpha - 1) * derivative_value;
}

ChainWitness chain_rule_witness(const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha,
                                const DerivConfig& cfg) {
    const double composite = t_alpha(compose(f, g), ts, t, alpha, cfg);
    const double inner = t_alpha(g, ts, t, alpha, cfg);
    const Expr outer_prime = derivative(f);
    const double bound = 1e-8 * (1 + std::abs(composite));
    auto residual = [&](double c) { return composite - eval(outer_prime, eval(g, c)) * inner; };

    const double r_start = residual(t);
    if (std::abs(r_start) <= bound) return {t, r_start, composite, inner};
    const double s = ts.sigma(t);
    if (!(s > t))
        throw NoWitnessFound("residual " + format_real(r_start) + " at the dense point t=" + format_real(t) +
                             " exceeds " + format_real(bound));

    constexpr int kGrid = 10000;
    auto grid = [&](int i) { return i == kGrid ? s : t + (s - t) * (static_cast<double>(i) / kGrid); };

    double prev_c = t;
    double prev_r = r_start;
    int best_i = 0;
    double best_abs = std::abs(r_start);
    for (int i = 1; i <= kGrid; ++i) {
        const double c = grid(i);
        const double r = residual(c);
        if (std::abs(r) <= bound && !(std::signbit(r) != std::signbit(prev_r))) return {c, r, composite, inner};
        if (std::signbit(r) != std::signbit(prev_r)) {
            // Bracketed root: bisect down to adjacent doubles.
            double lo = prev_c, hi = c, r_lo = prev_r;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double r_mid = residual(mid);
                if (r_mid == 0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(r_mid) == std::signbit(r_lo)) {
                    lo = mid;
                    r_lo = r_mid;
                } else {
                    hi = mid;
                }
            }
            const double r_low = residual(lo);
            const double r_high = residual(hi);
            const double root = std::abs(r_low) <= std::abs(r_high) ? lo : hi;
            const double r_root = std::min(std::abs(r_low), std::abs(r_high)) == std::abs(r_low) ? r_low : r_high;
            if (std::abs(r_root) <= bound) return {root, r_root, composite, inner};
            throw NoWitnessFound("bisection stalled with residual " + format_real(r_root));
        }
        if (std::abs(r) < best_abs) {
            best_abs = std::abs(r);
            best_i = i;
        }
        prev_c = c;
        prev_r = r;
    }

    // Tangential root: golden-section search on |residual| around the best grid point.
    double lo = grid(std::max(0, best_i - 1));
    double hi = grid(std::min(kGrid, best_i + 1));
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = std::abs(residual(x1));
    double f2 = std::abs(residual(x2));
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = std::abs(residual(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = std::abs(residual(x2));
        }
    }
    const double c = f1 <= f2 ? x1 : x2;
    const double r = residual(c);
    if (std::abs(r) <= bound) return {c, r, composite, inner};
    throw NoWitnessFound("no c in [" + format_real(t) + ", " + format_real(s) + "] meets the residual bound (best " +
                         format_real(std::abs(r)) + ")");
}

double naive_chain_gap(const Expr& f, const Expr& g, const TimeScale& ts, double t, double alpha,
                       const DerivConfig& cfg) {
    const double composite = t_alpha(compose(f, g), ts, t, alpha, cfg);
    const double inner = t_alpha(g, ts, t, alpha, cfg);
    const double outer_at_inner = t_alpha(f, ts, eval(g, t), alpha, cfg);
    return composite - outer_at_inner * inner;
}

} // namespace tscal
