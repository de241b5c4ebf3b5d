#include "tscal/integral.hpp"

#include "tscal/derivative.hpp"
#include "tscal/errors.hpp"
#include "tscal/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tscal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kMaxSingularPieces = 1000;
constexpr int kMaxTailTerms = 4096;

void check_alpha_unit(double alpha) {
    if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1], got " + format_real(alpha));
}

struct Accumulator {
    const RealFunction& f;
    const TimeScale& ts;
    double alpha;
    const IntegralConfig& cfg;
    double value = 0;
    double error = 0;
    std::size_t intervals = 0;

    double integrand(double t) const { return f(t) * std::pow(t, alpha - 1); }

    std::size_t budget_left() const {
        if (intervals >= cfg.max_subdivisions)
            throw QuadratureBudgetExceeded("quadrature budget of " + std::to_string(cfg.max_subdivisions) +
                                           " intervals exhausted");
        return cfg.max_subdivisions - intervals;
    }

    QuadratureResult quadrature(double lo, double hi, double tol) {
        const RealFunction g = [this](double t) { return integrand(t); };
        const auto q = adaptive_simpson(g, lo, hi, tol, budget_left());
        intervals += q.intervals;
        return q;
    }

    void jump(const Jump& j) {
        if (j.t == 0 && alpha < 1)
            throw EndpointSingularity("jump at t=0 carries the non-integrable weight 0^(alpha-1)");
        value += f(j.t) * std::pow(j.t, alpha - 1) * ts.mu(j.t);
    }

    void segment(const Segment& s) {
        if (s.lo > 0 || alpha == 1) {
            const auto q = quadrature(s.lo, s.hi, cfg.quad_tol);
            value += q.value;
            error += q.error_estimate;
            return;
        }
        // t^(alpha-1) is singular at 0: integrate over [x/2, x] pieces
        // shrinking toward 0 and close with a geometric tail estimate.
        const double piece_tol = cfg.quad_tol / 16;
        double sum = 0;
        double previous = std::numeric_limits<double>::quiet_NaN();
        double x = s.hi;
        for (int k = 0; k < kMaxSingularPieces; ++k, x /= 2) {
            const auto q = quadrature(x / 2, x, piece_tol);
            sum += q.value;
            error += q.error_estimate;
            if (k >= 2) {
                if (q.value == 0 && previous == 0) {
                    value += sum;
                    return;
                }
                const double ratio = q.value / previous;
                if (ratio > 0 && ratio < 1) {
                    const double tail = q.value * ratio / (1 - ratio);
                    if (std::abs(tail) < cfg.quad_tol * std::max(1.0, std::abs(sum))) {
                        value += sum + tail;
                        error += std::abs(tail);
                        return;
                    }
                }
            }
            previous = q.value;
        }
        throw EndpointSingularity("integral toward t=0 did not converge after " +
                                  std::to_string(kMaxSingularPieces) + " geometric pieces");
    }

    void tail(const AccumulationTail& cell) {
        const auto& scale = std::get<QLatticeClosure>(ts.variant());
        const double q = scale.q;
        const double ratio = std::pow(q, -alpha);
        double sum = 0;
        double x = cell.hi / q;
        for (int j = 1; j <= kMaxTailTerms && x > 0; ++j, x /= q) {
            const double term = (q - 1) * f(x) * std::pow(x, alpha);
            sum += term;
            const double rest = term * ratio / (1 - ratio);
            if (std::abs(rest) < 0.1 * cfg.quad_tol * std::max(1.0, std::abs(sum))) {
                value += sum + rest;
                error += std::abs(rest);
                return;
            }
        }
        throw EndpointSingularity("jump series accumulating at 0 does not meet quad_tol");
    }
};

} // namespace

void IntegralConfig::validate() const {
    if (!(quad_tol > 0)) throw std::invalid_argument("IntegralConfig: quad_tol must be > 0");
    if (max_subdivisions < 1) throw std::invalid_argument("IntegralConfig: max_subdivisions must be >= 1");
    if (q_tail_exponent < 1) throw std::invalid_argument("IntegralConfig: q_tail_exponent must be >= 1");
}

IntegralResult cauchy(const RealFunction& f, const TimeScale& ts, double a, double b, double alpha,
                      const IntegralConfig& cfg) {
    check_alpha_unit(alpha);
    cfg.validate();
    if (!ts.contains(a)) throw NotInScale(a);
    if (!ts.contains(b)) throw NotInScale(b);
    if (a < 0) throw NonPositivePoint(a);
    if (b < 0) throw NonPositivePoint(b);

    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double sign = a <= b ? 1.0 : -1.0;
    if (lo == hi) return {};

    DecomposeOptions opts;
    opts.q_tail_exponent = cfg.q_tail_exponent;
    opts.max_cells = cfg.max_subdivisions;
    const auto cells = ts.decompose(lo, hi, opts);

    Accumulator acc{f, ts, alpha, cfg};
    for (const auto& cell : cells) {
        std::visit(overloaded{
                       [&](const Jump& j) { acc.jump(j); },
                       [&](const Segment& s) { acc.segment(s); },
                       [&](const AccumulationTail& t) { acc.tail(t); },
                   },
                   cell);
    }
    if (!std::isfinite(acc.value)) throw DomainError("f", lo, "integral is not finite");
    return {sign * acc.value, acc.error, cells.size()};
}

IntegralResult cauchy(const Expr& f, const TimeScale& ts, double a, double b, double alpha,
                      const IntegralConfig& cfg) {
    return cauchy(as_function(f), ts, a, b, alpha, cfg);
}

double single_grain(const Expr& f, const TimeScale& ts, double t, double alpha) {
    check_alpha_unit(alpha);
    if (!ts.contains(t)) throw NotInScale(t);
    if (!(t > 0)) throw NonPositivePoint(t);
    if (!ts.in_kappa(t)) throw NotInKappa(t);
    return eval(f, t) * ts.mu(t) * std::pow(t, alpha - 1);
}

double indefinite(const Expr& f, const TimeScale& ts, double base, double t, double alpha,
                  const IntegralConfig& cfg) {
    return cauchy(f, ts, base, t, alpha, cfg).value;
}

FtcReport ftc_check(const Expr& f, const TimeScale& ts, const std::vector<double>& points, double alpha,
                    const DerivConfig& dcfg, const IntegralConfig& icfg) {
    FtcReport report;
    report.passed = true;
    IntegralConfig fine = icfg;
    fine.quad_tol = std::min(icfg.quad_tol, 1e-13);

    for (double t : points) {
        FtcPoint p{t, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::infinity(), {}};
        try {
            if (!ts.contains(t)) throw NotInScale(t);
            if (!(t > 0)) throw NonPositivePoint(t);
            if (!ts.in_kappa(t)) throw NotInKappa(t);
            p.expected = eval(f, t);
            const double scale = std::pow(t, 1 - alpha);
            const double mu = ts.mu(t);
            if (mu > 0) {
                p.recovered = cauchy(f, ts, t, ts.sigma(t), alpha, icfg).value / mu * scale;
            } else {
                // F_alpha(s) - F_alpha(t) as a function of s near t.
                const RealFunction accumulated = [&](double s) { return cauchy(f, ts, t, s, alpha, fine).value; };
                const auto [lo, hi] = ts.continuum_around(t);
                p.recovered = difference_quotient_limit(accumulated, t, t - lo, hi - t, dcfg).value * scale;
            }
            p.deviation = std::abs(p.recovered - p.expected) / std::max(1.0, std::abs(p.expected));
        } catch (const std::exception& e) {
            p.error = e.what();
        }
        if (!p.error.empty() || !(p.deviation <= 1e-6)) report.passed = false;
        report.max_deviation = std::max(report.max_deviation, p.deviation);
        report.points.push_back(std::move(p));
    }
    return report;
}

std::string to_string(MonotonicityStatus status) {
    switch (status) {
    case MonotonicityStatus::Monotone: return "monotone";
    case MonotonicityStatus::Violations: return "violations";
    case MonotonicityStatus::HypothesisViolated: return "hypothesis-violated";
    }
    return "?";
}

MonotonicityReport monotonicity_check(const Expr& f, const TimeScale& ts, double a, double b, double alpha,
                                      const DerivConfig& cfg) {
    if (!ts.contains(a)) throw NotInScale(a);
    if (!ts.contains(b)) throw NotInScale(b);
    if (a > b) throw ReversedBounds(a, b);
    if (!(a > 0)) throw NonPositivePoint(a);

    MonotonicityReport report;
    const auto samples = ts.sample(a, b, 10000);
    report.samples = samples.size();
    report.min_derivative = std::numeric_limits<double>::infinity();
    for (double t : samples) {
        if (t >= b && samples.size() > 1) break;
        report.min_derivative = std::min(report.min_derivative, t_alpha(f, ts, t, alpha, cfg));
    }
    if (report.min_derivative < -1e-12) {
        report.status = MonotonicityStatus::HypothesisViolated;
        return report;
    }

    double running_max = -std::numeric_limits<double>::infinity();
    double argmax = a;
    for (double t : samples) {
        const double value = eval(f, t);
        if (running_max > value + 1e-10 * (1 + std::abs(value)) && report.violations.size() < 100)
            report.violations.push_back({argmax, t, running_max, value});
        if (value > running_max) {
            running_max = value;
            argmax = t;
        }
    }
    report.status = report.violations.empty() ? MonotonicityStatus::Monotone : MonotonicityStatus::Violations;
    return report;
}

} // namespace tscal
