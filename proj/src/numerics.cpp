#include "tscal/numerics.hpp"

#include "tscal/errors.hpp"
#include "tscal/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tscal {

void DerivConfig::validate() const {
    if (!(initial_step_factor > 0)) throw std::invalid_argument("DerivConfig: initial_step_factor must be > 0");
    if (!(step_ratio > 0 && step_ratio < 1)) throw std::invalid_argument("DerivConfig: step_ratio must be in (0,1)");
    if (step_count < 2 || zero_limit_points < 2) throw std::invalid_argument("DerivConfig: counts must be >= 2");
    if (richardson_depth < 1) throw std::invalid_argument("DerivConfig: richardson_depth must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("DerivConfig: tol must be > 0");
}

RichardsonTable::RichardsonTable(double ratio, int power, int depth) : ratio_(ratio), power_(power), depth_(depth) {}

void RichardsonTable::push(double sample) {
    std::vector<double> row{sample};
    if (!rows_.empty()) {
        const auto& prev = rows_.back();
        const int width = std::min<int>(depth_, static_cast<int>(rows_.size()));
        for (int j = 1; j <= width; ++j) {
            const double factor = std::pow(ratio_, -power_ * j);
            row.push_back((factor * row[j - 1] - prev[j - 1]) / (factor - 1));
        }
    }
    rows_.push_back(std::move(row));
}

double RichardsonTable::estimate() const { return rows_.back().back(); }

LimitResult difference_quotient_limit(const RealFunction& fn, double t, double left_room, double right_room,
                                      const DerivConfig& cfg) {
    cfg.validate();
    double h0 = cfg.initial_step_factor * std::max(1.0, std::abs(t));
    if (t > 0) h0 = std::min(h0, 0.5 * t);

    const double min_useful = 1e-3 * h0;
    const bool two_sided = left_room >= min_useful && right_room >= min_useful;
    int direction = 0; // +1 forward only, -1 backward only
    if (two_sided) {
        h0 = std::min({h0, left_room, right_room});
    } else if (right_room > 0 || left_room > 0) {
        direction = right_room >= left_room ? 1 : -1;
        h0 = std::min(h0, std::max(left_room, right_room));
    } else {
        throw LimitDiverged("no scale points accumulate at t=" + format_real(t));
    }

    const double f0 = fn(t);
    const double floor = std::abs(f0) / std::max(1.0, std::abs(t));

    RichardsonTable central(cfg.step_ratio, 2, cfg.richardson_depth);
    RichardsonTable forward(cfg.step_ratio, 1, cfg.richardson_depth);
    RichardsonTable backward(cfg.step_ratio, 1, cfg.richardson_depth);
    RichardsonTable& primary = two_sided ? central : (direction > 0 ? forward : backward);

    double previous = std::numeric_limits<double>::quiet_NaN();
    double best_gap = std::numeric_limits<double>::infinity();
    bool kink_seen = false;
    double h = h0;
    for (int i = 0; i < cfg.step_count; ++i, h *= cfg.step_ratio) {
        if (two_sided || direction > 0) {
            const double fp = fn(t + h);
            forward.push((fp - f0) / h);
            if (two_sided) {
                const double fm = fn(t - h);
                backward.push((f0 - fm) / h);
                central.push((fp - fm) / (2 * h));
            }
        } else {
            backward.push((f0 - fn(t - h)) / h);
        }
        if (!primary.saturated()) continue;

        const double estimate = primary.estimate();
        if (!std::isfinite(estimate)) throw LimitDiverged("difference quotients are not finite near t=" + format_real(t));
        if (!std::isnan(previous)) {
            const double gap = std::abs(estimate - previous);
            best_gap = std::min(best_gap, gap);
            const double scale = std::max(std::abs(estimate), floor);
            if (gap <= cfg.tol * scale) {
                if (two_sided) {
                    const double sided_gap = std::abs(forward.estimate() - backward.estimate());
                    if (sided_gap > 1e-4 * std::max(scale, 1e-300)) {
                        kink_seen = true;
                        previous = estimate;
                        continue;
                    }
                }
                return {estimate, gap, i + 1};
            }
        }
        previous = estimate;
    }
    if (kink_seen)
        throw LimitDiverged("left and right difference quotients disagree at t=" + format_real(t));
    throw LimitDiverged("difference quotient limit at t=" + format_real(t) + " did not converge (best gap " +
                        format_real(best_gap) + ")");
}

namespace {

std::vector<double> aitken(const std::vector<double>& x) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 2 < x.size(); ++i) {
        const double d1 = x[i + 1] - x[i];
        const double d2 = x[i + 2] - x[i + 1];
        const double den = d2 - d1;
        const double noise = 1e-14 * (std::abs(x[i]) + std::abs(x[i + 1]) + std::abs(x[i + 2]));
        if (std::abs(den) <= noise || !std::isfinite(den))
            out.push_back(x[i + 2]);
        else
            out.push_back(x[i + 2] - d2 * d2 / den);
    }
    return out;
}

} // namespace

LimitResult accelerate_sequence(std::span<const double> values) {
    std::vector<double> level(values.begin(), values.end());
    if (level.empty()) throw LimitDiverged("empty sequence");
    if (level.size() == 1) return {level[0], std::numeric_limits<double>::infinity(), 1};

    LimitResult best{level.back(), std::abs(level.back() - level[level.size() - 2]), 0};
    for (int depth = 1; depth <= 3 && level.size() >= 3; ++depth) {
        level = aitken(level);
        if (level.size() < 2) break;
        const double gap = std::abs(level.back() - level[level.size() - 2]);
        if (gap < best.error_estimate) best = {level.back(), gap, depth};
    }
    return best;
}

namespace {

struct SimpsonState {
    const RealFunction& fn;
    std::size_t max_intervals;
    std::size_t intervals = 0;
    double error = 0;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6 * (fa + 4 * fm + fb); }

double refine(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole, double eps,
              int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.fn(lm);
    const double frm = st.fn(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    // Two forced levels guard against a lucky first estimate.
    if ((std::abs(delta) <= 15 * eps && depth <= 48) || depth <= 0 || lm <= a || rm >= b) {
        if (++st.intervals > st.max_intervals)
            throw QuadratureBudgetExceeded("adaptive quadrature needs more than " + std::to_string(st.max_intervals) +
                                           " intervals");
        st.error += std::abs(delta) / 15;
        return left + right + delta / 15;
    }
    return refine(st, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           refine(st, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

} // namespace

QuadratureResult adaptive_simpson(const RealFunction& fn, double a, double b, double tol, std::size_t max_intervals) {
    if (a == b) return {};
    SimpsonState st{fn, max_intervals};
    const double fa = fn(a);
    const double fb = fn(b);
    const double fm = fn(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    const double eps = tol * std::max(1.0, std::abs(whole));
    const double value = refine(st, a, b, fa, fm, fb, whole, eps, 50);
    return {value, st.error, st.intervals};
}

} // namespace tscal
