#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tscal {

/// Relative tolerance used for membership tests on lattice-like scales:
/// |t - nearest point| <= kMembershipTolerance * max(1, |t|).
inline constexpr double kMembershipTolerance = 1e-12;

/// The continuum, or a closed interval of it.
struct RealInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// hZ = { h k : k in Z }.
struct UniformLattice {
    double h = 1.0;
};

/// q^Z together with its accumulation point 0.
struct QLatticeClosure {
    double q = 2.0;
};

/// q^N0 = { q^n : n >= 0 }.
struct QPowers {
    double q = 2.0;
};

/// P_{a,b}: union over k >= 0 of [k(a+b), k(a+b)+a].
struct PeriodicUnion {
    double a = 1.0;
    double b = 1.0;
};

/// Strictly increasing, nonempty list of points.
struct FiniteSet {
    std::vector<double> points;
};

using ScaleVariant = std::variant<RealInterval, UniformLattice, QLatticeClosure, QPowers, PeriodicUnion, FiniteSet>;

enum class Density { Dense, Scattered };

struct PointClass {
    Density right = Density::Dense;
    Density left = Density::Dense;
    bool is_min = false;
    bool is_max = false;

    bool right_scattered() const noexcept { return right == Density::Scattered; }
    bool left_scattered() const noexcept { return left == Density::Scattered; }
};

/// "right-dense/left-scattered" style label, with ",min"/",max" suffixes.
std::string to_string(const PointClass& cls);

/// Isolated step [t, sigma(t)) of width mu(t) > 0.
struct Jump {
    double t;
    double sigma_t;
};

/// Maximal stretch of continuum contained in the scale.
struct Segment {
    double lo;
    double hi;
};

/// [0, hi] on q^Z u {0}: infinitely many jumps accumulating at 0 that are
/// not enumerated. Consumers sum the tail as a series.
struct AccumulationTail {
    double hi;
};

using Cell = std::variant<Jump, Segment, AccumulationTail>;

double cell_start(const Cell& cell);
double cell_end(const Cell& cell);

struct DecomposeOptions {
    /// Smallest enumerated q-power on q^Z u {0} is q^-tail_exponent.
    int q_tail_exponent = 64;
    /// Guard against pathological ranges (e.g. hZ over [0, 1e12]).
    std::size_t max_cells = std::size_t{1} << 24;
};

/// An arbitrary nonempty closed subset of the reals, restricted to the
/// families we can answer structural questions about in closed form.
class TimeScale {
public:
    explicit TimeScale(ScaleVariant v);

    static TimeScale reals() { return TimeScale(RealInterval{}); }
    static TimeScale interval(double lo, double hi) { return TimeScale(RealInterval{lo, hi}); }
    static TimeScale uniform_lattice(double h) { return TimeScale(UniformLattice{h}); }
    static TimeScale q_lattice_closure(double q) { return TimeScale(QLatticeClosure{q}); }
    static TimeScale q_powers(double q) { return TimeScale(QPowers{q}); }
    static TimeScale periodic_union(double a, double b) { return TimeScale(PeriodicUnion{a, b}); }
    static TimeScale finite_set(std::vector<double> points) { return TimeScale(FiniteSet{std::move(points)}); }

    const ScaleVariant& variant() const noexcept { return v_; }

    /// Closest point of the scale to t (ties resolve downward).
    double nearest(double t) const;
    bool contains(double t) const;

    double sigma(double t) const;
    double mu(double t) const;
    /// Backward jump; only used internally for left classification.
    double rho(double t) const;
    PointClass classify(double t) const;
    bool in_kappa(double t) const;

    std::optional<double> min() const;
    std::optional<double> max() const;

    /// The maximal continuum segment [lo, hi] containing t; [t, t] when t
    /// has no continuum on either side.
    std::pair<double, double> continuum_around(double t) const;

    /// Ordered cells covering [a, b] ∩ T. First start is a, last end is b,
    /// consecutive cells share endpoints. Empty when a == b.
    std::vector<Cell> decompose(double a, double b, const DecomposeOptions& opts = {}) const;

    /// Representative scale points of [a, b] ∩ T in ascending order: all of
    /// them when there are at most max_points, otherwise a uniform subsample.
    /// Always contains a and b.
    std::vector<double> sample(double a, double b, std::size_t max_points) const;

    /// Text in the scale-spec grammar that parses back to this scale
    /// (finite sets only report their size).
    std::string describe() const;

    /// True when every point of the scale is right-scattered.
    bool is_discrete() const noexcept;

private:
    ScaleVariant v_;
};

/// Parses a scale description:
///   R | R[lo,hi] | hZ(h=..) | qZbar(q=..) | qN0(q=..) | Pab(a=..,b=..) | finite(path)
/// Throws ScaleSpecError on malformed text or invalid parameters.
TimeScale parse_scale(const std::string& spec);

/// Reads a finite-set file: one real per line, ascending, '#' comments.
FiniteSet read_finite_set(const std::string& path);

} // namespace tscal
