#include "tscal/timescale.hpp"

#include "tscal/errors.hpp"
#include "tscal/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tscal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tolerance_at(double t) { return kMembershipTolerance * std::max(1.0, std::abs(t)); }

bool near(double x, double y) { return std::abs(x - y) <= tolerance_at(y); }

double closest(double t, std::initializer_list<double> candidates) {
    double best = *candidates.begin();
    for (double c : candidates)
        if (std::abs(c - t) < std::abs(best - t)) best = c;
    return best;
}

// Integer exponent k with q^k nearest to t > 0 (log-space estimate, then
// checked against neighbours in linear space).
double q_index(double q, double t) {
    const double k = std::nearbyint(std::log(t) / std::log(q));
    const double here = std::pow(q, k);
    const double below = std::pow(q, k - 1);
    const double above = std::pow(q, k + 1);
    const double best = closest(t, {here, below, above});
    if (best == below) return k - 1;
    if (best == above) return k + 1;
    return k;
}

struct PeriodPosition {
    double k;      // period index
    double start;  // k (a + b)
    double offset; // t - start
};

PeriodPosition locate(const PeriodicUnion& p, double t) {
    const double period = p.a + p.b;
    double k = std::floor(t / period);
    double start = k * period;
    // t a hair below the next period start belongs to the next period.
    if (near(start + period, t)) {
        k += 1;
        start = k * period;
    }
    return {k, start, t - start};
}

std::size_t finite_index(const FiniteSet& s, double t) {
    const auto& pts = s.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), t);
    if (it == pts.end()) return pts.size() - 1;
    if (it == pts.begin()) return 0;
    const auto i = static_cast<std::size_t>(it - pts.begin());
    return (std::abs(pts[i] - t) <= std::abs(pts[i - 1] - t)) ? i : i - 1;
}

void validate(const ScaleVariant& v) {
    std::visit(overloaded{
                   [](const RealInterval& r) {
                       if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi)
                           throw ScaleSpecError("interval needs lo <= hi");
                   },
                   [](const UniformLattice& l) {
                       if (!(l.h > 0) || !std::isfinite(l.h)) throw ScaleSpecError("hZ needs finite h > 0");
                   },
                   [](const QLatticeClosure& q) {
                       if (!(q.q > 1) || !std::isfinite(q.q)) throw ScaleSpecError("qZbar needs finite q > 1");
                   },
                   [](const QPowers& q) {
                       if (!(q.q > 1) || !std::isfinite(q.q)) throw ScaleSpecError("qN0 needs finite q > 1");
                   },
                   [](const PeriodicUnion& p) {
                       if (!(p.a > 0) || !(p.b > 0) || !std::isfinite(p.a) || !std::isfinite(p.b))
                           throw ScaleSpecError("Pab needs finite a > 0 and b > 0");
                   },
                   [](const FiniteSet& f) {
                       if (f.points.empty()) throw ScaleSpecError("finite set needs at least one point");
                       for (std::size_t i = 0; i < f.points.size(); ++i) {
                           if (!std::isfinite(f.points[i])) throw ScaleSpecError("finite set points must be finite");
                           if (i > 0 && !(f.points[i] > f.points[i - 1]))
                               throw ScaleSpecError("finite set points must be strictly increasing");
                       }
                   },
               },
               v);
}

void set_start(Cell& cell, double x) {
    std::visit(overloaded{
                   [x](Jump& j) { j.t = x; },
                   [x](Segment& s) { s.lo = x; },
                   [](AccumulationTail&) {},
               },
               cell);
}

void set_end(Cell& cell, double x) {
    std::visit(overloaded{
                   [x](Jump& j) { j.sigma_t = x; },
                   [x](Segment& s) { s.hi = x; },
                   [x](AccumulationTail& a) { a.hi = x; },
               },
               cell);
}

void check_cells(double count, const DecomposeOptions& opts) {
    if (count > static_cast<double>(opts.max_cells))
        throw DecompositionTooLarge("decomposition needs " + format_real(count) + " cells (limit " +
                                    std::to_string(opts.max_cells) + ")");
}

std::vector<Cell> lattice_cells(const std::vector<double>& points) {
    std::vector<Cell> cells;
    cells.reserve(points.size());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) cells.emplace_back(Jump{points[i], points[i + 1]});
    return cells;
}

} // namespace

double cell_start(const Cell& cell) {
    return std::visit(overloaded{
                          [](const Jump& j) { return j.t; },
                          [](const Segment& s) { return s.lo; },
                          [](const AccumulationTail&) { return 0.0; },
                      },
                      cell);
}

double cell_end(const Cell& cell) {
    return std::visit(overloaded{
                          [](const Jump& j) { return j.sigma_t; },
                          [](const Segment& s) { return s.hi; },
                          [](const AccumulationTail& a) { return a.hi; },
                      },
                      cell);
}

std::string to_string(const PointClass& cls) {
    std::string s = cls.right_scattered() ? "right-scattered" : "right-dense";
    s += cls.left_scattered() ? "/left-scattered" : "/left-dense";
    if (cls.is_min) s += ",min";
    if (cls.is_max) s += ",max";
    return s;
}

TimeScale::TimeScale(ScaleVariant v) : v_(std::move(v)) { validate(v_); }

double TimeScale::nearest(double t) const {
    return std::visit(overloaded{
                          [t](const RealInterval& r) { return std::clamp(t, r.lo, r.hi); },
                          [t](const UniformLattice& l) { return std::nearbyint(t / l.h) * l.h; },
                          [t](const QLatticeClosure& q) {
                              if (t <= 0) return 0.0;
                              const double p = std::pow(q.q, q_index(q.q, t));
                              return closest(t, {p, 0.0});
                          },
                          [t](const QPowers& q) {
                              if (t <= 1) return 1.0;
                              return std::pow(q.q, std::max(0.0, q_index(q.q, t)));
                          },
                          [t](const PeriodicUnion& p) {
                              if (t <= 0) return 0.0;
                              const auto pos = locate(p, t);
                              if (pos.offset <= p.a) return t;
                              return closest(t, {pos.start + p.a, pos.start + p.a + p.b});
                          },
                          [t](const FiniteSet& f) { return f.points[finite_index(f, t)]; },
                      },
                      v_);
}

bool TimeScale::contains(double t) const {
    if (!std::isfinite(t)) return false;
    if (const auto* r = std::get_if<RealInterval>(&v_)) return r->lo <= t && t <= r->hi;
    return near(nearest(t), t);
}

double TimeScale::sigma(double t) const {
    if (!contains(t)) throw NotInScale(t);
    return std::visit(overloaded{
                          [t](const RealInterval&) { return t; },
                          [t](const UniformLattice& l) { return t + l.h; },
                          [t, this](const QLatticeClosure& q) { return nearest(t) == 0.0 ? 0.0 : q.q * t; },
                          [t](const QPowers& q) { return q.q * t; },
                          [t](const PeriodicUnion& p) {
                              const auto pos = locate(p, t);
                              return near(pos.start + p.a, t) ? t + p.b : t;
                          },
                          [t](const FiniteSet& f) {
                              const auto i = finite_index(f, t);
                              return i + 1 < f.points.size() ? f.points[i + 1] : t;
                          },
                      },
                      v_);
}

double TimeScale::mu(double t) const {
    if (!contains(t)) throw NotInScale(t);
    return std::visit(overloaded{
                          [](const RealInterval&) { return 0.0; },
                          [](const UniformLattice& l) { return l.h; },
                          [t, this](const QLatticeClosure& q) { return nearest(t) == 0.0 ? 0.0 : (q.q - 1) * t; },
                          [t](const QPowers& q) { return (q.q - 1) * t; },
                          [t](const PeriodicUnion& p) {
                              const auto pos = locate(p, t);
                              return near(pos.start + p.a, t) ? p.b : 0.0;
                          },
                          [t](const FiniteSet& f) {
                              const auto i = finite_index(f, t);
                              return i + 1 < f.points.size() ? f.points[i + 1] - t : 0.0;
                          },
                      },
                      v_);
}

double TimeScale::rho(double t) const {
    if (!contains(t)) throw NotInScale(t);
    return std::visit(overloaded{
                          [t](const RealInterval&) { return t; },
                          [t](const UniformLattice& l) { return t - l.h; },
                          [t, this](const QLatticeClosure& q) { return nearest(t) == 0.0 ? 0.0 : t / q.q; },
                          [t, this](const QPowers& q) { return nearest(t) == 1.0 ? t : t / q.q; },
                          [t](const PeriodicUnion& p) {
                              const auto pos = locate(p, t);
                              const bool at_start = near(pos.start, t);
                              return (at_start && pos.k >= 1) ? t - p.b : t;
                          },
                          [t](const FiniteSet& f) {
                              const auto i = finite_index(f, t);
                              return i > 0 ? f.points[i - 1] : t;
                          },
                      },
                      v_);
}

std::optional<double> TimeScale::min() const {
    return std::visit(overloaded{
                          [](const RealInterval& r) -> std::optional<double> {
                              if (std::isfinite(r.lo)) return r.lo;
                              return std::nullopt;
                          },
                          [](const UniformLattice&) -> std::optional<double> { return std::nullopt; },
                          [](const QLatticeClosure&) -> std::optional<double> { return 0.0; },
                          [](const QPowers&) -> std::optional<double> { return 1.0; },
                          [](const PeriodicUnion&) -> std::optional<double> { return 0.0; },
                          [](const FiniteSet& f) -> std::optional<double> { return f.points.front(); },
                      },
                      v_);
}

std::optional<double> TimeScale::max() const {
    if (const auto* r = std::get_if<RealInterval>(&v_)) {
        if (std::isfinite(r->hi)) return r->hi;
        return std::nullopt;
    }
    if (const auto* f = std::get_if<FiniteSet>(&v_)) return f->points.back();
    return std::nullopt;
}

PointClass TimeScale::classify(double t) const {
    if (!contains(t)) throw NotInScale(t);
    PointClass cls;
    cls.right = mu(t) > 0 ? Density::Scattered : Density::Dense;
    cls.left = rho(t) < t ? Density::Scattered : Density::Dense;
    if (const auto lo = min()) cls.is_min = near(*lo, t);
    if (const auto hi = max()) cls.is_max = near(*hi, t);
    return cls;
}

bool TimeScale::in_kappa(double t) const {
    const auto cls = classify(t);
    return !(cls.is_max && cls.left_scattered());
}

std::pair<double, double> TimeScale::continuum_around(double t) const {
    if (!contains(t)) throw NotInScale(t);
    if (const auto* r = std::get_if<RealInterval>(&v_)) return {r->lo, r->hi};
    if (const auto* p = std::get_if<PeriodicUnion>(&v_)) {
        auto pos = locate(*p, t);
        if (pos.offset < 0) pos.offset = 0;
        return {pos.start, pos.start + p->a};
    }
    return {t, t};
}

bool TimeScale::is_discrete() const noexcept {
    return std::holds_alternative<UniformLattice>(v_) || std::holds_alternative<QPowers>(v_) ||
           std::holds_alternative<FiniteSet>(v_);
}

std::vector<Cell> TimeScale::decompose(double a, double b, const DecomposeOptions& opts) const {
    if (!contains(a)) throw NotInScale(a);
    if (!contains(b)) throw NotInScale(b);
    if (a > b) throw ReversedBounds(a, b);
    if (a == b) return {};

    std::vector<Cell> cells = std::visit(
        overloaded{
            [&](const RealInterval&) { return std::vector<Cell>{Segment{a, b}}; },
            [&](const UniformLattice& l) {
                const double ka = std::nearbyint(a / l.h);
                const double kb = std::nearbyint(b / l.h);
                check_cells(kb - ka, opts);
                std::vector<double> pts;
                for (double k = ka; k <= kb; k += 1) pts.push_back(k * l.h);
                return lattice_cells(pts);
            },
            [&](const QLatticeClosure& q) {
                std::vector<Cell> out;
                const double kb = q_index(q.q, b);
                double ka;
                if (nearest(a) == 0.0) {
                    const double cutoff = -static_cast<double>(opts.q_tail_exponent);
                    if (kb <= cutoff) return std::vector<Cell>{AccumulationTail{b}};
                    out.emplace_back(AccumulationTail{std::pow(q.q, cutoff)});
                    ka = cutoff;
                } else {
                    ka = q_index(q.q, a);
                }
                check_cells(kb - ka, opts);
                std::vector<double> pts;
                for (double k = ka; k <= kb; k += 1) pts.push_back(std::pow(q.q, k));
                auto jumps = lattice_cells(pts);
                out.insert(out.end(), jumps.begin(), jumps.end());
                return out;
            },
            [&](const QPowers& q) {
                const double ka = q_index(q.q, a);
                const double kb = q_index(q.q, b);
                check_cells(kb - ka, opts);
                std::vector<double> pts;
                for (double k = ka; k <= kb; k += 1) pts.push_back(std::pow(q.q, k));
                return lattice_cells(pts);
            },
            [&](const PeriodicUnion& p) {
                std::vector<Cell> out;
                const double period = p.a + p.b;
                const auto first = locate(p, a);
                const auto last = locate(p, b);
                check_cells(2 * (last.k - first.k + 1), opts);
                for (double k = first.k; k <= last.k; k += 1) {
                    const double seg_lo = k * period;
                    const double seg_hi = seg_lo + p.a;
                    const double lo = std::max(a, seg_lo);
                    const double hi = std::min(b, seg_hi);
                    if (hi - lo > tolerance_at(hi)) out.emplace_back(Segment{lo, hi});
                    if (seg_hi >= a - tolerance_at(a) && seg_hi < b - tolerance_at(b))
                        out.emplace_back(Jump{seg_hi, seg_hi + p.b});
                }
                return out;
            },
            [&](const FiniteSet& f) {
                const auto ia = finite_index(f, a);
                const auto ib = finite_index(f, b);
                std::vector<double> pts(f.points.begin() + static_cast<std::ptrdiff_t>(ia),
                                        f.points.begin() + static_cast<std::ptrdiff_t>(ib) + 1);
                return lattice_cells(pts);
            },
        },
        v_);

    if (cells.empty()) return cells;
    // Pin exact endpoints and make neighbours share them.
    set_start(cells.front(), a);
    for (std::size_t i = 1; i < cells.size(); ++i) set_start(cells[i], cell_end(cells[i - 1]));
    set_end(cells.back(), b);
    return cells;
}

std::vector<double> TimeScale::sample(double a, double b, std::size_t max_points) const {
    max_points = std::max<std::size_t>(max_points, 2);
    const auto cells = decompose(a, b);
    if (cells.empty()) return {a};

    std::vector<double> boundaries;
    double segment_length = 0;
    for (const auto& c : cells) {
        boundaries.push_back(cell_start(c));
        if (const auto* s = std::get_if<Segment>(&c)) segment_length += s->hi - s->lo;
    }
    boundaries.push_back(b);

    auto subsample = [max_points](const std::vector<double>& pts) {
        if (pts.size() <= max_points) return pts;
        std::vector<double> out;
        out.reserve(max_points);
        const double stride = static_cast<double>(pts.size() - 1) / static_cast<double>(max_points - 1);
        for (std::size_t i = 0; i < max_points; ++i)
            out.push_back(pts[static_cast<std::size_t>(std::llround(static_cast<double>(i) * stride))]);
        return out;
    };

    if (segment_length == 0 || boundaries.size() >= max_points) return subsample(boundaries);

    const std::size_t budget = max_points - boundaries.size();
    std::vector<double> pts = boundaries;
    for (const auto& c : cells) {
        const auto* s = std::get_if<Segment>(&c);
        if (!s) continue;
        const auto n = static_cast<std::size_t>(
            std::floor(static_cast<double>(budget) * (s->hi - s->lo) / segment_length));
        for (std::size_t i = 1; i <= n; ++i)
            pts.push_back(s->lo + (s->hi - s->lo) * static_cast<double>(i) / static_cast<double>(n + 1));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::string TimeScale::describe() const {
    return std::visit(overloaded{
                          [](const RealInterval& r) -> std::string {
                              if (!std::isfinite(r.lo) && !std::isfinite(r.hi)) return "R";
                              return "R[" + format_real(r.lo) + "," + format_real(r.hi) + "]";
                          },
                          [](const UniformLattice& l) { return "hZ(h=" + format_real(l.h) + ")"; },
                          [](const QLatticeClosure& q) { return "qZbar(q=" + format_real(q.q) + ")"; },
                          [](const QPowers& q) { return "qN0(q=" + format_real(q.q) + ")"; },
                          [](const PeriodicUnion& p) {
                              return "Pab(a=" + format_real(p.a) + ",b=" + format_real(p.b) + ")";
                          },
                          [](const FiniteSet& f) { return "finite[" + std::to_string(f.points.size()) + " points]"; },
                      },
                      v_);
}

// ---------------------------------------------------------------------------
// scale-spec grammar

namespace {

std::string strip_spaces(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& spec) {
    if (text.empty()) throw ScaleSpecError("missing number in scale spec '" + spec + "'");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || std::isnan(v))
        throw ScaleSpecError("bad number '" + text + "' in scale spec '" + spec + "'");
    return v;
}

// Matches "<prefix>" + body + ")" and returns body.
std::optional<std::string> call_body(const std::string& s, const std::string& prefix) {
    if (s.size() < prefix.size() + 1 || s.compare(0, prefix.size(), prefix) != 0 || s.back() != ')')
        return std::nullopt;
    return s.substr(prefix.size(), s.size() - prefix.size() - 1);
}

double keyed(const std::string& body, const std::string& key, const std::string& spec) {
    if (body.compare(0, key.size() + 1, key + "=") != 0)
        throw ScaleSpecError("expected '" + key + "=' in scale spec '" + spec + "'");
    return parse_number(body.substr(key.size() + 1), spec);
}

} // namespace

FiniteSet read_finite_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScaleSpecError("cannot open finite-set file '" + path + "'");
    FiniteSet set;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            set.points.push_back(parse_number(line, path));
        } catch (const ScaleSpecError&) {
            throw ScaleSpecError(path + ":" + std::to_string(lineno) + ": not a real number: '" + line + "'");
        }
    }
    return set;
}

TimeScale parse_scale(const std::string& raw) {
    const std::string spec = trim(raw);
    if (auto body = call_body(spec, "finite(")) return TimeScale(read_finite_set(trim(*body)));

    const std::string s = strip_spaces(spec);
    if (s == "R") return TimeScale::reals();
    if (s.size() > 3 && s.compare(0, 2, "R[") == 0 && s.back() == ']') {
        const std::string body = s.substr(2, s.size() - 3);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw ScaleSpecError("expected 'R[lo,hi]', got '" + spec + "'");
        return TimeScale::interval(parse_number(body.substr(0, comma), spec),
                                   parse_number(body.substr(comma + 1), spec));
    }
    if (auto body = call_body(s, "hZ(")) return TimeScale::uniform_lattice(keyed(*body, "h", spec));
    if (auto body = call_body(s, "qZbar(")) return TimeScale::q_lattice_closure(keyed(*body, "q", spec));
    if (auto body = call_body(s, "qN0(")) return TimeScale::q_powers(keyed(*body, "q", spec));
    if (auto body = call_body(s, "Pab(")) {
        const auto comma = body->find(',');
        if (comma == std::string::npos) throw ScaleSpecError("expected 'Pab(a=..,b=..)', got '" + spec + "'");
        return TimeScale::periodic_union(keyed(body->substr(0, comma), "a", spec),
                                         keyed(body->substr(comma + 1), "b", spec));
    }
    throw ScaleSpecError("unrecognised scale spec '" + spec +
                         "' (expected R, R[lo,hi], hZ(h=..), qZbar(q=..), qN0(q=..), Pab(a=..,b=..) or finite(path))");
}

} // namespace tscal
