#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "torus_ends/character.hpp"
#include "torus_ends/farey.hpp"

namespace torus_ends {

// A trace value; once its magnitude passes saturation_bound it is pinned there and reads as infinitely large.
struct TraceValue {
    Complex v;
    bool saturated = false;

    TraceValue() = default;
    TraceValue(Complex value, bool sat = false) : v(value), saturated(sat) { clamp(); }

    double mag() const { return saturated ? std::numeric_limits<double>::infinity() : std::abs(v); }
    bool operator==(const TraceValue&) const = default;

private:
    void clamp() {
        double m = std::abs(v);
        if (!(m <= saturation_bound)) saturated = true;
        if (saturated) {
            if (std::isfinite(m) && m > 0)
                v *= saturation_bound / m;
            else
                v = saturation_bound;
        }
    }
};

// Value of the region across an edge: a b - c.
inline TraceValue across(const TraceValue& a, const TraceValue& b, const TraceValue& c) {
    return {a.v * b.v - c.v, a.saturated || b.saturated || c.saturated};
}

namespace detail {

struct IntervalValues {
    TraceValue lo, hi, opp;
};

inline IntervalValues base_values(const Character& ch, std::size_t which) {
    switch (which) {
        case 0: return {ch.x(), ch.z(), ch.y()};
        case 1: return {ch.z(), ch.y(), ch.x()};
        default: return {ch.y(), ch.x(), ch.z()};
    }
}

inline std::size_t base_index(const Slope& s) { return s.num() < 0 ? 2 : (s.num() < s.den() ? 0 : 1); }

// Runs the Farey descent towards s while carrying the three values; on_step sees each interval with values.
template <class F>
void descend_values(const Character& ch, const Slope& s, F&& on_step) {
    IntervalValues val = base_values(ch, base_index(s));
    std::optional<DescentStep> prev;
    descend(s, [&](const DescentStep& st) {
        if (prev) {
            TraceValue m = across(val.lo, val.hi, val.opp);
            if (st.lo == prev->mid())
                val = {m, val.hi, val.lo};
            else
                val = {val.lo, m, val.hi};
        }
        on_step(st, static_cast<const IntervalValues&>(val));
        prev = st;
    });
}

}  // namespace detail

inline TraceValue trace_at(const Character& ch, const Slope& s) {
    if (s == Slope(0, 1)) return ch.x();
    if (s.is_infinite()) return ch.y();
    if (s == Slope(1, 1)) return ch.z();
    detail::IntervalValues last;
    detail::descend_values(ch, s, [&](const DescentStep&, const detail::IntervalValues& v) { last = v; });
    return across(last.lo, last.hi, last.opp);
}

struct VertexState {
    FareyTriple triple;
    std::array<TraceValue, 3> values;

    bool saturated() const { return values[0].saturated || values[1].saturated || values[2].saturated; }
    double residual(Complex k) const {
        auto [x, y, z] = std::array{values[0].v, values[1].v, values[2].v};
        return std::abs(x * x + y * y + z * z - x * y * z - 2.0 - k);
    }
    double scale() const {
        double m = 1;
        for (auto& v : values) m = std::max(m, 1 + std::abs(v.v));
        return m * m * m;
    }
    const TraceValue& at(const Slope& s) const {
        for (std::size_t i = 0; i < 3; ++i)
            if (triple[i] == s) return values[i];
        throw std::invalid_argument("slope not in vertex");
    }
};

// Builds a vertex from slopes and values in any order.
inline VertexState make_vertex(std::array<std::pair<Slope, TraceValue>, 3> items) {
    FareyTriple t(items[0].first, items[1].first, items[2].first);
    VertexState vs{t, {}};
    for (auto& [s, v] : items)
        for (std::size_t i = 0; i < 3; ++i)
            if (t[i] == s) vs.values[i] = v;
    return vs;
}

inline VertexState vertex_state(const Character& ch, const FareyTriple& t) {
    return {t, {trace_at(ch, t[0]), trace_at(ch, t[1]), trace_at(ch, t[2])}};
}

struct EdgeState {
    FareyPair pair;
    TraceValue x, y;
    Slope z_slope, zp_slope;
    TraceValue z, zp;

    bool saturated() const { return x.saturated || y.saturated || z.saturated || zp.saturated; }
    double residual() const { return std::abs(z.v + zp.v - x.v * y.v); }
};

inline EdgeState edge_state(const Character& ch, const FareyPair& e) {
    auto [zs, zps] = e.opposite();
    TraceValue x = trace_at(ch, e.a), y = trace_at(ch, e.b), z = trace_at(ch, zs);
    return {e, x, y, zs, zps, z, trace_at(ch, zps)};
}

enum class NeighborCase { a, b, c, d, e };

inline char case_name(NeighborCase c) { return "abcde"[static_cast<int>(c)]; }

// Closed form for the neighbour values y_n around a region with value x.
struct NeighborModel {
    Slope center;
    Complex x;
    Complex lambda;
    Complex A, B;
    Complex y0, y1;
    Complex step;  // linear cases: y_n = y0 + n step, alternating for x near -2
    NeighborCase kind = NeighborCase::a;

    Complex value(long long n) const {
        double dn = static_cast<double>(n);
        if (kind == NeighborCase::c) return y0 + dn * step;
        if (kind == NeighborCase::d) return (n % 2 == 0 ? 1.0 : -1.0) * (y0 + dn * step);
        return A * std::pow(lambda, dn) + B * std::pow(lambda, -dn);
    }
};

inline constexpr double degenerate_band = 1e-3;

inline NeighborModel neighbor_model(Complex x, Complex y0, Complex y1, Complex k, double eps = default_tol) {
    NeighborModel m;
    m.x = x;
    m.y0 = y0;
    m.y1 = y1;
    m.lambda = big_root(x);
    Complex l = m.lambda, li = 1.0 / l;
    if (std::abs(l - li) > 0) {
        m.A = (y1 - y0 * li) / (l - li);
        m.B = y0 - m.A;
    }
    if (std::abs(x * x - (k + 2.0)) <= eps)
        m.kind = NeighborCase::e;
    else if (std::abs(x * x - 4.0) <= degenerate_band) {
        m.kind = x.real() > 0 ? NeighborCase::c : NeighborCase::d;
        m.step = m.kind == NeighborCase::c ? y1 - y0 : -y1 - y0;
    } else if (is_real(x, eps) && std::abs(x.real()) < 2)
        m.kind = NeighborCase::b;
    else
        m.kind = NeighborCase::a;
    return m;
}

struct Neighbors {
    long long n_lo = 0;
    std::vector<TraceValue> values;  // values[i] is y_{n_lo + i}
    NeighborModel model;
};

inline constexpr long long neighbor_budget = 1'000'000;

inline Neighbors neighbors_of(const Character& ch, const Slope& s, long long n_lo, long long n_hi, double eps = default_tol) {
    if (n_hi < n_lo || n_hi - n_lo > neighbor_budget) throw std::invalid_argument("neighbour range out of budget");
    auto ring = neighbor_ring(s);
    TraceValue x = trace_at(ch, s), y0 = trace_at(ch, ring.at(0)), y1 = trace_at(ch, ring.at(1));
    Neighbors out;
    out.n_lo = n_lo;
    out.model = neighbor_model(x.v, y0.v, y1.v, ch.kappa(), eps);
    out.model.center = s;
    out.values.resize(n_hi - n_lo + 1);
    auto put = [&](long long n, const TraceValue& v) {
        if (n >= n_lo && n <= n_hi) out.values[n - n_lo] = v;
    };
    put(0, y0);
    put(1, y1);
    TraceValue prev = y0, cur = y1;
    for (long long n = 2; n <= n_hi; ++n) {
        TraceValue nx = across(x, cur, prev);
        prev = cur, cur = nx;
        put(n, cur);
    }
    prev = y1, cur = y0;
    for (long long n = -1; n >= n_lo; --n) {
        TraceValue nx = across(x, cur, prev);
        prev = cur, cur = nx;
        put(n, cur);
    }
    return out;
}

struct FlowArrow {
    FareyPair edge;
    DirectedFareyEdge direction;
    bool tie = false;
};

inline bool flow_tie(double m1, double m2, double eps) {
    if (std::isinf(m1) || std::isinf(m2)) return std::isinf(m1) && std::isinf(m2);
    return std::abs(m1 - m2) <= eps * std::max(1.0, std::max(m1, m2));
}

// Orientation of edge e given the values of the two opposite regions.
inline FlowArrow orient(const FareyPair& e, const Slope& z_slope, double z_mag, const Slope& zp_slope, double zp_mag, double eps) {
    FlowArrow f{e, {e, z_slope, zp_slope}, false};
    if (flow_tie(z_mag, zp_mag, eps)) {
        f.tie = true;
        auto dz = depth(z_slope), dzp = depth(zp_slope);
        bool toward_z = dz != dzp ? dz < dzp : z_slope < zp_slope;
        if (toward_z) f.direction = {e, zp_slope, z_slope};
    } else if (z_mag < zp_mag) {
        f.direction = {e, zp_slope, z_slope};
    }
    return f;
}

inline FlowArrow flow_at(const Character& ch, const FareyPair& e, double eps = default_tol) {
    auto [zs, zps] = e.opposite();
    return orient(e, zs, trace_at(ch, zs).mag(), zps, trace_at(ch, zps).mag(), eps);
}

struct FlowResult {
    enum class Kind { Sink, SmallRegion, Exhausted } kind = Kind::Exhausted;
    VertexState vertex;
    Slope slope;
    TraceValue value;
    std::vector<FareyTriple> path;
};

inline FlowResult descend_flow(const Character& ch, const FareyTriple& start, std::size_t budget, double eps = default_tol) {
    if (budget < 1) throw std::invalid_argument("budget must be at least 1");
    FlowResult r;
    VertexState cur = vertex_state(ch, start);
    for (std::size_t step = 0;; ++step) {
        r.path.push_back(cur.triple);
        r.vertex = cur;
        for (std::size_t i = 0; i < 3; ++i) {
            if (cur.values[i].mag() <= 2) {
                r.kind = FlowResult::Kind::SmallRegion;
                r.slope = cur.triple[i];
                r.value = cur.values[i];
                return r;
            }
        }
        std::optional<VertexState> next;
        for (std::size_t i = 0; i < 3 && !next; ++i) {
            const Slope& c = cur.triple[i];
            const Slope& a = cur.triple[(i + 1) % 3];
            const Slope& b = cur.triple[(i + 2) % 3];
            FareyPair e(a, b);
            auto [s1, s2] = e.opposite();
            const Slope& cp = s1 == c ? s2 : s1;
            TraceValue va = cur.values[(i + 1) % 3], vb = cur.values[(i + 2) % 3];
            // evaluated from the base: a b - c cancels badly when walking inward
            TraceValue vcp = trace_at(ch, cp);
            auto f = orient(e, c, cur.values[i].mag(), cp, vcp.mag(), eps);
            if (f.direction.to_slope == cp) next = make_vertex({{{a, va}, {b, vb}, {cp, vcp}}});
        }
        if (!next) {
            r.kind = FlowResult::Kind::Sink;
            return r;
        }
        if (step + 1 >= budget) {
            r.kind = FlowResult::Kind::Exhausted;
            return r;
        }
        cur = std::move(*next);
    }
}

}  // namespace torus_ends
