#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "torus_ends/character.hpp"
#include "torus_ends/farey.hpp"
#include "torus_ends/trace_tree.hpp"

namespace torus_ends {

struct Witness {
    enum class Kind { OpenInterval, SqrtKappaSpiral } kind = Kind::OpenInterval;
    Slope slope;
    TraceValue value;
    std::optional<Slope> nonzero_neighbor;
    bool operator==(const Witness&) const = default;
};

inline const char* witness_kind_name(Witness::Kind k) {
    return k == Witness::Kind::OpenInterval ? "open_interval" : "sqrt_kappa_spiral";
}

inline std::array<Complex, 2> special_roots(Complex k) {
    Complex r = std::sqrt(k + 2.0);
    return {r, -r};
}

enum class ValueClass { ok, open_interval, sqrt_kappa, ambiguous };

// How one region value bears on the conditions. sqrt_kappa is reported only with a nonzero neighbour.
inline ValueClass classify_value(const TraceValue& v, Complex k, bool nonzero_neighbor, double eps) {
    if (v.saturated) return ValueClass::ok;
    if (is_real(v.v, eps)) {
        double r = v.v.real();
        if (r > -2 + eps && r < 2 - eps) return ValueClass::open_interval;
        if (std::abs(std::abs(r) - 2) <= eps && !(v.v == Complex(2) || v.v == Complex(-2))) return ValueClass::ambiguous;
    }
    for (Complex root : special_roots(k))
        if (near(v.v, root, eps) && nonzero_neighbor) return ValueClass::sqrt_kappa;
    return ValueClass::ok;
}

// Edge (x, y) seen from the back region towards the next one: closed when both ends exceed 2 and the flow points back.
inline bool prunable(double x_mag, double y_mag, const Slope& back, double back_mag, const Slope& next, double next_mag,
                     double eps) {
    if (!(std::min(x_mag, y_mag) > 2 + eps)) return false;
    if (flow_tie(back_mag, next_mag, eps)) {
        auto db = depth(back), dn = depth(next);
        return db != dn ? db < dn : back < next;
    }
    return next_mag > back_mag;
}

// The edge's z side is the kept side, zp the tail.
inline bool prunable(const EdgeState& e, const FlowArrow& arrow, double eps = default_tol) {
    return std::min(e.x.mag(), e.y.mag()) > 2 + eps && arrow.direction.to_slope == e.z_slope;
}

enum class RingMethod { Constant, Linear, ClosedForm, Ellipse, Periodic, Saturated };

inline const char* ring_method_name(RingMethod m) {
    switch (m) {
        case RingMethod::Constant: return "constant";
        case RingMethod::Linear: return "linear";
        case RingMethod::ClosedForm: return "closed_form";
        case RingMethod::Ellipse: return "ellipse";
        case RingMethod::Periodic: return "periodic";
        case RingMethod::Saturated: return "saturated";
    }
    return "?";
}

struct RingBound {
    RingMethod method = RingMethod::ClosedForm;
    long long explicit_terms = 0;  // u_0 .. u_{explicit_terms - 1} checked one by one
    double tail_bound = 0;         // lower bound on |u_m| beyond them
    long long period = 0;
};

inline constexpr long long ring_window = 10'000;
inline constexpr int max_period_denominator = 64;

namespace detail {

// Smallest q <= 64 with x within eps of 2 cos(p pi / q).
inline std::optional<long long> rational_rotation(Complex x, double eps) {
    if (!is_real(x, eps) || std::abs(x.real()) > 2) return std::nullopt;
    double r = std::acos(std::clamp(x.real() / 2, -1.0, 1.0)) / std::numbers::pi;
    for (long long q = 1; q <= max_period_denominator; ++q) {
        double p = std::round(r * q);
        if (std::abs(x - 2 * std::cos(p * std::numbers::pi / q)) <= eps) return q;
    }
    return std::nullopt;
}

}  // namespace detail

// Proves |u_m| > 2 + eps for every m >= 0, where u_{m+1} = x u_m - u_{m-1} runs around a region of value x.
// Terms landing on +-sqrt(kappa + 2) abort, so the caller can expand instead.
inline std::optional<RingBound> certify_ring(const TraceValue& x, const TraceValue& u0, const TraceValue& u1, Complex k,
                                             double eps, long long max_terms = ring_window) {
    const double T = 2 + eps, delta = 1e-6;
    if (!(u0.mag() > T) || !(u1.mag() > T) || x.saturated) return std::nullopt;
    if (u0.saturated || u1.saturated) return RingBound{RingMethod::Saturated, 2, std::min(u0.mag(), u1.mag()), 0};

    auto roots = special_roots(k);
    auto explicit_ok = [&](long long n) {
        TraceValue prev = u0, cur = u1;
        for (long long m = 0; m < n; ++m) {
            const TraceValue& u = m == 0 ? u0 : cur;
            if (!(u.mag() > T)) return false;
            if (!u.saturated && (near(u.v, roots[0], eps) || near(u.v, roots[1], eps))) return false;
            if (m >= 1) {
                TraceValue nx = across(x, cur, prev);
                prev = cur, cur = nx;
            }
        }
        return true;
    };

    Complex xv = x.v, a = u0.v, b = u1.v;
    if (xv == Complex(2) || xv == Complex(-2)) {
        Complex d = xv.real() > 0 ? b - a : -b - a;
        if (std::abs(d) == 0) return explicit_ok(1) ? std::optional(RingBound{RingMethod::Constant, 1, std::abs(a), 0}) : std::nullopt;
        double K = std::ceil((T * (1 + delta) + std::abs(a)) / (std::abs(d) * (1 - delta)));
        if (K > max_terms) return std::nullopt;
        auto n = static_cast<long long>(K) + 1;
        if (!explicit_ok(n)) return std::nullopt;
        return RingBound{RingMethod::Linear, n, K * std::abs(d) - std::abs(a), 0};
    }

    Complex lam = big_root(xv), li = 1.0 / lam;
    double ml = std::abs(lam);
    bool separated = std::abs(lam - li) > 1e-6;
    Complex A = separated ? (b - a * li) / (lam - li) : Complex(0);
    Complex B = a - A;
    if (ml > 1 + 1e-9 && separated) {
        if (std::abs(A) == 0) return std::nullopt;
        double need = (T * (1 + delta) + std::abs(B) * (1 + delta)) / (std::abs(A) * (1 - delta));
        double K = std::max(0.0, std::ceil(std::log(need) / std::log(ml)));
        if (K > max_terms) return std::nullopt;
        auto n = static_cast<long long>(K) + 1;
        if (!explicit_ok(n)) return std::nullopt;
        double bound = std::abs(A) * (1 - delta) * std::pow(ml, K) - std::abs(B) * (1 + delta);
        return RingBound{RingMethod::ClosedForm, n, bound, 0};
    }
    if (separated) {
        // on the unit circle every term lies on an ellipse that stays at least ||A| - |B|| from 0
        double floor_mag = std::abs(std::abs(A) - std::abs(B)) * (1 - delta);
        bool off_roots = true;
        for (Complex r : roots) off_roots = off_roots && (std::abs(r) + eps < floor_mag || std::abs(r) > (std::abs(A) + std::abs(B)) * (1 + delta) + eps);
        if (floor_mag > T * (1 + delta) && off_roots) return RingBound{RingMethod::Ellipse, 0, floor_mag, 0};
    }
    if (auto q = detail::rational_rotation(xv, eps)) {
        long long P = 2 * *q;
        std::vector<TraceValue> u{u0, u1};
        while (static_cast<long long>(u.size()) < P + 2) u.push_back(across(x, u.back(), u[u.size() - 2]));
        auto closes = [&](const TraceValue& p, const TraceValue& s) { return std::abs(p.v - s.v) <= 1e-9 * (1 + std::abs(s.v)); };
        if (!closes(u[P], u[0]) || !closes(u[P + 1], u[1])) return std::nullopt;
        if (!explicit_ok(P)) return std::nullopt;
        double lo = std::numeric_limits<double>::infinity();
        for (long long m = 0; m < P; ++m) lo = std::min(lo, u[m].mag());
        return RingBound{RingMethod::Periodic, P, lo, P};
    }
    return std::nullopt;
}

// Ring around center starting at first (u_0) and second (u_1), everything beyond the explicit terms bounded away from [-2, 2].
struct RingClosure {
    Slope center;
    Slope first;
    Slope second;
    TraceValue x, u0, u1;
    RingBound bound;
};

struct BoundaryEdge {
    EdgeState edge;  // z side kept, zp side closed
};

struct BQVerdict {
    enum class Kind { Satisfied, Violated, Exhausted } kind = Kind::Exhausted;
    std::vector<FareyTriple> attractor;
    std::vector<EdgeState> boundary;
    std::vector<RingClosure> rings;
    std::optional<Witness> witness;
    std::vector<Witness> witnesses;
    bool reducible = false;  // kappa = 2: always violated, no search run
    std::size_t visited = 0;
    std::size_t frontier = 0;
    std::size_t ambiguous = 0;
    std::vector<VertexState> states;  // filled when requested
};

inline const char* verdict_name(BQVerdict::Kind k) {
    return k == BQVerdict::Kind::Satisfied ? "satisfied" : k == BQVerdict::Kind::Violated ? "violated" : "exhausted";
}

struct SearchOptions {
    std::size_t max_vertices = 1'000'000;
    double eps = default_tol;
    std::size_t collect = 1;  // stop after this many open-interval witnesses
    bool record_states = false;
    bool record_boundary = true;
};

namespace detail {

// Directed edge (a, b) with next = a + b and back = a - b as vectors.
struct SearchItem {
    SlopeVector a, b;
    TraceValue va, vb, vback, vnext;
    double key_min = 0, key_next = 0;
    std::uint64_t order = 0;
};

struct ItemLater {
    bool operator()(const SearchItem& l, const SearchItem& r) const {
        if (l.key_min != r.key_min) return l.key_min > r.key_min;
        if (l.key_next != r.key_next) return l.key_next > r.key_next;
        return l.order > r.order;
    }
};

class BQSearch {
public:
    BQSearch(const Character& ch, const SearchOptions& opt) : ch_(ch), k_(ch.kappa()), opt_(opt) {
        if (opt.max_vertices < 1) throw std::invalid_argument("max_vertices must be at least 1");
    }

    // Returns false once the search should stop.
    bool check(const SlopeVector& s, const TraceValue& v, std::initializer_list<std::pair<const SlopeVector*, const TraceValue*>> nbrs) {
        const SlopeVector* nz = nullptr;
        for (auto [ns, nv] : nbrs)
            if (!nz && nv->mag() > opt_.eps) nz = ns;
        switch (classify_value(v, k_, nz != nullptr, opt_.eps)) {
            case ValueClass::ok: return true;
            case ValueClass::ambiguous: ++out_.ambiguous; return true;
            case ValueClass::open_interval: {
                Slope sl(s);
                for (auto& w : out_.witnesses)
                    if (w.slope == sl) return true;
                out_.witnesses.push_back({Witness::Kind::OpenInterval, sl, v, std::nullopt});
                return out_.witnesses.size() < opt_.collect;
            }
            case ValueClass::sqrt_kappa:
                spiral_ = Witness{Witness::Kind::SqrtKappaSpiral, Slope(s), v, Slope(*nz)};
                return false;
        }
        return true;
    }

    bool ambiguous_value(const TraceValue& v) const { return classify_value(v, k_, false, opt_.eps) == ValueClass::ambiguous; }

    void push(SlopeVector a, SlopeVector b, TraceValue va, TraceValue vb, TraceValue vback, TraceValue vnext) {
        SearchItem it{std::move(a), std::move(b), va, vb, vback, vnext, std::min(va.mag(), vb.mag()), vnext.mag(), counter_++};
        pq_.push(std::move(it));
    }

    bool visit(const SlopeVector& a, const SlopeVector& b, const SlopeVector& c, const TraceValue& va, const TraceValue& vb,
               const TraceValue& vc) {
        if (out_.visited >= opt_.max_vertices) {
            exhausted_ = true;
            return false;
        }
        ++out_.visited;
        FareyTriple t{Slope(a), Slope(b), Slope(c)};
        if (opt_.record_states) out_.states.push_back(make_vertex({{{Slope(a), va}, {Slope(b), vb}, {Slope(c), vc}}}));
        out_.attractor.push_back(std::move(t));
        return true;
    }

    // Seeds with the base vertex.
    bool seed_base() {
        SlopeVector X{0, 1}, Y{1, 0}, Z{1, 1}, Yn{-1, 0};
        TraceValue x = ch_.x(), y = ch_.y(), z = ch_.z();
        if (!check(X, x, {{&Y, &y}, {&Z, &z}}) || !check(Y, y, {{&X, &x}, {&Z, &z}}) || !check(Z, z, {{&X, &x}, {&Y, &y}}))
            return false;
        if (ambiguous_value(x) || ambiguous_value(y) || ambiguous_value(z)) return true;  // counted, nothing to expand
        visit(X, Y, Z, x, y, z);
        seed_child(X, Z, x, z, y);   // towards 1/2
        seed_child(Z, Y, z, y, x);   // towards 2/1
        seed_child(Yn, X, y, x, z);  // towards -1/1
        return true;
    }

    // Seeds with the directed edge (a, b) leaving the back region.
    bool seed_edge(const FareyPair& e, const Slope& back) {
        SlopeVector a = e.a.vec(), b = e.b.vec();
        if (Slope(a + b) == back) b = -b;
        TraceValue va = trace_at(ch_, e.a), vb = trace_at(ch_, e.b), vback = trace_at(ch_, back);
        if (!check(a, va, {{&b, &vb}}) || !check(b, vb, {{&a, &va}})) return false;
        if (ambiguous_value(va) || ambiguous_value(vb)) return true;
        return seed_child(a, b, va, vb, vback);
    }

    BQVerdict run() {
        while (!pq_.empty() && !stopped()) {
            SearchItem it = pq_.top();
            pq_.pop();
            if (!process(it)) break;
        }
        return finish();
    }

private:
    bool stopped() const { return spiral_.has_value() || out_.witnesses.size() >= opt_.collect || exhausted_; }

    bool seed_child(const SlopeVector& a, const SlopeVector& b, const TraceValue& va, const TraceValue& vb, const TraceValue& vback) {
        TraceValue vn = across(va, vb, vback);
        SlopeVector n = a + b;
        if (!check(n, vn, {{&a, &va}, {&b, &vb}})) return false;
        if (ambiguous_value(vn)) return true;
        push(a, b, va, vb, vback, vn);
        return true;
    }

    bool process(const SearchItem& it) {
        const double eps = opt_.eps;
        double ma = it.va.mag(), mb = it.vb.mag();
        SlopeVector next = it.a + it.b, back = it.a - it.b;
        if (std::min(ma, mb) > 2 + eps) {
            bool tie = flow_tie(it.vback.mag(), it.vnext.mag(), eps);
            bool close = tie ? prunable(ma, mb, Slope(back), it.vback.mag(), Slope(next), it.vnext.mag(), eps)
                             : it.vnext.mag() > it.vback.mag();
            if (close) {
                if (opt_.record_boundary)
                    out_.boundary.push_back({FareyPair(Slope(it.a), Slope(it.b)), it.va, it.vb, Slope(back), Slope(next), it.vback, it.vnext});
                return true;
            }
        }
        bool a_small = !(ma > 2 + eps), b_small = !(mb > 2 + eps);
        if (a_small != b_small) {
            const TraceValue& x = a_small ? it.va : it.vb;
            const TraceValue& y = a_small ? it.vb : it.va;
            if (auto rb = certify_ring(x, y, it.vnext, k_, eps)) {
                const SlopeVector& c = a_small ? it.a : it.b;
                const SlopeVector& u = a_small ? it.b : it.a;
                out_.rings.push_back({Slope(c), Slope(u), Slope(next), x, y, it.vnext, *rb});
                return true;
            }
        }
        if (!visit(it.a, it.b, next, it.va, it.vb, it.vnext)) {
            pq_.push(it);
            return false;
        }
        // children: (a, next) leaving b, and (next, b) leaving a
        if (!seed_child(it.a, next, it.va, it.vnext, it.vb)) return false;
        if (!seed_child(next, it.b, it.vnext, it.vb, it.va)) return false;
        return true;
    }

    BQVerdict finish() {
        out_.frontier = pq_.size();
        if (spiral_) {
            out_.kind = BQVerdict::Kind::Violated;
            out_.witness = spiral_;
            out_.witnesses.insert(out_.witnesses.begin(), *spiral_);
        } else if (!out_.witnesses.empty()) {
            out_.kind = BQVerdict::Kind::Violated;
            out_.witness = out_.witnesses.front();
        } else if (exhausted_ || out_.ambiguous > 0 || !pq_.empty()) {
            out_.kind = BQVerdict::Kind::Exhausted;
        } else {
            out_.kind = BQVerdict::Kind::Satisfied;
        }
        std::sort(out_.attractor.begin(), out_.attractor.end());
        return std::move(out_);
    }

    const Character& ch_;
    Complex k_;
    SearchOptions opt_;
    std::priority_queue<SearchItem, std::vector<SearchItem>, ItemLater> pq_;
    std::uint64_t counter_ = 0;
    bool exhausted_ = false;
    std::optional<Witness> spiral_;
    BQVerdict out_;
};

}  // namespace detail

inline bool is_reducible(const Character& ch, double eps) { return std::abs(ch.kappa() - 2.0) <= eps; }

inline BQVerdict check_bq(const Character& ch, const SearchOptions& opt = {}) {
    if (opt.max_vertices < 1) throw std::invalid_argument("max_vertices must be at least 1");
    if (is_reducible(ch, opt.eps)) {
        BQVerdict v;
        v.kind = BQVerdict::Kind::Violated;
        v.reducible = true;
        return v;
    }
    detail::BQSearch s(ch, opt);
    s.seed_base();
    return s.run();
}

inline BQVerdict check_bq(const Character& ch, std::size_t max_vertices) {
    SearchOptions o;
    o.max_vertices = max_vertices;
    return check_bq(ch, o);
}

// The same search restricted to the side of e away from back, including the values of e's endpoints.
inline BQVerdict check_tail(const Character& ch, const FareyPair& e, const Slope& back, const SearchOptions& opt = {}) {
    detail::BQSearch s(ch, opt);
    s.seed_edge(e, back);
    return s.run();
}

// Independent re-checks from scratch values.

inline bool verify_boundary_edge(const Character& ch, const EdgeState& e, double eps = default_tol) {
    EdgeState fresh = edge_state(ch, e.pair);
    if (fresh.z_slope != e.z_slope) std::swap(fresh.z, fresh.zp), std::swap(fresh.z_slope, fresh.zp_slope);
    auto arrow = orient(fresh.pair, fresh.z_slope, fresh.z.mag(), fresh.zp_slope, fresh.zp.mag(), eps);
    return prunable(fresh, arrow, eps);
}

inline bool verify_ring(const Character& ch, const RingClosure& r, double eps = default_tol) {
    if (!is_adjacent(r.center, r.first) || !is_adjacent(r.center, r.second) || !is_adjacent(r.first, r.second)) return false;
    auto rb = certify_ring(trace_at(ch, r.center), trace_at(ch, r.first), trace_at(ch, r.second), ch.kappa(), eps);
    return rb.has_value() && !(trace_at(ch, r.center).mag() > 2 + eps);
}

inline bool verify_witness(const Character& ch, const Witness& w, double eps = default_tol) {
    TraceValue v = trace_at(ch, w.slope);
    if (w.kind == Witness::Kind::OpenInterval) return classify_value(v, ch.kappa(), false, eps) == ValueClass::open_interval;
    if (!w.nonzero_neighbor || !is_adjacent(*w.nonzero_neighbor, w.slope)) return false;
    bool nz = trace_at(ch, *w.nonzero_neighbor).mag() > eps;
    return nz && classify_value(v, ch.kappa(), true, eps) == ValueClass::sqrt_kappa;
}

}  // namespace torus_ends
