#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torus_ends/bq.hpp"
#include "torus_ends/character.hpp"
#include "torus_ends/farey.hpp"
#include "torus_ends/tau.hpp"
#include "torus_ends/trace_tree.hpp"

namespace torus_ends {

// Yes when the value lies in (-2, 2) or on +-sqrt(kappa + 2); boundary near +-2.
inline Tri end_value_test(const TraceValue& v, Complex k, double eps) {
    if (v.saturated) return Tri::no;
    for (Complex r : special_roots(k))
        if (near(v.v, r, eps)) return Tri::yes;
    if (!is_real(v.v, eps)) return Tri::no;
    double r = v.v.real();
    if (r > -2 + eps && r < 2 - eps) return Tri::yes;
    if (std::abs(std::abs(r) - 2) <= eps) return Tri::boundary;
    return Tri::no;
}

inline Tri rational_end_test(const Character& ch, const Slope& s, double eps = default_tol) {
    return end_value_test(trace_at(ch, s), ch.kappa(), eps);
}

// --- covers ---

struct DiscardedArc {
    Arc arc;
    EdgeState edge;  // z side kept, zp side is the discarded tail
};

struct ArcCover {
    int depth = 0;
    ArcSet arcs;
    std::vector<Slope> kept_points;
    std::vector<DiscardedArc> discarded;
    bool partial = false;
    std::size_t examined = 0;

    bool contains(const Slope& s) const {
        return arcs.contains(s) || std::find(kept_points.begin(), kept_points.end(), s) != kept_points.end();
    }
    double measure() const { return arcs.measure(); }
};

// Every arc and kept point of inner lies in outer.
inline bool cover_subset(const ArcCover& inner, const ArcCover& outer) {
    if (!inner.arcs.subset_of(outer.arcs)) return false;
    for (const auto& p : inner.kept_points)
        if (!outer.contains(p)) return false;
    return true;
}

inline constexpr std::size_t default_cover_budget = 2'000'000;

inline ArcCover compute_cover(const Character& ch, int depth, std::size_t budget = default_cover_budget, double eps = default_tol) {
    if (depth < 1) throw std::invalid_argument("cover depth must be at least 1");
    if (std::abs(ch.kappa() - 2.0) <= eps) throw std::invalid_argument("covers are not defined this way for reducible characters");
    struct Item {
        SlopeVector a, b;
        TraceValue va, vb, vback;
        int level;
    };
    const Complex k = ch.kappa();
    ArcCover out;
    out.depth = depth;
    std::vector<Arc> kept;
    std::vector<Item> stack;
    SlopeVector X{0, 1}, Y{1, 0}, Z{1, 1}, Yn{-1, 0};
    stack.push_back({Yn, X, ch.y(), ch.x(), ch.z(), 0});
    stack.push_back({Z, Y, ch.z(), ch.y(), ch.x(), 0});
    stack.push_back({X, Z, ch.x(), ch.z(), ch.y(), 0});
    auto keep_point = [&](const Slope& s, const TraceValue& v) {
        if (end_value_test(v, k, eps) != Tri::no && std::find(out.kept_points.begin(), out.kept_points.end(), s) == out.kept_points.end())
            out.kept_points.push_back(s);
    };
    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        Slope lo(it.a), hi(it.b);
        if (out.examined >= budget) {
            out.partial = true;
            kept.push_back({lo, hi, false});
            continue;
        }
        ++out.examined;
        SlopeVector next = it.a + it.b, back = it.a - it.b;
        TraceValue vn = across(it.va, it.vb, it.vback);
        if (prunable(it.va.mag(), it.vb.mag(), Slope(back), it.vback.mag(), Slope(next), vn.mag(), eps)) {
            out.discarded.push_back({{lo, hi, false}, {FareyPair(lo, hi), it.va, it.vb, Slope(back), Slope(next), it.vback, vn}});
            keep_point(lo, it.va);
            keep_point(hi, it.vb);
            continue;
        }
        if (it.level >= depth) {
            kept.push_back({lo, hi, false});
            continue;
        }
        stack.push_back({next, it.b, vn, it.vb, it.va, it.level + 1});
        stack.push_back({it.a, next, it.va, vn, it.vb, it.level + 1});
    }
    out.arcs = ArcSet(std::move(kept));
    std::sort(out.kept_points.begin(), out.kept_points.end());
    return out;
}

inline bool verify_discard(const Character& ch, const DiscardedArc& d, double eps = default_tol) {
    return verify_boundary_edge(ch, d.edge, eps) && d.arc.lo == d.edge.pair.a && d.arc.hi == d.edge.pair.b;
}

// --- hull ---

struct HullEdgeStatus {
    enum class Kind { InHull, DirectedToward, Unknown } kind = Kind::Unknown;
    std::optional<DirectedFareyEdge> direction;
    BQVerdict::Kind toward_first = BQVerdict::Kind::Exhausted;   // tail containing the first opposite region
    BQVerdict::Kind toward_second = BQVerdict::Kind::Exhausted;  // tail containing the second
};

inline const char* hull_kind_name(HullEdgeStatus::Kind k) {
    return k == HullEdgeStatus::Kind::InHull ? "in_hull" : k == HullEdgeStatus::Kind::DirectedToward ? "directed_toward" : "unknown";
}

inline HullEdgeStatus hull_status(const Character& ch, const FareyPair& e, std::size_t budget, double eps = default_tol) {
    if (std::abs(ch.kappa() - 2.0) <= eps) throw std::invalid_argument("hull status is not defined for reducible characters");
    auto [p, q] = e.opposite();
    SearchOptions opt;
    opt.max_vertices = budget;
    opt.eps = eps;
    opt.record_boundary = false;
    HullEdgeStatus h;
    h.toward_first = check_tail(ch, e, q, opt).kind;
    h.toward_second = check_tail(ch, e, p, opt).kind;
    using K = BQVerdict::Kind;
    if (h.toward_first == K::Violated && h.toward_second == K::Violated) {
        h.kind = HullEdgeStatus::Kind::InHull;
    } else if (h.toward_first == K::Satisfied && h.toward_second != K::Satisfied) {
        h.kind = HullEdgeStatus::Kind::DirectedToward;
        h.direction = DirectedFareyEdge{e, p, q};
    } else if (h.toward_second == K::Satisfied && h.toward_first != K::Satisfied) {
        h.kind = HullEdgeStatus::Kind::DirectedToward;
        h.direction = DirectedFareyEdge{e, q, p};
    }
    return h;
}

// --- star around a single end ---

struct StarCertificate {
    Slope center;
    TraceValue value;
    RingMethod method = RingMethod::Periodic;
    long long period = 0;
    double floor = 0;  // lower bound on every neighbour modulus
    std::vector<Slope> neighbors;
    std::vector<TraceValue> neighbor_values;
    std::vector<EdgeState> edges;  // z side is the centre, zp the excluded tail
};

inline constexpr long long star_window = 64;

// Certifies that every region other than center lies in a tail cut off by a prunable edge around it.
inline std::optional<StarCertificate> star_certificate(const Character& ch, const Slope& center, double eps = default_tol) {
    TraceValue x = trace_at(ch, center);
    if (x.mag() > 2 + eps) return std::nullopt;
    auto ring = neighbor_ring(center);
    TraceValue u0 = trace_at(ch, ring.at(0)), u1 = trace_at(ch, ring.at(1));
    auto fwd = certify_ring(x, u0, u1, ch.kappa(), eps);
    auto bwd = certify_ring(x, u1, u0, ch.kappa(), eps);
    if (!fwd || !bwd || fwd->method != bwd->method) return std::nullopt;
    if (fwd->method != RingMethod::Periodic && fwd->method != RingMethod::Ellipse) return std::nullopt;
    StarCertificate c;
    c.center = center;
    c.value = x;
    c.method = fwd->method;
    c.period = fwd->period;
    c.floor = std::min(fwd->tail_bound, bwd->tail_bound);
    // beyond one period the values repeat; on an ellipse every edge has |w| >= |u||u'| - |x| > 2
    long long n = c.method == RingMethod::Periodic ? c.period : star_window;
    for (long long m = 0; m <= n; ++m) {
        c.neighbors.push_back(ring.at(m));
        c.neighbor_values.push_back(trace_at(ch, ring.at(m)));
    }
    for (long long m = 0; m < n; ++m) {
        FareyPair e(c.neighbors[m], c.neighbors[m + 1]);
        auto [p, q] = e.opposite();
        Slope tail = p == center ? q : p;
        EdgeState es{e, c.neighbor_values[m], c.neighbor_values[m + 1], center, tail, x, trace_at(ch, tail)};
        auto arrow = orient(e, center, x.mag(), tail, es.zp.mag(), eps);
        if (!prunable(es, arrow, eps)) return std::nullopt;
        if (end_value_test(es.x, ch.kappa(), eps) != Tri::no) return std::nullopt;
        c.edges.push_back(std::move(es));
    }
    return c;
}

inline bool verify_star(const Character& ch, const StarCertificate& c, double eps = default_tol) {
    auto fresh = star_certificate(ch, c.center, eps);
    if (!fresh || fresh->edges.size() != c.edges.size()) return false;
    for (const auto& e : c.edges)
        if (!verify_boundary_edge(ch, e, eps)) return false;
    return true;
}

// --- reducible characters ---

struct ReducibleData {
    enum class Dependence { Rational, Irrational, BothUnit, Boundary } dependence = Dependence::Boundary;
    Complex xi, eta;
    double log_alpha = 0, log_beta = 0;  // log|xi^2|, log|eta^2|
    double branch_residual = 0;          // |xi eta + 1/(xi eta) - z|
    std::optional<Slope> slope;          // rational case
    double mu = 0;                       // irrational case: end slope as a real number
};

inline const char* dependence_name(ReducibleData::Dependence d) {
    switch (d) {
        case ReducibleData::Dependence::Rational: return "rational";
        case ReducibleData::Dependence::Irrational: return "irrational";
        case ReducibleData::Dependence::BothUnit: return "both_unit";
        default: return "boundary";
    }
}

inline Character reducible_character(Complex xi, Complex eta) {
    return {xi + 1.0 / xi, eta + 1.0 / eta, xi * eta + 1.0 / (xi * eta)};
}

inline constexpr long long max_dependence_denominator = 1'000'000;

namespace detail {

// log|root| for a trace, or nullopt inside the band where the modulus cannot be told from 1.
inline std::optional<double> root_log(Complex t, Complex root, double eps, bool& unit) {
    unit = is_real(t, eps) && std::abs(t.real()) <= 2;
    if (unit) return 0.0;
    double l = std::log(std::abs(root));
    if (std::abs(l) <= eps) return std::nullopt;
    return l;
}

}  // namespace detail

inline ReducibleData reducible_data(const Character& ch, double eps = default_tol) {
    ReducibleData d;
    d.xi = big_root(ch.x());
    Complex e = big_root(ch.y());
    Complex z1 = d.xi * e + 1.0 / (d.xi * e), z2 = d.xi / e + e / d.xi;
    d.eta = std::abs(z1 - ch.z()) <= std::abs(z2 - ch.z()) ? e : 1.0 / e;
    d.branch_residual = std::min(std::abs(z1 - ch.z()), std::abs(z2 - ch.z()));
    bool ux = false, uy = false;
    auto lx = detail::root_log(ch.x(), d.xi, eps, ux), ly = detail::root_log(ch.y(), d.eta, eps, uy);
    if (!lx || !ly) return d;
    d.log_alpha = 2 * *lx;
    d.log_beta = 2 * *ly;
    if (ux && uy) {
        d.dependence = ReducibleData::Dependence::BothUnit;
        return d;
    }
    if (ux) {
        d.dependence = ReducibleData::Dependence::Rational;
        d.slope = Slope(0, 1);
        return d;
    }
    if (uy) {
        d.dependence = ReducibleData::Dependence::Rational;
        d.slope = Slope::infinity();
        return d;
    }
    // slopes p/q with q log|alpha| + p log|beta| = 0 carry bounded traces
    d.mu = -d.log_alpha / d.log_beta;
    double scale = std::max(std::abs(d.log_alpha), std::abs(d.log_beta));
    double r = d.mu;
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(r)), q1 = 1;
    double frac = r - std::floor(r);
    for (int guard = 0; guard < 64; ++guard) {
        if (std::abs(static_cast<double>(q1) * d.log_alpha + static_cast<double>(p1) * d.log_beta) <= eps * scale) {
            d.dependence = ReducibleData::Dependence::Rational;
            d.slope = Slope(p1, q1);
            return d;
        }
        if (frac <= 0) break;
        r = 1 / frac;
        auto a = static_cast<long long>(std::floor(r));
        frac = r - std::floor(r);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_dependence_denominator || std::abs(p2) > max_dependence_denominator) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    }
    d.dependence = ReducibleData::Dependence::Irrational;
    return d;
}

// Nested Farey arcs containing the real number mu, one per level 1..depth.
inline std::vector<Arc> farey_arcs_around(double mu, int depth) {
    std::vector<Arc> arcs;
    SlopeVector lo, hi;
    if (mu >= 0 && mu <= 1)
        lo = {0, 1}, hi = {1, 1};
    else if (mu > 1)
        lo = {1, 1}, hi = {1, 0};
    else
        lo = {-1, 0}, hi = {0, 1};
    for (int level = 1; level <= depth; ++level) {
        SlopeVector m = lo + hi;
        double v = Slope(m).value();
        if (mu == v) {
            arcs.push_back({Slope(lo), Slope(m), false});
            break;
        }
        if (mu < v)
            hi = m;
        else
            lo = m;
        arcs.push_back({Slope(lo), Slope(hi), false});
    }
    return arcs;
}

inline double arc_midpoint_value(const Arc& a) {
    double l = a.lo.value(), h = a.hi.value();
    if (std::isinf(l)) return h - 1;
    if (std::isinf(h)) return l + 1;
    return (l + h) / 2;
}

// --- classification ---

struct EndClassification {
    enum class Kind { Empty, SingletonCurve, SingletonLamination, CantorLike, FullPL, Undetermined } kind = Kind::Undetermined;
    std::string branch;
    std::string reason;
    std::optional<Slope> slope;
    std::vector<Arc> lamination;  // nested arcs around an irrational end
    std::optional<ArcCover> cover;
    std::optional<BQVerdict> bq;
    std::optional<TauOutcome> tau;
    std::optional<StarCertificate> star;
    std::optional<ReducibleData> reducible;
    std::vector<Slope> ends;  // distinct rational ends found
    bool range_violation = false;
};

inline const char* classification_name(EndClassification::Kind k) {
    switch (k) {
        case EndClassification::Kind::Empty: return "empty";
        case EndClassification::Kind::SingletonCurve: return "singleton_curve";
        case EndClassification::Kind::SingletonLamination: return "singleton_lamination";
        case EndClassification::Kind::CantorLike: return "cantor_like";
        case EndClassification::Kind::FullPL: return "full_pl";
        default: return "undetermined";
    }
}

inline EndClassification reducible_classify(const Character& ch, double eps = default_tol, int depth = 25) {
    if (std::abs(ch.kappa() - 2.0) > eps) throw std::invalid_argument("character is not reducible");
    EndClassification out;
    out.branch = "reducible";
    auto d = reducible_data(ch, eps);
    using D = ReducibleData::Dependence;
    switch (d.dependence) {
        case D::BothUnit: out.kind = EndClassification::Kind::FullPL; break;
        case D::Rational:
            out.kind = EndClassification::Kind::SingletonCurve;
            out.slope = d.slope;
            out.ends = {*d.slope};
            break;
        case D::Irrational:
            out.kind = EndClassification::Kind::SingletonLamination;
            out.lamination = farey_arcs_around(d.mu, depth);
            break;
        case D::Boundary:
            out.kind = EndClassification::Kind::Undetermined;
            out.reason = "boundary: a root modulus is within tolerance of 1";
            break;
    }
    out.reducible = d;
    return out;
}

struct ClassifyOptions {
    double eps = default_tol;
    std::size_t max_vertices = 200'000;
    std::size_t tau_budget = 100'000;
    int cover_depth = 12;
    std::size_t cover_budget = default_cover_budget;
    int lamination_depth = 25;
    bool with_cover = true;
    bool discrete = false;  // caller asserts the trace set is discrete
};

namespace detail {

inline void add_end(std::vector<Slope>& ends, const Slope& s) {
    if (std::find(ends.begin(), ends.end(), s) == ends.end()) ends.push_back(s);
}

// Some region near the base whose value is neither in (-2, 2) nor on +-sqrt(kappa + 2).
inline std::optional<Slope> outside_trace(const Character& ch, double eps) {
    std::vector<Slope> slopes{Slope(0, 1), Slope::infinity(), Slope(1, 1)};
    for (long long q = 1; q <= 8; ++q)
        for (long long p = -8; p <= 8; ++p)
            if (boost::multiprecision::gcd(BigInt(std::abs(p)), BigInt(q)) == 1) slopes.emplace_back(p, q);
    for (const auto& s : slopes) {
        TraceValue v = trace_at(ch, s);
        if (end_value_test(v, ch.kappa(), eps) == Tri::no && !(is_real(v.v, eps) && std::abs(v.v.real()) <= 2 + eps)) return s;
    }
    return std::nullopt;
}

// Further rational ends around a known one.
inline void scan_ring(const Character& ch, const Slope& center, std::vector<Slope>& ends, double eps) {
    auto ring = neighbor_ring(center);
    for (long long m = -star_window; m <= star_window; ++m) {
        Slope s = ring.at(m);
        if (rational_end_test(ch, s, eps) == Tri::yes) add_end(ends, s);
    }
}

inline void check_real_range(EndClassification& c, double k, double eps) {
    using K = EndClassification::Kind;
    bool ok = true;
    switch (c.kind) {
        case K::Empty: ok = k < 2 + eps || k >= 18 - eps; break;
        case K::SingletonCurve: ok = k >= 6 - eps; break;
        case K::CantorLike: ok = k > 2 - eps; break;
        case K::FullPL: ok = k >= -2 - eps; break;
        default: break;
    }
    if (!ok) {
        c.range_violation = true;
        c.reason = "internal error: outcome outside its kappa range";
    }
}

}  // namespace detail

inline EndClassification classify(const Character& ch, const ClassifyOptions& opt = {}) {
    using K = EndClassification::Kind;
    const double eps = opt.eps;
    const Complex k = ch.kappa();
    if (std::abs(k - 2.0) <= eps) return reducible_classify(ch, eps, opt.lamination_depth);

    EndClassification out;
    auto attach_cover = [&] {
        if (opt.with_cover) out.cover = compute_cover(ch, opt.cover_depth, opt.cover_budget, eps);
    };
    auto type = classify_type(ch, eps);
    if (type.dihedral == Tri::yes || type.su2 == Tri::yes) {
        out.kind = K::FullPL;
        out.branch = type.dihedral == Tri::yes ? "dihedral" : "su2";
        if (type.real == Tri::yes) detail::check_real_range(out, k.real(), eps);
        return out;
    }
    if (type.su2 == Tri::boundary) {
        out.branch = "su2";
        out.reason = "boundary: within tolerance of the SU(2) locus";
        return out;
    }

    SearchOptions so;
    so.max_vertices = opt.max_vertices;
    so.eps = eps;
    so.collect = opt.discrete ? 3 : 2;

    if (type.imaginary == Tri::yes && k.real() < 2) {
        out.branch = "imaginary";
        auto form = imaginary_coordinates(ch, eps);
        TauOptions to;
        to.budget = opt.tau_budget;
        to.eps = eps;
        auto t = tau_reduce(*form, FareyTriple::base(), to);
        out.tau = t;
        if (t.kind == TauOutcome::Kind::Attractor) {
            out.kind = K::Empty;
            if (k.real() > -14 + eps) {
                out.range_violation = true;
                out.reason = "internal error: empty outcome with kappa above -14";
            }
            return out;
        }
        if (t.kind == TauOutcome::Kind::Exhausted) {
            out.reason = "tau reduction exhausted: " + t.reason;
            return out;
        }
        out.ends = {t.slope};
        if (auto star = star_certificate(ch, t.slope, eps)) {
            out.kind = K::SingletonCurve;
            out.slope = t.slope;
            out.star = std::move(star);
            return out;
        }
        if (color_of(t.slope) == form->real_color && std::abs(t.value.real()) > eps) {
            auto w = ellipse_walk(*form, t.slope, ring_window, eps);
            if ((w.kind == EllipseWalk::Kind::Found || w.kind == EllipseWalk::Kind::ZeroNeighbor) &&
                rational_end_test(ch, w.opposite, eps) == Tri::yes)
                detail::add_end(out.ends, w.opposite);
        }
        if (out.ends.size() < 2) detail::scan_ring(ch, t.slope, out.ends, eps);
        if (out.ends.size() < 2) {
            auto v = check_bq(ch, so);
            for (const auto& w : v.witnesses)
                if (verify_witness(ch, w, eps)) detail::add_end(out.ends, w.slope);
            out.bq = std::move(v);
        }
        if (out.ends.size() >= 2) {
            out.kind = K::CantorLike;
            attach_cover();
        } else {
            out.reason = "one end found and its star is not certified";
        }
        return out;
    }

    auto v = check_bq(ch, so);
    if (v.kind == BQVerdict::Kind::Satisfied) {
        out.kind = K::Empty;
        out.branch = type.real == Tri::yes ? "real" : "general";
        out.bq = std::move(v);
        if (type.real == Tri::yes) detail::check_real_range(out, k.real(), eps);
        return out;
    }
    for (const auto& w : v.witnesses) {
        detail::add_end(out.ends, w.slope);
        if (w.kind == Witness::Kind::SqrtKappaSpiral) detail::scan_ring(ch, w.slope, out.ends, eps);
    }
    out.bq = std::move(v);

    if (type.real == Tri::yes) {
        out.branch = "real";
        if (out.ends.size() == 1 && out.bq->witness->kind == Witness::Kind::OpenInterval) {
            if (auto star = star_certificate(ch, out.ends[0], eps)) {
                out.kind = K::SingletonCurve;
                out.slope = out.ends[0];
                out.star = std::move(star);
            }
        }
        std::size_t open = 0;
        for (const auto& s : out.ends) open += trace_at(ch, s).v.real() > -2 + eps && std::abs(trace_at(ch, s).v.real()) < 2 - eps;
        if (out.kind == K::Undetermined && open >= 2 && detail::outside_trace(ch, eps)) {
            out.kind = K::CantorLike;
            attach_cover();
        }
        if (out.kind == K::Undetermined)
            out.reason = out.bq->kind == BQVerdict::Kind::Exhausted ? "search budget exhausted" : "certificates incomplete";
        detail::check_real_range(out, k.real(), eps);
        return out;
    }

    out.branch = "general";
    if (out.bq->kind == BQVerdict::Kind::Exhausted) {
        out.reason = "search budget exhausted";
        attach_cover();
        return out;
    }
    if (out.ends.size() == 1) {
        if (auto star = star_certificate(ch, out.ends[0], eps)) {
            out.kind = K::SingletonCurve;
            out.slope = out.ends[0];
            out.star = std::move(star);
            return out;
        }
    }
    if (opt.discrete && out.ends.size() >= 3) {
        out.kind = K::CantorLike;
        out.branch = "discrete";
        attach_cover();
        return out;
    }
    out.reason = "ends exist; shape not licensed without further certificates";
    attach_cover();
    return out;
}

}  // namespace torus_ends
