#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "torus_ends/bq.hpp"
#include "torus_ends/character.hpp"
#include "torus_ends/farey.hpp"
#include "torus_ends/trace_tree.hpp"

namespace torus_ends {

// An imaginary character: one colour class carries real traces, the other two purely imaginary ones.
struct ImaginaryForm {
    Character original;
    Color real_color = Color::R;
    std::vector<Move> word;
    Character normalized;  // (i a, i b, z) with z >= 0

    double a() const { return normalized.x().imag(); }
    double b() const { return normalized.y().imag(); }
    double z() const { return normalized.z().real(); }
    double residual() const {
        double x = a(), y = b(), w = z();
        return std::abs(-x * x - y * y + w * w + x * y * w - 2 - original.kappa().real());
    }
};

inline std::optional<ImaginaryForm> imaginary_coordinates(const Character& ch, double eps = default_tol) {
    auto r = classify_type(ch, eps);
    if (!r.imaginary_form) return std::nullopt;
    ImaginaryForm f;
    f.original = ch;
    static constexpr Color by_slot[3] = {Color::B, Color::G, Color::R};
    f.real_color = by_slot[r.imaginary_form->real_slot];
    f.word = r.imaginary_form->word;
    f.normalized = r.imaginary_form->normalized;
    return f;
}

inline double tau_of_edge(const ImaginaryForm& f, const FareyPair& e) {
    if (e.color() != f.real_color) throw std::invalid_argument("edge " + e.a.str() + "," + e.b.str() + " is not in the real class");
    double x = trace_at(f.original, e.a).v.imag(), y = trace_at(f.original, e.b).v.imag();
    double z = trace_at(f.original, e.opposite().first).v.real();
    double zp = -x * y - z;
    return -z * zp;
}

struct TauStep {
    enum class Action { Start, Walk, Flip } action = Action::Start;
    FareyTriple vertex;
    Slope real_slope;
    double z = 0;
};

inline const char* tau_action_name(TauStep::Action a) {
    return a == TauStep::Action::Start ? "start" : a == TauStep::Action::Walk ? "walk" : "flip";
}

struct TauOutcome {
    enum class Kind { Attractor, EndWitness, Exhausted } kind = Kind::Exhausted;
    FareyTriple vertex;
    Slope slope;
    Complex value;
    std::vector<TauStep> steps;
    std::vector<double> flips;  // |z_k| at each region visited, in order
    bool revisited = false;
    std::size_t small_clause_checks = 0;
    std::size_t small_clause_violations = 0;
    std::string reason;
};

inline const char* tau_kind_name(TauOutcome::Kind k) {
    return k == TauOutcome::Kind::Attractor ? "attractor" : k == TauOutcome::Kind::EndWitness ? "end_witness" : "exhausted";
}

struct TauOptions {
    std::size_t budget = 100'000;
    long long walk_window = ring_window;
    double eps = default_tol;
    double small_x = 1e-3;
};

namespace detail {

class TauRun {
public:
    TauRun(const ImaginaryForm& f, const TauOptions& opt) : f_(f), opt_(opt) {}

    TauOutcome run(const FareyTriple& start) {
        std::size_t ri = 3;
        for (std::size_t i = 0; i < 3; ++i)
            if (color_of(start[i]) == f_.real_color) ri = i;
        Slope zs = start[ri], us = start[(ri + 1) % 3], vs = start[(ri + 2) % 3];
        double zr = trace_at(f_.original, zs).v.real();
        double au = trace_at(f_.original, us).v.imag(), av = trace_at(f_.original, vs).v.imag();
        record(TauStep::Action::Start, zs, us, vs, zr);
        if (zero_witness(us, au) || zero_witness(vs, av)) return std::move(out_);
        switch (band(zr)) {
            case Band::inside: return witness(zs, zr);
            case Band::ambiguous: return exhausted("start value within tolerance of 2 in magnitude");
            default: break;
        }
        // the opposite region: same sign and no smaller means the start already attracts
        Slope zps = other_opposite(us, vs, zs);
        double zp = -au * av - zr;
        if (band(zp) == Band::inside) return witness(zps, zp);
        if (band(zp) == Band::ambiguous) return exhausted("opposite value within tolerance of 2 in magnitude");
        if ((zp > 0) == (zr > 0)) {
            out_.kind = TauOutcome::Kind::Attractor;
            if (std::abs(zr) <= std::abs(zp)) {
                out_.vertex = FareyTriple(zs, us, vs);
            } else {
                out_.vertex = FareyTriple(zps, us, vs);
                record(TauStep::Action::Flip, zps, us, vs, zp);
            }
            return std::move(out_);
        }
        return reduce(zs, zr, us, au, vs, av);
    }

private:
    enum class Band { inside, ambiguous, outside };

    Band band(double v) const {
        if (v > -2 + opt_.eps && v < 2 - opt_.eps) return Band::inside;
        if (std::abs(std::abs(v) - 2) <= opt_.eps && std::abs(v) != 2) return Band::ambiguous;
        return Band::outside;
    }

    static Slope other_opposite(const Slope& u, const Slope& v, const Slope& not_this) {
        auto [p, q] = FareyPair(u, v).opposite();
        return p == not_this ? q : p;
    }

    void record(TauStep::Action a, const Slope& zs, const Slope& u, const Slope& v, double z) {
        FareyTriple t(zs, u, v);
        if (!seen_.insert(t).second) out_.revisited = true;
        out_.steps.push_back({a, t, zs, z});
    }

    bool charge() {
        if (++used_ <= opt_.budget) return true;
        mark_exhausted("budget");
        return false;
    }

    void mark_exhausted(std::string why) {
        out_.kind = TauOutcome::Kind::Exhausted;
        if (out_.reason.empty()) out_.reason = std::move(why);
        if (!out_.steps.empty()) out_.vertex = out_.steps.back().vertex;
    }

    bool zero_witness(const Slope& s, double a) {
        if (std::abs(a) > opt_.eps) return false;
        out_.kind = TauOutcome::Kind::EndWitness;
        out_.slope = s;
        out_.value = Complex(0, a);
        out_.vertex = out_.steps.back().vertex;
        return true;
    }

    TauOutcome witness(const Slope& s, double z) {
        out_.kind = TauOutcome::Kind::EndWitness;
        out_.slope = s;
        out_.value = z;
        out_.vertex = out_.steps.back().vertex;
        return std::move(out_);
    }

    TauOutcome exhausted(std::string why) {
        mark_exhausted(std::move(why));
        return std::move(out_);
    }

    // Imaginary regions of the current vertex that are small enough to trigger the boundary clause.
    void note_small(const Slope& u, double au, const Slope& v, double av) {
        for (auto [s, a] : {std::pair{u, au}, std::pair{v, av}})
            if (std::abs(a) < opt_.small_x && std::abs(a) > opt_.eps && !small_) small_ = s;
    }

    TauOutcome reduce(Slope zs, double zr, Slope us, double au, Slope vs, double av) {
        out_.flips.push_back(std::abs(zr));
        note_small(us, au, vs, av);
        for (;;) {
            // walk the boundary of the current real region towards the sign change
            double s = zr > 0 ? 1 : -1;
            long long walked = 0;
            while (s * au * av > 0) {
                if (++walked > opt_.walk_window) return exhausted("walk window");
                if (!charge()) return std::move(out_);
                bool forward = std::abs(au) > std::abs(av);
                if (forward) {
                    Slope ws = other_opposite(zs, vs, us);
                    double aw = zr * av - au;
                    if (s * av * aw > 0 && std::abs(aw) >= std::abs(av)) return exhausted("walk stopped descending");
                    us = vs, au = av, vs = ws, av = aw;
                } else {
                    Slope ts = other_opposite(zs, us, vs);
                    double at = zr * au - av;
                    if (s * au * at > 0 && std::abs(at) >= std::abs(au)) return exhausted("walk stopped descending");
                    vs = us, av = au, us = ts, au = at;
                }
                record(TauStep::Action::Walk, zs, us, vs, zr);
                if (zero_witness(us, au) || zero_witness(vs, av)) return std::move(out_);
            }
            if (zero_witness(us, au) || zero_witness(vs, av)) return std::move(out_);
            Slope zps = other_opposite(us, vs, zs);
            double zp = -au * av - zr;
            double zpn = s * zp, zn = std::abs(zr);
            if (!charge()) return std::move(out_);
            if (zpn >= 2 && zpn >= zn) {
                out_.kind = TauOutcome::Kind::Attractor;
                out_.vertex = FareyTriple(zs, us, vs);
                return std::move(out_);
            }
            record(TauStep::Action::Flip, zps, us, vs, zp);
            if (small_) {
                ++out_.small_clause_checks;
                if (!out_.steps.back().vertex.contains(*small_)) ++out_.small_clause_violations;
            }
            switch (band(zpn)) {
                case Band::inside: return witness(zps, zp);
                case Band::ambiguous: return exhausted("flip value within tolerance of 2 in magnitude");
                default: break;
            }
            if (zpn >= 2) {
                out_.kind = TauOutcome::Kind::Attractor;
                out_.vertex = FareyTriple(zps, us, vs);
                return std::move(out_);
            }
            if (!(std::abs(zp) < zn)) return exhausted("flip did not decrease the real value");
            zs = zps, zr = zp;
            out_.flips.push_back(std::abs(zr));
            note_small(us, au, vs, av);
        }
    }

    const ImaginaryForm& f_;
    TauOptions opt_;
    TauOutcome out_;
    std::set<FareyTriple> seen_;
    std::size_t used_ = 0;
    std::optional<Slope> small_;
};

}  // namespace detail

inline TauOutcome tau_reduce(const ImaginaryForm& f, const FareyTriple& start, const TauOptions& opt = {}) {
    if (opt.budget < 1) throw std::invalid_argument("budget must be at least 1");
    if (!(f.original.kappa().real() < 2)) throw std::invalid_argument("tau reduction needs kappa < 2");
    return detail::TauRun(f, opt).run(start);
}

inline TauOutcome tau_reduce(const ImaginaryForm& f, const FareyTriple& start, std::size_t budget) {
    TauOptions o;
    o.budget = budget;
    return tau_reduce(f, start, o);
}

// All three edges of the vertex point into it.
inline bool verify_sink(const Character& ch, const FareyTriple& t, double eps = default_tol) {
    for (std::size_t i = 0; i < 3; ++i) {
        FareyPair e(t[(i + 1) % 3], t[(i + 2) % 3]);
        if (flow_at(ch, e, eps).direction.to_slope != t[i]) return false;
    }
    return true;
}

struct EllipseWalk {
    enum class Kind { Found, ZeroNeighbor, ZeroCenter, Exhausted } kind = Kind::Exhausted;
    Slope first, second;  // consecutive neighbours of the centre
    double u_first = 0, u_second = 0;
    Slope opposite;
    double opposite_value = 0;
    bool within_center_bound = false;  // |u| <= |z0| at both
    long long steps = 0;
};

inline const char* ellipse_kind_name(EllipseWalk::Kind k) {
    switch (k) {
        case EllipseWalk::Kind::Found: return "found";
        case EllipseWalk::Kind::ZeroNeighbor: return "zero_neighbor";
        case EllipseWalk::Kind::ZeroCenter: return "zero_center";
        default: return "exhausted";
    }
}

// Around a real region with value in (-2, 2), finds consecutive neighbours of opposite (normalized) sign.
inline EllipseWalk ellipse_walk(const ImaginaryForm& f, const Slope& center, long long window = ring_window,
                                double eps = default_tol) {
    if (color_of(center) != f.real_color) throw std::invalid_argument("centre " + center.str() + " is not in the real class");
    double z0 = trace_at(f.original, center).v.real();
    if (!(std::abs(z0) < 2 - eps)) throw std::invalid_argument("centre value must lie in (-2, 2)");
    EllipseWalk r;
    if (std::abs(z0) <= eps) {
        r.kind = EllipseWalk::Kind::ZeroCenter;
        return r;
    }
    double s = z0 > 0 ? 1 : -1;
    auto ring = neighbor_ring(center);
    Slope u = ring.at(0), v = ring.at(1);
    double au = trace_at(f.original, u).v.imag(), av = trace_at(f.original, v).v.imag();
    for (;; ++r.steps) {
        r.first = u, r.second = v, r.u_first = au, r.u_second = av;
        for (auto [sl, a] : {std::pair{u, au}, std::pair{v, av}}) {
            if (std::abs(a) <= eps) {
                r.kind = EllipseWalk::Kind::ZeroNeighbor;
                r.opposite = sl;
                r.opposite_value = a;
                return r;
            }
        }
        if (s * au * av < 0) {
            r.kind = EllipseWalk::Kind::Found;
            auto [p, q] = FareyPair(u, v).opposite();
            r.opposite = p == center ? q : p;
            r.opposite_value = -au * av - z0;
            r.within_center_bound = std::abs(au) <= std::abs(z0) && std::abs(av) <= std::abs(z0);
            return r;
        }
        if (r.steps >= window) return r;
        auto [p, q] = FareyPair(center, v).opposite();
        Slope w = p == u ? q : p;
        double aw = z0 * av - au;
        u = v, au = av, v = w, av = aw;
    }
}

}  // namespace torus_ends
