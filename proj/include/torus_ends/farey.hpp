#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "torus_ends/parse_error.hpp"

namespace torus_ends {

using BigInt = boost::multiprecision::cpp_int;

// Integer vector (p, q) representing a slope up to sign. Orientation matters
// during descent, where consecutive vectors keep determinant +1.
struct SlopeVector {
    BigInt p;
    BigInt q;

    friend SlopeVector operator+(const SlopeVector& a, const SlopeVector& b) { return {a.p + b.p, a.q + b.q}; }
    friend SlopeVector operator-(const SlopeVector& a, const SlopeVector& b) { return {a.p - b.p, a.q - b.q}; }
    SlopeVector operator-() const { return {-p, -q}; }
    friend SlopeVector operator*(const BigInt& k, const SlopeVector& v) { return {k * v.p, k * v.q}; }
    bool operator==(const SlopeVector&) const = default;
};

// det(a, b) = a.q*b.p - a.p*b.q; +1 when b follows a counterclockwise as a Farey neighbour.
inline BigInt det(const SlopeVector& a, const SlopeVector& b) { return a.q * b.p - a.p * b.q; }

class Slope {
public:
    Slope() : p_(0), q_(1) {}
    Slope(BigInt p, BigInt q) : p_(std::move(p)), q_(std::move(q)) { normalize(); }
    Slope(long long p, long long q) : Slope(BigInt(p), BigInt(q)) {}
    explicit Slope(const SlopeVector& v) : Slope(v.p, v.q) {}

    static Slope infinity() { return Slope(1, 0); }

    const BigInt& num() const { return p_; }
    const BigInt& den() const { return q_; }
    bool is_infinite() const { return q_ == 0; }
    SlopeVector vec() const { return {p_, q_}; }

    double value() const {
        if (is_infinite()) return std::numeric_limits<double>::infinity();
        return p_.convert_to<double>() / q_.convert_to<double>();
    }
    // Position on the circle under t -> 2 atan t, in (-pi, pi].
    double angle() const { return is_infinite() ? std::numbers::pi : 2.0 * std::atan(value()); }

    std::string str() const {
        if (is_infinite()) return "1/0";
        return p_.str() + "/" + q_.str();
    }

    bool operator==(const Slope&) const = default;

    // Circular order starting at 0/1 and running counterclockwise: [0, inf), inf, (-inf, 0).
    int sector() const {
        if (is_infinite()) return 1;
        return p_ >= 0 ? 0 : 2;
    }
    friend std::strong_ordering operator<=>(const Slope& a, const Slope& b) {
        if (auto c = a.sector() <=> b.sector(); c != 0) return c;
        if (a.is_infinite()) return std::strong_ordering::equal;
        BigInt l = a.p_ * b.q_, r = b.p_ * a.q_;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    void normalize() {
        if (p_ == 0 && q_ == 0) throw std::invalid_argument("slope 0/0");
        if (q_ < 0 || (q_ == 0 && p_ < 0)) {
            p_ = -p_;
            q_ = -q_;
        }
        BigInt g = boost::multiprecision::gcd(abs(p_), q_);
        if (g > 1) {
            p_ /= g;
            q_ /= g;
        }
    }
    BigInt p_;
    BigInt q_;
};

inline bool is_adjacent(const Slope& a, const Slope& b) { return abs(det(a.vec(), b.vec())) == 1; }

// The Farey child of the edge (a, b): the third vertex lying away from the base triangle.
inline Slope mediant(const Slope& a, const Slope& b) {
    if (!is_adjacent(a, b)) throw std::invalid_argument("mediant of non-adjacent slopes " + a.str() + ", " + b.str());
    SlopeVector u = a.vec(), v = b.vec();
    if (a.is_infinite() && b.num() < 0) u = -u;
    if (b.is_infinite() && a.num() < 0) v = -v;
    return Slope(u + v);
}

enum class Color { R, G, B };

inline Color color_of(const Slope& s) {
    bool p_odd = bit_test(abs(s.num()), 0);
    bool q_odd = bit_test(s.den(), 0);
    if (p_odd && q_odd) return Color::R;
    return q_odd ? Color::B : Color::G;
}

inline char color_name(Color c) { return c == Color::R ? 'R' : c == Color::G ? 'G' : 'B'; }

struct FareyPair {
    Slope a;
    Slope b;
    FareyPair() = default;
    FareyPair(Slope x, Slope y) : a(std::move(x)), b(std::move(y)) {
        if (!is_adjacent(a, b)) throw std::invalid_argument("not a Farey pair: " + a.str() + ", " + b.str());
    }
    bool operator==(const FareyPair&) const = default;
    // The two regions opposite the edge.
    std::pair<Slope, Slope> opposite() const {
        return {Slope(a.vec() + b.vec()), Slope(a.vec() - b.vec())};
    }
    // Absent colour among the pair.
    Color color() const {
        Color ca = color_of(a), cb = color_of(b);
        for (Color c : {Color::R, Color::G, Color::B})
            if (c != ca && c != cb) return c;
        return Color::R;
    }
};

// Three pairwise adjacent slopes stored clockwise, rotated to start at the smallest in circular order.
class FareyTriple {
public:
    FareyTriple() : s_{Slope(0, 1), Slope::infinity(), Slope(1, 1)} {}
    FareyTriple(Slope a, Slope b, Slope c) : s_{std::move(a), std::move(b), std::move(c)} {
        if (!is_adjacent(s_[0], s_[1]) || !is_adjacent(s_[1], s_[2]) || !is_adjacent(s_[0], s_[2]))
            throw std::invalid_argument("not a Farey triple");
        std::sort(s_.begin(), s_.end());
        std::swap(s_[1], s_[2]);  // ascending -> clockwise from the smallest
    }
    static FareyTriple base() { return {}; }
    const Slope& operator[](std::size_t i) const { return s_[i]; }
    const std::array<Slope, 3>& slopes() const { return s_; }
    bool contains(const Slope& s) const { return s_[0] == s || s_[1] == s || s_[2] == s; }
    bool operator==(const FareyTriple&) const = default;
    auto operator<=>(const FareyTriple& o) const { return s_ <=> o.s_; }
    std::string str() const { return "(" + s_[0].str() + "," + s_[1].str() + "," + s_[2].str() + ")"; }

private:
    std::array<Slope, 3> s_;
};

struct DirectedFareyEdge {
    FareyPair pair;
    Slope from_slope;
    Slope to_slope;
    DirectedFareyEdge reversed() const { return {pair, to_slope, from_slope}; }
    bool operator==(const DirectedFareyEdge&) const = default;
};

// One step of Stern-Brocot descent: cross (lo, hi) from opp into lo + hi.
// Vectors are oriented so det(lo, hi) = 1.
struct DescentStep {
    SlopeVector lo;
    SlopeVector hi;
    SlopeVector opp;
    SlopeVector mid() const { return lo + hi; }
};

namespace detail {

inline const std::array<DescentStep, 3>& base_intervals() {
    static const std::array<DescentStep, 3> b{{
        {{0, 1}, {1, 1}, {1, 0}},   // [0, 1]
        {{1, 1}, {1, 0}, {0, 1}},   // [1, inf]
        {{-1, 0}, {0, 1}, {1, 1}},  // [inf, 0]
    }};
    return b;
}

inline bool is_base(const Slope& s) {
    return s == Slope(0, 1) || s == Slope(1, 1) || s.is_infinite();
}

}  // namespace detail

// Calls on_step for each interval crossed on the way from the base triangle to s.
template <class F>
void descend(const Slope& s, F&& on_step) {
    if (detail::is_base(s)) return;
    const auto& base = detail::base_intervals();
    DescentStep cur = s.num() < 0 ? base[2] : (s.num() < s.den() ? base[0] : base[1]);
    SlopeVector target = s.vec();
    if (det(cur.lo, target) < 0) target = -target;
    for (;;) {
        on_step(static_cast<const DescentStep&>(cur));
        SlopeVector m = cur.mid();
        BigInt d = det(m, target);
        if (d == 0) return;
        if (d > 0)
            cur = {m, cur.hi, cur.lo};
        else
            cur = {cur.lo, m, cur.hi};
    }
}

inline std::vector<DirectedFareyEdge> farey_path(const Slope& s) {
    std::vector<DirectedFareyEdge> out;
    descend(s, [&](const DescentStep& st) {
        out.push_back({FareyPair(Slope(st.lo), Slope(st.hi)), Slope(st.opp), Slope(st.mid())});
    });
    return out;
}

inline std::size_t depth(const Slope& s) {
    std::size_t n = 0;
    descend(s, [&](const DescentStep&) { ++n; });
    return n;
}

// Consecutive neighbours around a slope: Y_n = y0 + n * step, (center, Y_n, Y_{n+1}) a Farey triple.
struct NeighborRing {
    SlopeVector center;
    SlopeVector y0;
    SlopeVector step;
    SlopeVector at_vec(long long n) const { return y0 + BigInt(n) * step; }
    Slope at(long long n) const { return Slope(at_vec(n)); }
};

inline NeighborRing neighbor_ring(const Slope& s) {
    if (s == Slope(0, 1)) return {{0, 1}, {1, 0}, {0, 1}};
    if (s.is_infinite()) return {{1, 0}, {0, 1}, {1, 0}};
    if (s == Slope(1, 1)) return {{1, 1}, {0, 1}, {-1, -1}};
    std::optional<DescentStep> last;
    descend(s, [&](const DescentStep& st) { last = st; });
    return {last->mid(), last->lo, -last->mid()};
}

// Text form "p/q", "p" (q = 1) or "inf".
inline Slope parse_slope(std::string_view text, std::size_t offset = 0) {
    auto trim_l = text.find_first_not_of(" \t");
    if (trim_l == std::string_view::npos) throw ParseError(offset, "empty slope");
    auto trim_r = text.find_last_not_of(" \t");
    std::string_view t = text.substr(trim_l, trim_r - trim_l + 1);
    offset += trim_l;
    if (t == "inf" || t == "-inf" || t == "+inf" || t == "oo") return Slope::infinity();
    auto parse_int = [&](std::string_view s, std::size_t at) {
        if (s.empty()) throw ParseError(at, "expected integer");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw ParseError(at + i, "expected digits");
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') throw ParseError(at + k, std::string("unexpected character '") + s[k] + "' in slope");
        return BigInt(std::string(s[0] == '+' ? s.substr(1) : s));
    };
    auto slash = t.find('/');
    BigInt p = parse_int(t.substr(0, slash), offset);
    BigInt q = 1;
    if (slash != std::string_view::npos) q = parse_int(t.substr(slash + 1), offset + slash + 1);
    if (p == 0 && q == 0) throw ParseError(offset, "slope 0/0 is undefined");
    return Slope(p, q);
}

// --- arcs on the boundary circle ---

// Closed arc from lo counterclockwise to hi; `full` marks the whole circle.
struct Arc {
    Slope lo;
    Slope hi;
    bool full = false;

    static Arc circle() { return {Slope(0, 1), Slope(0, 1), true}; }
    bool operator==(const Arc&) const = default;
    std::string str() const { return full ? "[0/1,0/1]*" : "[" + lo.str() + "," + hi.str() + "]"; }
};

namespace detail {
// Whether a comes no later than b when travelling counterclockwise from start.
inline bool ccw_leq(const Slope& start, const Slope& a, const Slope& b) {
    auto rank = [&](const Slope& s) { return s >= start ? 0 : 1; };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    return a <= b;
}
}  // namespace detail

inline bool arc_contains(const Arc& arc, const Slope& s) {
    if (arc.full) return true;
    return detail::ccw_leq(arc.lo, s, arc.hi);
}

inline bool arc_subset(const Arc& inner, const Arc& outer) {
    if (outer.full) return true;
    if (inner.full) return false;
    return detail::ccw_leq(outer.lo, inner.lo, inner.hi) && detail::ccw_leq(outer.lo, inner.hi, outer.hi);
}

inline double arc_measure(const Arc& a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a.full) return two_pi;
    double d = a.hi.angle() - a.lo.angle();
    while (d <= 0.0) d += two_pi;
    while (d > two_pi) d -= two_pi;
    return d;
}

inline Arc parse_arc(std::string_view text, std::size_t offset = 0) {
    auto l = text.find('[');
    auto r = text.rfind(']');
    if (l == std::string_view::npos) throw ParseError(offset, "arc must start with '['");
    if (r == std::string_view::npos || r < l) throw ParseError(offset + text.size(), "arc must end with ']'");
    auto comma = text.find(',', l);
    if (comma == std::string_view::npos || comma > r) throw ParseError(offset + l + 1, "arc needs two endpoints");
    Slope lo = parse_slope(text.substr(l + 1, comma - l - 1), offset + l + 1);
    Slope hi = parse_slope(text.substr(comma + 1, r - comma - 1), offset + comma + 1);
    if (lo == hi) throw ParseError(offset + l, "degenerate arc");
    return {lo, hi, false};
}

// Canonical disjoint union of closed arcs, sorted by lower endpoint counterclockwise from 0/1.
class ArcSet {
public:
    ArcSet() = default;
    explicit ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) { canonicalize(); }

    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t size() const { return arcs_.size(); }
    bool empty() const { return arcs_.empty(); }
    bool is_full() const { return arcs_.size() == 1 && arcs_[0].full; }

    bool contains(const Slope& s) const {
        return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return arc_contains(a, s); });
    }
    bool contains(const Arc& a) const {
        return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& o) { return arc_subset(a, o); });
    }
    bool subset_of(const ArcSet& other) const {
        return std::all_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return other.contains(a); });
    }
    double measure() const {
        double m = 0.0;
        for (const auto& a : arcs_) m += arc_measure(a);
        return m;
    }
    bool operator==(const ArcSet&) const = default;

private:
    // Linear position on [0, 2pi]: the slope 0/1 appears at both ends.
    struct Pos {
        Slope s;
        bool end = false;
        auto operator<=>(const Pos& o) const {
            if (end != o.end) return end ? std::strong_ordering::greater : std::strong_ordering::less;
            return s <=> o.s;
        }
        bool operator==(const Pos& o) const { return end == o.end && s == o.s; }
    };

    void canonicalize() {
        if (std::any_of(arcs_.begin(), arcs_.end(), [](const Arc& a) { return a.full; })) {
            arcs_ = {Arc::circle()};
            return;
        }
        const Slope zero(0, 1);
        std::vector<std::pair<Pos, Pos>> pieces;
        for (const auto& a : arcs_) {
            if (a.lo == a.hi) throw std::invalid_argument("degenerate arc in ArcSet");
            if (a.hi == zero)
                pieces.push_back({{a.lo}, {zero, true}});
            else if (a.lo < a.hi)
                pieces.push_back({{a.lo}, {a.hi}});
            else {
                pieces.push_back({{a.lo}, {zero, true}});
                pieces.push_back({{zero}, {a.hi}});
            }
        }
        std::sort(pieces.begin(), pieces.end());
        std::vector<std::pair<Pos, Pos>> merged;
        for (auto& pc : pieces) {
            if (!merged.empty() && pc.first <= merged.back().second) {
                if (merged.back().second < pc.second) merged.back().second = pc.second;
            } else {
                merged.push_back(pc);
            }
        }
        arcs_.clear();
        if (merged.empty()) return;
        Pos start{zero}, finish{zero, true};
        if (merged.size() == 1 && merged[0].first == start && merged[0].second == finish) {
            arcs_ = {Arc::circle()};
            return;
        }
        bool wrap = merged.size() > 1 && merged.front().first == start && merged.back().second == finish;
        std::size_t first = wrap ? 1 : 0;
        std::size_t last = wrap ? merged.size() - 1 : merged.size();
        for (std::size_t i = first; i < last; ++i) arcs_.push_back({merged[i].first.s, merged[i].second.s, false});
        if (wrap) arcs_.push_back({merged.back().first.s, merged.front().second.s, false});
    }

    std::vector<Arc> arcs_;
};

}  // namespace torus_ends
