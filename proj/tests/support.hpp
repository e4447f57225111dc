#pragma once

#include <deque>
#include <random>
#include <tuple>
#include <vector>

#include "torus_ends/trace_tree.hpp"

namespace support {

using namespace torus_ends;

inline Character random_character(std::mt19937_64& rng, double scale = 3.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {Complex(d(rng), d(rng)), Complex(d(rng), d(rng)), Complex(d(rng), d(rng))};
}

inline Character random_real(std::mt19937_64& rng, double scale = 3.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng)};
}

// (i a, i b, z) with kappa in (lo, hi).
inline Character random_imaginary(std::mt19937_64& rng, double lo, double hi, double scale = 6.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    for (;;) {
        Character ch(Complex(0, d(rng)), Complex(0, d(rng)), d(rng));
        double k = ch.kappa().real();
        if (k > lo && k < hi) return ch;
    }
}

inline Slope random_slope(std::mt19937_64& rng, int max_depth) {
    std::uniform_int_distribution<int> base(0, 2), coin(0, 1), dd(0, max_depth);
    const auto& b = detail::base_intervals()[base(rng)];
    SlopeVector lo = b.lo, hi = b.hi;
    int d = dd(rng);
    if (d == 0) return Slope(coin(rng) ? lo : hi);
    for (int i = 1; i < d; ++i) {
        SlopeVector m = lo + hi;
        (coin(rng) ? lo : hi) = m;
    }
    return Slope(lo + hi);
}

inline std::vector<Slope> slopes_to_depth(int depth) {
    std::vector<Slope> out{Slope(0, 1), Slope(1, 1), Slope::infinity()};
    std::deque<std::tuple<Slope, Slope, int>> q{{Slope(0, 1), Slope(1, 1), 1}, {Slope(1, 1), Slope::infinity(), 1},
                                                {Slope::infinity(), Slope(0, 1), 1}};
    while (!q.empty()) {
        auto [a, b, d] = q.front();
        q.pop_front();
        Slope m = mediant(a, b);
        out.push_back(m);
        if (d < depth) {
            q.emplace_back(a, m, d + 1);
            q.emplace_back(m, b, d + 1);
        }
    }
    return out;
}

struct Audit {
    std::size_t edges = 0, vertices = 0, violations = 0;
};

// Edge bound: min(|x|,|y|) <= max(2, |z|, |z'|). Two outward arrows: the shared region is small or the other two vanish.
inline void audit_vertex(const VertexState& vs, Audit& a, double eps = 1e-9) {
    if (vs.saturated()) return;
    ++a.vertices;
    std::array<bool, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const Slope &s = vs.triple[(i + 1) % 3], &t = vs.triple[(i + 2) % 3];
        FareyPair e(s, t);
        auto [p, q] = e.opposite();
        const Slope& cp = p == vs.triple[i] ? q : p;
        TraceValue vx = vs.values[(i + 1) % 3], vy = vs.values[(i + 2) % 3];
        TraceValue vc = across(vx, vy, vs.values[i]);
        if (vc.saturated) continue;
        ++a.edges;
        double K = std::max({2.0, vs.values[i].mag(), vc.mag()});
        if (std::min(vx.mag(), vy.mag()) > K * (1 + eps)) ++a.violations;
        out[i] = orient(e, vs.triple[i], vs.values[i].mag(), cp, vc.mag(), eps).direction.to_slope == cp;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t j = (i + 1) % 3, shared = (i + 2) % 3;
        if (!(out[i] && out[j])) continue;
        double scale = 1 + vs.values[shared].mag();
        bool small = vs.values[shared].mag() <= 2 * (1 + eps);
        bool others_zero = vs.values[i].mag() <= eps * scale && vs.values[j].mag() <= eps * scale;
        if (!small && !others_zero) ++a.violations;
    }
}

}  // namespace support
