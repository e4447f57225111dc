#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <string>

#include "torus_ends/ends.hpp"

namespace torus_ends {

inline constexpr int max_render_depth = 16;

struct SvgPoint {
    double x, y;
};

// Boundary point of a slope in screen coordinates (y grows downward).
inline SvgPoint boundary_point(const Slope& s, double radius = 1.0) {
    double t = s.angle();
    return {radius * std::cos(t), -radius * std::sin(t)};
}

namespace svg {

inline std::string num(double v) {
    if (std::abs(v) < 5e-10) v = 0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string pt(SvgPoint p) { return num(p.x) + " " + num(p.y); }

// Hyperbolic geodesic between two boundary points: an arc orthogonal to the unit circle, or a diameter.
inline std::string geodesic_path(const Slope& a, const Slope& b) {
    double ta = a.angle(), tb = b.angle();
    double d = std::abs(ta - tb);
    if (d > std::numbers::pi) d = 2 * std::numbers::pi - d;
    SvgPoint p = boundary_point(a), q = boundary_point(b);
    if (std::abs(d - std::numbers::pi) < 1e-12) return "M" + pt(p) + " L" + pt(q);
    double r = std::tan(d / 2);
    double mx = (p.x + q.x) / 2, my = (p.y + q.y) / 2, ml = std::hypot(mx, my);
    double dist = 1 / std::cos(d / 2);
    SvgPoint c{mx / ml * dist, my / ml * dist};
    double cross = (p.x - c.x) * (q.y - c.y) - (p.y - c.y) * (q.x - c.x);
    return "M" + pt(p) + " A" + num(r) + " " + num(r) + " 0 0 " + (cross > 0 ? "1" : "0") + " " + pt(q);
}

// The horocycle of a slope: image of its Ford circle, tangent to the boundary at the slope.
inline std::pair<SvgPoint, double> horocycle(const Slope& s) {
    if (s.is_infinite() || s == Slope(0, 1)) {
        SvgPoint t = boundary_point(s, 0.5);
        return {t, 0.5};
    }
    double p = static_cast<double>(s.num()), q = static_cast<double>(s.den());
    Complex zt(p / q, 1 / (q * q));
    Complex w = (Complex(0, 1) - zt) / (zt + Complex(0, 1));
    Complex u = std::polar(1.0, s.angle());
    double re = (w * std::conj(u)).real();
    double r = (1 + std::norm(w) - 2 * re) / (2 * (1 - re));
    return {boundary_point(s, 1 - r), r};
}

inline const char* palette(int bucket) {
    static const char* colors[] = {"#f4a259", "#eef3f8", "#d5e1ee", "#b9cde3", "#98b4d4", "#7699c2",
                                   "#557dad", "#3a6194", "#244673", "#132c4d", "#050d1a"};
    return colors[bucket];
}

// 0 for traces of modulus at most 2, then half-decades above 2, 10 when saturated.
inline int tint_bucket(const TraceValue& v) {
    if (v.saturated) return 10;
    double m = v.mag();
    if (m <= 2) return 0;
    int b = 1 + static_cast<int>(std::floor(2 * std::log10(m / 2)));
    return std::clamp(b, 1, 9);
}

}  // namespace svg

struct SvgCounts {
    std::size_t regions = 0, edges = 0, arcs = 0, dots = 0;
};

// The cover drawn on the boundary: whatever the end analysis can certify for this character at this depth.
inline ArcCover render_cover(const Character& ch, int depth, double eps) {
    if (std::abs(ch.kappa() - 2.0) > eps) return compute_cover(ch, depth, default_cover_budget, eps);
    ArcCover c;
    c.depth = depth;
    auto r = reducible_classify(ch, eps, depth);
    if (r.kind == EndClassification::Kind::FullPL) c.arcs = ArcSet({Arc::circle()});
    if (r.kind == EndClassification::Kind::SingletonLamination && !r.lamination.empty()) c.arcs = ArcSet({r.lamination.back()});
    if (r.slope) c.kept_points.push_back(*r.slope);
    return c;
}

inline std::string render_svg(const Character& ch, int depth, double eps = default_tol, SvgCounts* counts = nullptr) {
    if (depth < 0 || depth > max_render_depth)
        throw std::invalid_argument("render depth must lie in [0, " + std::to_string(max_render_depth) + "]");
    SvgCounts n;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" viewBox=\"-1.12 -1.12 2.24 2.24\">\n"
       << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n";

    std::vector<Slope> slopes{Slope(0, 1), Slope(1, 1), Slope::infinity(), Slope(-1, 1)};
    std::vector<std::pair<Slope, Slope>> edges{{Slope(0, 1), Slope(1, 1)},
                                               {Slope(1, 1), Slope::infinity()},
                                               {Slope::infinity(), Slope(0, 1)},
                                               {Slope::infinity(), Slope(-1, 1)},
                                               {Slope(-1, 1), Slope(0, 1)}};
    std::deque<std::tuple<SlopeVector, SlopeVector, int>> q{{{0, 1}, {1, 1}, 2}, {{1, 1}, {1, 0}, 2},
                                                            {{-1, 0}, {-1, 1}, 2}, {{-1, 1}, {0, 1}, 2}};
    while (!q.empty()) {
        auto [lo, hi, d] = q.front();
        q.pop_front();
        if (d > depth) continue;
        SlopeVector m = lo + hi;
        slopes.emplace_back(m);
        edges.push_back({Slope(lo), Slope(m)});
        edges.push_back({Slope(m), Slope(hi)});
        q.emplace_back(lo, m, d + 1);
        q.emplace_back(m, hi, d + 1);
    }

    os << "<g id=\"regions\" stroke=\"#ffffff\" stroke-width=\"0.002\">\n";
    for (const auto& s : slopes) {
        auto [c, r] = svg::horocycle(s);
        int b = svg::tint_bucket(trace_at(ch, s));
        os << "<circle cx=\"" << svg::num(c.x) << "\" cy=\"" << svg::num(c.y) << "\" r=\"" << svg::num(r) << "\" fill=\""
           << svg::palette(b) << "\"><title>" << s.str() << "</title></circle>\n";
        ++n.regions;
    }
    os << "</g>\n<g id=\"tessellation\" fill=\"none\" stroke=\"#222222\" stroke-width=\"0.003\">\n";
    for (const auto& [a, b] : edges) {
        os << "<path d=\"" << svg::geodesic_path(a, b) << "\"/>\n";
        ++n.edges;
    }
    os << "</g>\n";

    ArcCover cover = render_cover(ch, std::max(depth, 1), eps);
    const double band = 1.04;
    os << "<g id=\"cover\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.05\">\n";
    for (const auto& a : cover.arcs.arcs()) {
        if (a.full) {
            os << "<circle cx=\"0\" cy=\"0\" r=\"" << svg::num(band) << "\"/>\n";
        } else {
            bool large = arc_measure(a) > std::numbers::pi;
            os << "<path d=\"M" << svg::pt(boundary_point(a.lo, band)) << " A" << svg::num(band) << " " << svg::num(band)
               << " 0 " << (large ? 1 : 0) << " 0 " << svg::pt(boundary_point(a.hi, band)) << "\"/>\n";
        }
        ++n.arcs;
    }
    os << "</g>\n<g id=\"kept\" fill=\"#c0392b\">\n";
    for (const auto& s : cover.kept_points) {
        SvgPoint p = boundary_point(s, band);
        os << "<circle cx=\"" << svg::num(p.x) << "\" cy=\"" << svg::num(p.y) << "\" r=\"0.03\"/>\n";
        ++n.dots;
    }
    os << "</g>\n</svg>\n";
    if (counts) *counts = n;
    return os.str();
}

}  // namespace torus_ends
