#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "torus_ends/trace_tree.hpp"

using namespace torus_ends;
using namespace std::complex_literals;

namespace {

Character random_character(std::mt19937_64& rng, double scale = 2.5) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {Complex(d(rng), d(rng)), Complex(d(rng), d(rng)), Complex(d(rng), d(rng))};
}

// All mediants to the given depth below the three base intervals.
std::vector<Slope> slopes_to_depth(int depth) {
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

Slope random_slope(std::mt19937_64& rng, int max_depth) {
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

}  // namespace

TEST(TraceAt, Examples) {
    Character m(3, 3, 3);
    EXPECT_EQ(trace_at(m, Slope(0, 1)).v, Complex(3));
    EXPECT_EQ(trace_at(m, Slope(1, 2)).v, Complex(6));
    EXPECT_EQ(trace_at(m, Slope(1, 3)).v, Complex(15));
    EXPECT_EQ(trace_at(m, Slope(-1, 1)).v, Complex(6));
    EXPECT_EQ(trace_at(m, Slope(2, 5)).v, Complex(6 * 15 - 3));
}

TEST(TraceAt, AgreesWithMatrixOracle) {
    std::mt19937_64 rng(21);
    int tested = 0;
    for (int i = 0; i < 500; ++i) {
        Character ch = random_character(rng);
        Slope s = random_slope(rng, 12);
        auto a = trace_at(ch, s);
        auto b = trace_word(ch, primitive_word(s));
        if (a.saturated || b.saturated) continue;
        double rel = std::abs(a.v - b.value) / std::max(1.0, std::abs(b.value));
        EXPECT_LE(rel, 1e-8) << s.str();
        ++tested;
    }
    EXPECT_GT(tested, 450);
}

TEST(TraceAt, Saturation) {
    Character big(50, 50, 50);
    auto v = trace_at(big, Slope(1, 80));
    EXPECT_TRUE(v.saturated);
    EXPECT_TRUE(std::isinf(v.mag()));
    EXPECT_LE(std::abs(v.v), saturation_bound * (1 + 1e-12));
    EXPECT_FALSE(trace_at(big, Slope(1, 5)).saturated);
}

TEST(VertexAndEdge, RelationsHoldEverywhere) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100; ++i) {
        Character ch = random_character(rng, 2.0);
        Slope s = random_slope(rng, 10);
        if (detail::is_base(s)) continue;
        auto path = farey_path(s);
        auto& last = path.back();
        VertexState vs = vertex_state(ch, FareyTriple(last.pair.a, last.pair.b, last.to_slope));
        if (!vs.saturated()) EXPECT_LE(vs.residual(ch.kappa()), 1e-9 * vs.scale());
        EdgeState es = edge_state(ch, last.pair);
        if (!es.saturated()) EXPECT_LE(es.residual(), 1e-9 * (1 + std::abs(es.x.v * es.y.v)));
    }
}

TEST(Neighbors, RecurrenceExamples) {
    // around 0/1 of (3,3,3) the ring reads 3, 3, 6, 15, 39: x = 3 with consecutive values 3, 6
    auto n = neighbors_of(Character(3, 3, 3), Slope(0, 1), 1, 4);
    ASSERT_EQ(n.values.size(), 4u);
    EXPECT_EQ(n.values[0].v, Complex(3));
    EXPECT_EQ(n.values[1].v, Complex(6));
    EXPECT_EQ(n.values[2].v, Complex(15));
    EXPECT_EQ(n.values[3].v, Complex(39));
    EXPECT_EQ(n.model.kind, NeighborCase::a);
    // x = 0: period four y, z, -y, -z
    auto p = neighbors_of(Character(0, 1, 1i), Slope(0, 1), 0, 7);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(p.values[k + 2].v, -p.values[k].v);
    // here x^2 = kappa + 2 as well, which takes precedence
    EXPECT_EQ(p.model.kind, NeighborCase::e);
    auto q = neighbors_of(Character(0, 1, 3), Slope(0, 1), 0, 7);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(q.values[k + 2].v, -q.values[k].v);
    EXPECT_EQ(q.model.kind, NeighborCase::b);
}

TEST(Neighbors, DegenerateLinearCase) {
    // x = 2 with kappa = 6: step^2 = kappa - 2
    Character ch(2, 3, 3 + std::sqrt(6.0 - 2.0 + 4.0 - 4.0));
    Complex k = ch.kappa();
    auto n = neighbors_of(ch, Slope(0, 1), -5, 5);
    EXPECT_EQ(n.model.kind, NeighborCase::c);
    EXPECT_NEAR(std::abs(n.model.step * n.model.step - (k - 2.0)), 0, 1e-9);
    for (int i = -5; i <= 5; ++i) EXPECT_NEAR(std::abs(n.values[i + 5].v - n.model.value(i)), 0, 1e-9);
    Character neg(-2, 3, 1.5);
    auto m = neighbors_of(neg, Slope(0, 1), -5, 5);
    EXPECT_EQ(m.model.kind, NeighborCase::d);
    EXPECT_NEAR(std::abs(m.model.step * m.model.step - (neg.kappa() - 2.0)), 0, 1e-9);
    for (int i = -5; i <= 5; ++i) EXPECT_NEAR(std::abs(m.values[i + 5].v - m.model.value(i)), 0, 1e-9);
}

TEST(Neighbors, ClosedFormMatchesRecurrence) {
    std::mt19937_64 rng(23);
    int tested = 0;
    while (tested < 100) {
        Character ch = random_character(rng, 2.0);
        Slope s = random_slope(rng, 5);
        auto n = neighbors_of(ch, s, -30, 30);
        Complex x = n.model.x;
        if (std::abs(x * x - 4.0) <= 1e-3 || std::abs(x * x - (ch.kappa() + 2.0)) <= 1e-3) continue;
        bool sat = false;
        for (auto& v : n.values) sat = sat || v.saturated;
        if (sat) continue;
        for (long long i = -30; i <= 30; ++i) {
            Complex rec = n.values[i + 30].v, cf = n.model.value(i);
            EXPECT_LE(std::abs(rec - cf), 1e-6 * std::max(1.0, std::abs(rec)));
        }
        ++tested;
    }
}

TEST(Neighbors, GeometricWhenXSquaredIsKappaPlusTwo) {
    // choose y, z, then x with x^2 = kappa + 2, i.e. y^2 + z^2 - x y z = 0
    // y1 / y0 = lambda, so the recurrence runs along the growing mode
    Complex y = 0.7, z = 1.5;
    Complex x = (y * y + z * z) / (y * z);
    Character c2(x, y, z);
    ASSERT_LE(std::abs(x * x - (c2.kappa() + 2.0)), 1e-12);
    auto n = neighbors_of(c2, Slope(0, 1), 0, 20);
    EXPECT_EQ(n.model.kind, NeighborCase::e);
    double lam = std::abs(n.model.lambda);
    for (int i = 1; i <= 20; ++i) {
        double r = n.values[i].mag() / n.values[i - 1].mag();
        bool geometric = std::abs(r - lam) <= 1e-6 * lam || std::abs(r - 1 / lam) <= 1e-6 / lam;
        EXPECT_TRUE(geometric) << i << " " << r;
    }
}

TEST(Neighbors, QuasiPeriodicIsBounded) {
    // x = 2 cos(1) is an irrational rotation: values stay bounded
    Character ch(2 * std::cos(1.0), 5, 7);
    auto n = neighbors_of(ch, Slope(0, 1), -2000, 2000);
    EXPECT_EQ(n.model.kind, NeighborCase::b);
    double bound = std::abs(n.model.A) + std::abs(n.model.B);
    for (auto& v : n.values) EXPECT_LE(v.mag(), bound * (1 + 1e-9));
}

TEST(Flow, Examples) {
    auto f = flow_at(Character(3, 3, 3), FareyPair(Slope(0, 1), Slope::infinity()));
    EXPECT_FALSE(f.tie);
    EXPECT_EQ(f.direction.to_slope, Slope(1, 1));
    EXPECT_EQ(f.direction.from_slope, Slope(-1, 1));

    // z = 1 at 1/1 and z' = 5 at -1/1: x y = 6
    auto g = flow_at(Character(2, 3, 1), FareyPair(Slope(0, 1), Slope::infinity()));
    EXPECT_EQ(g.direction.from_slope, Slope(-1, 1));
    EXPECT_EQ(g.direction.to_slope, Slope(1, 1));

    auto d = flow_at(Character(0, 0, 3), FareyPair(Slope(0, 1), Slope::infinity()));
    EXPECT_TRUE(d.tie);
    // equal depth; 1/1 precedes -1/1 in circular order
    EXPECT_EQ(d.direction.to_slope, Slope(1, 1));
}

TEST(DescendFlow, Examples) {
    auto r = descend_flow(Character(3, 3, 3), FareyTriple::base(), 100);
    EXPECT_EQ(r.kind, FlowResult::Kind::Sink);
    EXPECT_EQ(r.vertex.triple, FareyTriple::base());

    auto s = descend_flow(Character(0, 1, 1i), FareyTriple::base(), 100);
    EXPECT_EQ(s.kind, FlowResult::Kind::SmallRegion);
    EXPECT_EQ(s.slope, Slope(0, 1));
    EXPECT_EQ(s.value.v, Complex(0));
}

TEST(DescendFlow, MarkoffReconvergesFromDepthTen) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 20; ++i) {
        Slope s = random_slope(rng, 10);
        if (detail::is_base(s)) continue;
        auto last = farey_path(s).back();
        auto r = descend_flow(Character(3, 3, 3), FareyTriple(last.pair.a, last.pair.b, s), 100);
        EXPECT_EQ(r.kind, FlowResult::Kind::Sink);
        EXPECT_EQ(r.vertex.triple, FareyTriple::base());
    }
}

TEST(Dihedral, TracesTakeThreeValues) {
    Character ch(0, 0, 1.7);
    double root = std::sqrt(std::abs(ch.kappa() + 2.0));
    for (auto& s : slopes_to_depth(10)) {
        double m = trace_at(ch, s).mag();
        EXPECT_TRUE(m <= 1e-9 || std::abs(m - root) <= 1e-9) << s.str();
    }
}

// Structural facts at every visited vertex and edge of a breadth-first sweep.
TEST(Structure, EdgeAndSinkPropertiesOnRandomSweeps) {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 40; ++trial) {
        Character ch = random_character(rng, 3.0);
        Complex k = ch.kappa();
        std::deque<std::pair<VertexState, int>> q{{vertex_state(ch, FareyTriple::base()), 0}};
        std::size_t seen = 0;
        while (!q.empty() && seen < 400) {
            auto [vs, d] = q.front();
            q.pop_front();
            ++seen;
            if (vs.saturated()) continue;
            EXPECT_LE(vs.residual(k), 1e-9 * vs.scale());
            int outward = 0;
            std::array<bool, 3> out{};
            for (std::size_t i = 0; i < 3; ++i) {
                const Slope &a = vs.triple[(i + 1) % 3], &b = vs.triple[(i + 2) % 3];
                FareyPair e(a, b);
                auto [s1, s2] = e.opposite();
                const Slope& cp = s1 == vs.triple[i] ? s2 : s1;
                TraceValue va = vs.values[(i + 1) % 3], vb = vs.values[(i + 2) % 3];
                TraceValue vcp = across(va, vb, vs.values[i]);
                // edge relation; then: small opposite values force a small endpoint
                double zm = vs.values[i].mag(), zpm = vcp.mag();
                double K = std::max({2.0, zm, zpm});
                if (!vcp.saturated) EXPECT_LE(std::min(va.mag(), vb.mag()), K + 1e-9 * K);
                auto f = orient(e, vs.triple[i], zm, cp, zpm, 1e-9);
                out[i] = f.direction.to_slope == cp;
                outward += out[i];
                if (d < 5) q.push_back({make_vertex({{{a, va}, {b, vb}, {cp, vcp}}}), d + 1});
            }
            if (outward >= 2) {
                // some region is small, or two of the values vanish
                bool small = false;
                for (std::size_t i = 0; i < 3; ++i) {
                    std::size_t j = (i + 1) % 3, l = (i + 2) % 3;
                    small = small || vs.values[i].mag() <= 2 + 1e-9 ||
                            (vs.values[j].mag() <= 1e-9 && vs.values[l].mag() <= 1e-9);
                }
                EXPECT_TRUE(small);
            }
        }
    }
}
