#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>
#include <sstream>

#include "torus_ends/io/cli.hpp"

using namespace torus_ends;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "torus-ends");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json invoke_json(std::vector<std::string> args) {
    auto r = invoke(std::move(args));
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out);
}

}  // namespace

TEST(Cli, Examples) {
    auto t = invoke_json({"trace", "--char", "3,3,3", "--slope", "1/2"});
    EXPECT_EQ(t["value"]["re"].get<double>(), 6.0);
    EXPECT_EQ(t["value"]["im"].get<double>(), 0.0);

    auto b = invoke_json({"bq", "--char", "2,2i,-2i"});
    EXPECT_EQ(b["verdict"], "satisfied");
    EXPECT_FALSE(b["attractor"]["vertices"].empty());

    auto e = invoke_json({"ends", "--char", "0,1,1i", "--depth", "12"});
    EXPECT_GE(e["cover"]["arcs"].size(), 3u);
    EXPECT_NEAR(e["kappa"]["re"].get<double>(), -2, 1e-12);
    EXPECT_NEAR(e["kappa"]["im"].get<double>(), 0, 1e-12);

    auto c = invoke_json({"classify", "--char", "0,3,3"});
    EXPECT_EQ(c["verdict"], "singleton_curve");
    EXPECT_EQ(c["slope"], "0/1");

    auto k = invoke_json({"kappa", "--char", "1,1,1"});
    EXPECT_EQ(k["value"]["re"].get<double>(), 0.0);
    EXPECT_EQ(k["details"]["su2"], "yes");

    auto a = invoke_json({"act", "--char", "1,2,3", "--word", "c s"});
    Character moved = act(Character(1, 2, 3), std::vector<Move>{Move::c, Move::s});
    EXPECT_EQ(io::character_from(a["result"]), moved);

    auto u = invoke_json({"tau", "--char", "2,2i,-2i"});
    EXPECT_EQ(u["verdict"], "attractor");
    auto w = invoke_json({"tau", "--char", "0,3,3i", "--trace"});
    EXPECT_EQ(w["verdict"], "end_witness");
    EXPECT_EQ(w["slope"], "0/1");
    EXPECT_TRUE(w["details"].contains("log"));
}

TEST(Cli, ExitCodes) {
    auto p = invoke({"trace", "--char", "3,3,3x", "--slope", "1/2"});
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("position 5"), std::string::npos) << p.err;
    auto s = invoke({"trace", "--char", "3,3,3", "--slope", "1/0x"});
    EXPECT_EQ(s.code, 2);
    EXPECT_NE(s.err.find("position"), std::string::npos);
    EXPECT_EQ(invoke({"nope", "--char", "1,1,1"}).code, 2);
    EXPECT_EQ(invoke({"bq"}).code, 2);
    EXPECT_EQ(invoke({"trace", "--char", "1,1,1"}).code, 2);
    EXPECT_EQ(invoke({"bq", "--char", "1,1,1", "--tol", "-1"}).code, 2);
    EXPECT_EQ(invoke({"render", "--char", "1,1,1", "--depth", "17"}).code, 2);
    EXPECT_EQ(invoke({"tau", "--char", "1,1,3"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);

    auto loose = invoke({"bq", "--char", "2.1+0.3i,1.7-0.2i,2.4+1i", "--max-vertices", "2"});
    EXPECT_EQ(loose.code, 0);
    EXPECT_EQ(json::parse(loose.out)["verdict"], "exhausted");
    EXPECT_EQ(invoke({"bq", "--char", "2.1+0.3i,1.7-0.2i,2.4+1i", "--max-vertices", "2", "--strict"}).code, 3);
    EXPECT_EQ(invoke({"bq", "--char", "3,3,3", "--strict"}).code, 0);
    EXPECT_EQ(invoke({"bq", "--char", "3,3,3", "--out", "/nonexistent-dir/x.json"}).code, 1);
}

TEST(Cli, EnvironmentOverridesAndFlagsWin) {
    ::setenv("TORUS_ENDS_DEPTH", "5", 1);
    ::setenv("TORUS_ENDS_TOL", "1e-7", 1);
    ::setenv("TORUS_ENDS_MAX_VERTICES", "1234", 1);
    auto a = invoke_json({"ends", "--char", "0,1,1i"});
    auto b = invoke_json({"ends", "--char", "0,1,1i", "--depth", "6", "--tol", "1e-8"});
    ::unsetenv("TORUS_ENDS_DEPTH");
    ::unsetenv("TORUS_ENDS_TOL");
    ::unsetenv("TORUS_ENDS_MAX_VERTICES");
    EXPECT_EQ(a["config"]["depth"], 5);
    EXPECT_EQ(a["cover"]["depth"], 5);
    EXPECT_EQ(a["config"]["tol"].get<double>(), 1e-7);
    EXPECT_EQ(a["budget"]["limit"], 1234);
    EXPECT_EQ(b["config"]["depth"], 6);
    EXPECT_EQ(b["config"]["tol"].get<double>(), 1e-8);
    EXPECT_EQ(b["budget"]["limit"], 1234);
    EXPECT_EQ(invoke_json({"ends", "--char", "0,1,1i"})["config"]["depth"], 12);
}

TEST(Cli, RecordsRoundTripAndRerunBitForBit) {
    std::vector<std::vector<std::string>> matrix;
    for (std::string ch : {"3,3,3", "0,1,1i", "2,2i,-2i", "0,3,3", "1,1,3", "1,1,1", "0,3,3i", "2i,2i,1", "1.5+0.5i,2-1i,0.3+2i"}) {
        matrix.push_back({"trace", "--char", ch, "--slope", "5/7"});
        matrix.push_back({"kappa", "--char", ch});
        matrix.push_back({"act", "--char", ch, "--word", "s c xy"});
        matrix.push_back({"bq", "--char", ch, "--max-vertices", "20000"});
        matrix.push_back({"ends", "--char", ch, "--depth", "6"});
        matrix.push_back({"classify", "--char", ch, "--depth", "6"});
    }
    matrix.push_back({"tau", "--char", "0,1,1i", "--trace"});
    matrix.push_back({"classify", "--char", "1,1,1", "--timing"});
    for (auto& args : matrix) {
        auto first = invoke(args);
        ASSERT_EQ(first.code, 0) << args[0] << " " << args[2] << ": " << first.err;
        ResultRecord r = io::from_json(json::parse(first.out));
        EXPECT_EQ(io::from_json(io::to_json(r)), r) << args[0] << " " << args[2];
        EXPECT_EQ(io::to_json(r).dump(2) + "\n", first.out);
        if (!r.timing_ms) EXPECT_EQ(invoke(args).out, first.out) << args[0] << " " << args[2];
    }
}

TEST(Cli, CsvArcsSortedFromZero) {
    for (std::string ch : {"0,1,1i", "2i,2i,1", "1.5,2.5,1i"}) {
        auto r = invoke({"ends", "--char", ch, "--depth", "10", "--format", "csv"});
        ASSERT_EQ(r.code, 0);
        std::istringstream in(r.out);
        std::string line;
        std::vector<Slope> los;
        while (std::getline(in, line)) {
            if (line.rfind("arc,", 0) != 0) continue;
            auto a = line.find(',') + 1, b = line.find(',', a);
            los.push_back(parse_slope(line.substr(a, b - a)));
        }
        ASSERT_GE(los.size(), 2u) << ch;
        for (std::size_t i = 1; i < los.size(); ++i) {
            EXPECT_TRUE(detail::ccw_leq(Slope(0, 1), los[i - 1], los[i])) << los[i - 1].str() << " " << los[i].str();
            EXPECT_NE(los[i - 1], los[i]);
        }
    }
}

TEST(Svg, DeterministicNineDigits) {
    for (std::string ch : {"3,3,3", "0,1,1i", "0,3,3"}) {
        auto a = invoke({"render", "--char", ch, "--depth", "8"}), b = invoke({"render", "--char", ch, "--depth", "8"});
        ASSERT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out);
        EXPECT_EQ(a.out.rfind("<?xml", 0), 0u);
        std::regex number(R"(-?\d+\.?\d*(e[-+]\d+)?)");
        for (auto it = std::sregex_iterator(a.out.begin(), a.out.end(), number); it != std::sregex_iterator(); ++it) {
            std::string m = it->str(0);
            std::string mant = m.substr(0, m.find('e'));
            int digits = 0;
            bool lead = true;
            for (char c : mant) {
                if (!std::isdigit(static_cast<unsigned char>(c))) continue;
                if (lead && c == '0') continue;
                lead = false;
                ++digits;
            }
            EXPECT_LE(digits, 9) << m;
        }
    }
}

TEST(Svg, Examples) {
    SvgCounts n;
    auto full = render_svg(Character(1, 1, 1), 6, default_tol, &n);
    EXPECT_NE(full.find("<g id=\"cover\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.05\">\n<circle"), std::string::npos);
    EXPECT_EQ(n.arcs, 1u);

    render_svg(Character(3, 3, 3), 6, default_tol, &n);
    EXPECT_EQ(n.arcs, 0u);
    EXPECT_EQ(n.dots, 0u);
    // tints darken away from the base
    EXPECT_LT(svg::tint_bucket(trace_at(Character(3, 3, 3), Slope(1, 2))),
              svg::tint_bucket(trace_at(Character(3, 3, 3), Slope(13, 21))));

    auto single = compute_cover(Character(0, 3, 3), 6);
    render_svg(Character(0, 3, 3), 6, default_tol, &n);
    EXPECT_EQ(n.arcs, 1u);
    EXPECT_TRUE(arc_contains(single.arcs.arcs()[0], Slope(0, 1)));
    EXPECT_LT(single.measure(), 0.7);

    EXPECT_THROW(render_svg(Character(1, 1, 1), 17), std::invalid_argument);
}

TEST(Svg, GeodesicsMeetTheCircleOrthogonally) {
    std::regex arc(R"(M(\S+) (\S+) A(\S+) \S+ 0 0 [01] (\S+) (\S+))");
    for (auto [a, b] : {std::pair{Slope(0, 1), Slope(1, 1)}, std::pair{Slope(1, 2), Slope(2, 3)},
                        std::pair{Slope(-1, 1), Slope::infinity()}, std::pair{Slope(3, 5), Slope(5, 8)}}) {
        std::smatch m;
        std::string path = svg::geodesic_path(a, b);
        ASSERT_TRUE(std::regex_match(path, m, arc)) << path;
        double x1 = std::stod(m[1]), y1 = std::stod(m[2]), r = std::stod(m[3]), x2 = std::stod(m[4]), y2 = std::stod(m[5]);
        EXPECT_NEAR(x1 * x1 + y1 * y1, 1, 1e-8);
        EXPECT_NEAR(x2 * x2 + y2 * y2, 1, 1e-8);
        // orthogonal circle through both points: centre at distance sqrt(1 + r^2) along the bisector
        double mx = (x1 + x2) / 2, my = (y1 + y2) / 2, ml = std::hypot(mx, my);
        double cd = std::sqrt(1 + r * r);
        double cx = mx / ml * cd, cy = my / ml * cd;
        EXPECT_NEAR(std::hypot(x1 - cx, y1 - cy), r, 1e-7);
        EXPECT_NEAR(std::hypot(x2 - cx, y2 - cy), r, 1e-7);
    }
    EXPECT_EQ(svg::geodesic_path(Slope(0, 1), Slope::infinity()).find('A'), std::string::npos);
}
