#pragma once

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torus_ends/ends.hpp"

namespace torus_ends {

struct RunConfig {
    double tol = default_tol;
    int depth = 12;
    std::size_t max_vertices = 1'000'000;
    double saturation = saturation_bound;
    long long walk_window = ring_window;
    std::uint64_t seed = 0;
    std::string format = "json";
    bool strict = false;
    bool operator==(const RunConfig&) const = default;
};

struct WitnessRecord {
    std::string kind;
    Slope slope;
    Complex value;
    bool operator==(const WitnessRecord&) const = default;
};

struct CoverRecord {
    int depth = 0;
    std::vector<Arc> arcs;
    std::vector<Slope> kept;
    double measure = 0;
    bool partial = false;
    bool operator==(const CoverRecord&) const = default;
};

inline CoverRecord cover_record(const ArcCover& c) {
    return {c.depth, c.arcs.arcs(), c.kept_points, c.measure(), c.partial};
}

struct ResultRecord {
    std::string command;
    Character character;
    std::optional<std::string> verdict;
    std::optional<Complex> value;
    bool saturated = false;
    std::optional<Slope> slope;
    std::optional<Character> result;
    std::optional<WitnessRecord> witness;
    std::vector<FareyTriple> attractor;
    std::optional<CoverRecord> cover;
    std::vector<Slope> ends;
    std::string reason;
    std::size_t budget_used = 0;
    std::size_t budget_limit = 0;
    RunConfig config;
    std::optional<double> timing_ms;
    nlohmann::json details = nlohmann::json::object();

    bool operator==(const ResultRecord&) const = default;
};

namespace io {

using nlohmann::json;

inline json complex_json(Complex c) { return {{"re", c.real()}, {"im", c.imag()}}; }
inline Complex complex_from(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

inline json character_json(const Character& ch) {
    return {{"x", complex_json(ch.x())}, {"y", complex_json(ch.y())}, {"z", complex_json(ch.z())}};
}
inline Character character_from(const json& j) {
    return {complex_from(j.at("x")), complex_from(j.at("y")), complex_from(j.at("z"))};
}

inline Slope slope_from(const json& j) { return parse_slope(j.get<std::string>()); }

inline json slopes_json(const std::vector<Slope>& v) {
    json a = json::array();
    for (auto& s : v) a.push_back(s.str());
    return a;
}
inline std::vector<Slope> slopes_from(const json& j) {
    std::vector<Slope> v;
    for (auto& s : j) v.push_back(slope_from(s));
    return v;
}

inline json arc_json(const Arc& a) {
    json j = {{"lo", a.lo.str()}, {"hi", a.hi.str()}};
    if (a.full) j["full"] = true;
    return j;
}
inline Arc arc_from(const json& j) {
    return {slope_from(j.at("lo")), slope_from(j.at("hi")), j.value("full", false)};
}

inline json triple_json(const FareyTriple& t) { return {t[0].str(), t[1].str(), t[2].str()}; }
inline FareyTriple triple_from(const json& j) { return {slope_from(j.at(0)), slope_from(j.at(1)), slope_from(j.at(2))}; }

inline json config_json(const RunConfig& c) {
    return {{"tol", c.tol},       {"depth", c.depth}, {"max_vertices", c.max_vertices}, {"saturation", c.saturation},
            {"walk_window", c.walk_window}, {"seed", c.seed}, {"format", c.format}, {"strict", c.strict}};
}
inline RunConfig config_from(const json& j) {
    RunConfig c;
    c.tol = j.at("tol").get<double>();
    c.depth = j.at("depth").get<int>();
    c.max_vertices = j.at("max_vertices").get<std::size_t>();
    c.saturation = j.at("saturation").get<double>();
    c.walk_window = j.at("walk_window").get<long long>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.format = j.at("format").get<std::string>();
    c.strict = j.at("strict").get<bool>();
    return c;
}

inline json to_json(const ResultRecord& r) {
    json j;
    j["command"] = r.command;
    j["character"] = character_json(r.character);
    j["kappa"] = complex_json(r.character.kappa());
    if (r.verdict) j["verdict"] = *r.verdict;
    if (r.value) j["value"] = complex_json(*r.value);
    if (r.saturated) j["saturated"] = true;
    if (r.slope) j["slope"] = r.slope->str();
    if (r.result) j["result"] = character_json(*r.result);
    if (r.witness) j["witness"] = {{"kind", r.witness->kind}, {"slope", r.witness->slope.str()}, {"value", complex_json(r.witness->value)}};
    if (!r.attractor.empty()) {
        json v = json::array();
        for (auto& t : r.attractor) v.push_back(triple_json(t));
        j["attractor"] = {{"vertices", v}};
    }
    if (r.cover) {
        json arcs = json::array();
        for (auto& a : r.cover->arcs) arcs.push_back(arc_json(a));
        j["cover"] = {{"depth", r.cover->depth}, {"arcs", arcs}, {"kept", slopes_json(r.cover->kept)},
                      {"measure", r.cover->measure}, {"partial", r.cover->partial}};
    }
    if (!r.ends.empty()) j["ends"] = slopes_json(r.ends);
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["budget"] = {{"used", r.budget_used}, {"limit", r.budget_limit}};
    j["config"] = config_json(r.config);
    if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
    if (!r.details.empty()) j["details"] = r.details;
    return j;
}

inline ResultRecord from_json(const json& j) {
    ResultRecord r;
    r.command = j.at("command").get<std::string>();
    r.character = character_from(j.at("character"));
    if (j.contains("verdict")) r.verdict = j["verdict"].get<std::string>();
    if (j.contains("value")) r.value = complex_from(j["value"]);
    r.saturated = j.value("saturated", false);
    if (j.contains("slope")) r.slope = slope_from(j["slope"]);
    if (j.contains("result")) r.result = character_from(j["result"]);
    if (j.contains("witness")) {
        auto& w = j["witness"];
        r.witness = WitnessRecord{w.at("kind").get<std::string>(), slope_from(w.at("slope")), complex_from(w.at("value"))};
    }
    if (j.contains("attractor"))
        for (auto& t : j["attractor"].at("vertices")) r.attractor.push_back(triple_from(t));
    if (j.contains("cover")) {
        auto& c = j["cover"];
        CoverRecord cr;
        cr.depth = c.at("depth").get<int>();
        for (auto& a : c.at("arcs")) cr.arcs.push_back(arc_from(a));
        cr.kept = slopes_from(c.at("kept"));
        cr.measure = c.at("measure").get<double>();
        cr.partial = c.at("partial").get<bool>();
        r.cover = std::move(cr);
    }
    if (j.contains("ends")) r.ends = slopes_from(j["ends"]);
    r.reason = j.value("reason", std::string());
    r.budget_used = j.at("budget").at("used").get<std::size_t>();
    r.budget_limit = j.at("budget").at("limit").get<std::size_t>();
    r.config = config_from(j.at("config"));
    if (j.contains("timing_ms")) r.timing_ms = j["timing_ms"].get<double>();
    if (j.contains("details")) r.details = j["details"];
    return r;
}

inline std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// One row per fact: kind followed by up to three fields. Cover arcs keep their canonical order.
inline std::string to_csv(const ResultRecord& r) {
    std::ostringstream os;
    auto row = [&](const std::string& kind, const std::string& a = "", const std::string& b = "", const std::string& c = "") {
        os << kind << ',' << a << ',' << b << ',' << c << '\n';
    };
    auto cplx = [&](const std::string& kind, Complex v) { row(kind, csv_number(v.real()), csv_number(v.imag())); };
    row("kind", "a", "b", "c");
    row("command", r.command);
    cplx("x", r.character.x());
    cplx("y", r.character.y());
    cplx("z", r.character.z());
    cplx("kappa", r.character.kappa());
    if (r.verdict) row("verdict", *r.verdict);
    if (r.value) cplx("value", *r.value);
    if (r.slope) row("slope", r.slope->str());
    if (r.result) {
        cplx("result_x", r.result->x());
        cplx("result_y", r.result->y());
        cplx("result_z", r.result->z());
    }
    if (r.witness) row("witness", r.witness->kind, r.witness->slope.str(), csv_number(std::abs(r.witness->value)));
    for (auto& t : r.attractor) row("attractor", t[0].str(), t[1].str(), t[2].str());
    if (r.cover) {
        row("cover", std::to_string(r.cover->depth), csv_number(r.cover->measure), r.cover->partial ? "partial" : "complete");
        for (auto& a : r.cover->arcs) row("arc", a.full ? "full" : a.lo.str(), a.full ? "full" : a.hi.str());
        for (auto& s : r.cover->kept) row("kept", s.str());
    }
    for (auto& s : r.ends) row("end", s.str());
    if (!r.reason.empty()) {
        std::string q;
        for (char ch : r.reason) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        row("reason", '"' + q + '"');
    }
    row("budget", std::to_string(r.budget_used), std::to_string(r.budget_limit));
    return os.str();
}

}  // namespace io
}  // namespace torus_ends
