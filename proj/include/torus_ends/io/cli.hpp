#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "torus_ends/io/record.hpp"
#include "torus_ends/io/svg.hpp"
#include "torus_ends/tau.hpp"

namespace torus_ends::cli {

enum ExitCode { ok = 0, failure = 1, bad_input = 2, exhausted = 3 };

struct Invocation {
    std::string command;
    std::string char_text;
    std::string slope_text;
    std::string word_text;
    std::string out;
    bool timing = false;
    bool steps = false;
    bool discrete = false;
    RunConfig config;
};

namespace detail {

inline void fill_bq(ResultRecord& r, const BQVerdict& v) {
    r.verdict = verdict_name(v.kind);
    if (v.witness)
        r.witness = WitnessRecord{witness_kind_name(v.witness->kind), v.witness->slope, v.witness->value.v};
    r.attractor = v.attractor;
    r.budget_used = v.visited;
    nlohmann::json d;
    d["frontier"] = v.frontier;
    d["ambiguous"] = v.ambiguous;
    if (v.reducible) d["reducible"] = true;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : v.boundary)
        edges.push_back({{"pair", {e.pair.a.str(), e.pair.b.str()}}, {"kept", e.z_slope.str()}, {"closed", e.zp_slope.str()}});
    d["boundary"] = edges;
    nlohmann::json rings = nlohmann::json::array();
    for (const auto& c : v.rings)
        rings.push_back({{"center", c.center.str()}, {"first", c.first.str()}, {"second", c.second.str()},
                         {"method", ring_method_name(c.bound.method)}});
    d["rings"] = rings;
    if (v.witnesses.size() > 1) {
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : v.witnesses) ws.push_back(w.slope.str());
        d["witnesses"] = ws;
    }
    r.details = d;
}

inline nlohmann::json tau_json(const TauOutcome& t, bool steps) {
    nlohmann::json d = {{"kind", tau_kind_name(t.kind)}, {"vertex", io::triple_json(t.vertex)}, {"flips", t.flips},
                        {"revisited", t.revisited}, {"steps", t.steps.size()}};
    if (t.kind == TauOutcome::Kind::EndWitness) d["slope"] = t.slope.str();
    if (!t.reason.empty()) d["reason"] = t.reason;
    if (steps) {
        nlohmann::json log = nlohmann::json::array();
        for (const auto& s : t.steps)
            log.push_back({{"action", tau_action_name(s.action)}, {"vertex", io::triple_json(s.vertex)},
                           {"real", s.real_slope.str()}, {"z", s.z}});
        d["log"] = log;
    }
    return d;
}

inline nlohmann::json arcs_json(const std::vector<Arc>& arcs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : arcs) a.push_back(io::arc_json(x));
    return a;
}

}  // namespace detail

struct Outcome {
    ResultRecord record;
    std::string svg;
    int code = ok;
};

inline Outcome execute(const Invocation& inv) {
    Outcome o;
    ResultRecord& r = o.record;
    const RunConfig& cfg = inv.config;
    r.command = inv.command;
    r.config = cfg;
    r.character = parse_character(inv.char_text);
    const Character& ch = r.character;
    auto t0 = std::chrono::steady_clock::now();

    if (inv.command == "trace") {
        Slope s = parse_slope(inv.slope_text);
        TraceValue v = trace_at(ch, s);
        r.slope = s;
        r.value = v.v;
        r.saturated = v.saturated;
        r.details = {{"color", std::string(1, color_name(color_of(s)))}, {"depth", depth(s)}};
    } else if (inv.command == "kappa") {
        r.value = ch.kappa();
        auto c = classify_type(ch, cfg.tol);
        r.details = {{"real", tri_name(c.real)},   {"imaginary", tri_name(c.imaginary)}, {"dihedral", tri_name(c.dihedral)},
                     {"su2", tri_name(c.su2)},     {"reducible", tri_name(c.reducible)}};
    } else if (inv.command == "act") {
        auto word = parse_moves(inv.word_text);
        r.result = act(ch, word);
        r.value = r.result->kappa();
        nlohmann::json w = nlohmann::json::array();
        for (Move m : word) w.push_back(move_name(m));
        r.details = {{"word", w}, {"kappa_drift", std::abs(r.result->kappa() - ch.kappa())}};
    } else if (inv.command == "bq") {
        SearchOptions opt;
        opt.max_vertices = cfg.max_vertices;
        opt.eps = cfg.tol;
        auto v = check_bq(ch, opt);
        detail::fill_bq(r, v);
        r.budget_limit = cfg.max_vertices;
        if (cfg.strict && v.kind == BQVerdict::Kind::Exhausted) o.code = exhausted;
    } else if (inv.command == "ends") {
        r.budget_limit = cfg.max_vertices;
        if (is_reducible(ch, cfg.tol)) {
            auto c = reducible_classify(ch, cfg.tol, cfg.depth);
            r.verdict = classification_name(c.kind);
            r.slope = c.slope;
            r.reason = c.reason;
            r.details = {{"lamination", detail::arcs_json(c.lamination)}};
        } else {
            auto c = compute_cover(ch, cfg.depth, cfg.max_vertices, cfg.tol);
            r.verdict = c.partial ? "partial" : "complete";
            r.cover = cover_record(c);
            r.budget_used = c.examined;
            r.details = {{"discarded", c.discarded.size()}};
            if (cfg.strict && c.partial) o.code = exhausted;
        }
    } else if (inv.command == "classify") {
        ClassifyOptions opt;
        opt.eps = cfg.tol;
        opt.max_vertices = cfg.max_vertices;
        opt.cover_budget = cfg.max_vertices;
        opt.cover_depth = cfg.depth;
        opt.discrete = inv.discrete;
        auto c = classify(ch, opt);
        r.verdict = classification_name(c.kind);
        r.slope = c.slope;
        r.ends = c.ends;
        r.reason = c.reason;
        r.budget_limit = cfg.max_vertices;
        nlohmann::json d = {{"branch", c.branch}};
        if (c.bq) {
            ResultRecord tmp;
            detail::fill_bq(tmp, *c.bq);
            r.witness = tmp.witness;
            r.attractor = tmp.attractor;
            r.budget_used = c.bq->visited;
            d["bq"] = verdict_name(c.bq->kind);
        }
        if (c.cover) r.cover = cover_record(*c.cover);
        if (c.tau) d["tau"] = detail::tau_json(*c.tau, inv.steps);
        if (c.star)
            d["star"] = {{"center", c.star->center.str()}, {"method", ring_method_name(c.star->method)},
                         {"edges", c.star->edges.size()}};
        if (!c.lamination.empty()) d["lamination"] = detail::arcs_json(c.lamination);
        if (c.reducible) d["dependence"] = dependence_name(c.reducible->dependence);
        if (c.range_violation) d["range_violation"] = true;
        r.details = d;
        if (cfg.strict && c.kind == EndClassification::Kind::Undetermined) o.code = exhausted;
    } else if (inv.command == "tau") {
        auto f = imaginary_coordinates(ch, cfg.tol);
        if (!f) throw std::invalid_argument("tau needs an imaginary character (two purely imaginary entries, one real)");
        TauOptions opt;
        opt.budget = cfg.max_vertices;
        opt.walk_window = cfg.walk_window;
        opt.eps = cfg.tol;
        auto t = tau_reduce(*f, FareyTriple::base(), opt);
        r.verdict = tau_kind_name(t.kind);
        if (t.kind == TauOutcome::Kind::EndWitness) {
            r.slope = t.slope;
            r.value = t.value;
        }
        if (t.kind == TauOutcome::Kind::Attractor) r.attractor = {t.vertex};
        r.reason = t.reason;
        r.budget_used = t.steps.size();
        r.budget_limit = cfg.max_vertices;
        r.details = detail::tau_json(t, inv.steps);
        if (cfg.strict && t.kind == TauOutcome::Kind::Exhausted) o.code = exhausted;
    } else if (inv.command == "render") {
        SvgCounts n;
        o.svg = render_svg(ch, cfg.depth, cfg.tol, &n);
        r.details = {{"regions", n.regions}, {"edges", n.edges}, {"arcs", n.arcs}, {"dots", n.dots}};
        if (!inv.out.empty()) r.details["path"] = inv.out;
    } else {
        throw std::invalid_argument("unknown command " + inv.command);
    }
    if (inv.timing)
        r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

inline std::string serialize(const ResultRecord& r) {
    return r.config.format == "csv" ? io::to_csv(r) : io::to_json(r).dump(2) + "\n";
}

inline bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

// Parses argv, runs one subcommand and writes its record; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Trace-tree analysis of one-holed torus characters"};
    app.require_subcommand(1);
    app.fallthrough();
    Invocation inv;
    RunConfig& c = inv.config;
    app.add_option("--char", inv.char_text, "character x,y,z (complex literals such as 2, -1.5, 2i, 1+2i)");
    app.add_option("--slope", inv.slope_text, "slope p/q or 1/0");
    app.add_option("--word", inv.word_text, "moves among c, s, xy, yz, zx separated by spaces");
    app.add_option("--tol", c.tol, "tolerance")->envname("TORUS_ENDS_TOL")->check(CLI::PositiveNumber);
    app.add_option("--depth", c.depth, "cover or render depth")->envname("TORUS_ENDS_DEPTH")->check(CLI::PositiveNumber);
    app.add_option("--max-vertices", c.max_vertices, "search budget")->envname("TORUS_ENDS_MAX_VERTICES")->check(CLI::PositiveNumber);
    app.add_option("--window", c.walk_window, "walk window for ring searches")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "seed echoed in the record");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", inv.out, "output file (SVG for render)");
    app.add_flag("--strict", c.strict, "exit 3 when a budget runs out");
    app.add_flag("--timing", inv.timing, "record wall time");
    app.add_flag("--trace", inv.steps, "include step logs");
    app.add_flag("--discrete", inv.discrete, "assert the trace set is discrete");

    struct Sub {
        const char* name;
        const char* help;
    };
    for (Sub s : {Sub{"trace", "trace at a slope"}, Sub{"kappa", "commutator trace and type flags"},
                  Sub{"act", "apply a word of moves"}, Sub{"bq", "check the extended BQ-conditions"},
                  Sub{"ends", "cover of the end invariant"}, Sub{"classify", "classify the end invariant"},
                  Sub{"tau", "tau-reduction of an imaginary character"}, Sub{"render", "SVG of the tessellation"}})
        app.add_subcommand(s.name, s.help)->callback([&inv, name = std::string(s.name)] { inv.command = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "error: " << e.what() << "\n";
        return bad_input;
    }
    if (inv.char_text.empty()) {
        err << "error: --char is required\n";
        return bad_input;
    }
    if (inv.command == "trace" && inv.slope_text.empty()) {
        err << "error: trace needs --slope\n";
        return bad_input;
    }
    if (inv.command == "act" && inv.word_text.empty()) {
        err << "error: act needs --word\n";
        return bad_input;
    }

    Outcome o;
    try {
        o = execute(inv);
    } catch (const ParseError& e) {
        err << "parse error " << e.what() << "\n";
        return bad_input;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return bad_input;
    }

    if (inv.command == "render") {
        if (inv.out.empty()) {
            out << o.svg;
            return o.code;
        }
        if (!write_file(inv.out, o.svg)) {
            err << "error: cannot write " << inv.out << "\n";
            return failure;
        }
        out << serialize(o.record);
        return o.code;
    }
    std::string text = serialize(o.record);
    if (inv.out.empty()) {
        out << text;
    } else if (!write_file(inv.out, text)) {
        err << "error: cannot write " << inv.out << "\n";
        return failure;
    }
    return o.code;
}

}  // namespace torus_ends::cli
