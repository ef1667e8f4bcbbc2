#include <rgclh.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace rgclh;
using report::json;
using report::RunReport;

namespace {

constexpr int kHolds = 0;
constexpr int kViolated = 1;
constexpr int kInvalid = 2;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& out, const json& j)
{
    std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write " + out);
    f << text;
}

int finish(RunReport& r, const std::string& out, std::chrono::steady_clock::time_point t0)
{
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.exit_code != kInvalid) r.exit_code = r.holds() ? kHolds : kViolated;
    write_out(out, r.to_json());
    return r.exit_code;
}

void summary(const json& verdicts)
{
    for (const auto& v : verdicts) {
        std::cerr << (v.value("holds", false) ? "holds     " : "VIOLATED  ") << v.value("name", "") << "\n";
    }
}

struct ClhArgs {
    std::string sub;
    int n = 2;
    int rounds = 2;
    std::string variant = "annotated";
    std::string config;
    std::string emit;
    bool cross_check = false;
};

clh::ClhConfig clh_config(const ClhArgs& a)
{
    clh::ClhConfig cfg;
    cfg.n = a.n;
    cfg.rounds = a.rounds;
    cfg.variant = clh::parse_variant(a.variant);
    if (!a.config.empty()) {
        json j;
        try {
            j = json::parse(read_file(a.config));
            cfg.n = j.value("N", cfg.n);
            cfg.rounds = j.value("rounds", cfg.rounds);
            cfg.variant = clh::parse_variant(j.value("variant", std::string(clh::variant_name(cfg.variant))));
        } catch (const json::exception& e) {
            throw clh::InvalidConfig(std::string("config: ") + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

json semantic(const std::string& name, const SemanticVerdict& v, const ExploreResult& res)
{
    return report::semantic_json(name, v, res.universe(), report::actor_names(res));
}

void emit_theorems(const std::string& dir, const clh::ClhConfig& cfg, const std::map<std::string, Derivation>& ths)
{
    std::filesystem::create_directories(dir);
    for (const auto& [name, d] : ths) {
        std::ofstream f(std::filesystem::path(dir) / (name + ".deriv"), std::ios::binary);
        f << to_sexpr(d) << "\n";
    }
    std::ofstream f(std::filesystem::path(dir) / "universe.json", std::ios::binary);
    json u = {{"clh", {{"N", cfg.n}, {"rounds", cfg.rounds}, {"variant", clh::variant_name(cfg.variant)}}}};
    f << u.dump(2) << "\n";
}

void run_clh(const ClhArgs& a, RunReport& r)
{
    clh::ClhConfig cfg = clh_config(a);
    r.args = {{"subverb", a.sub}, {"N", cfg.n}, {"rounds", cfg.rounds}, {"variant", clh::variant_name(cfg.variant)}};
    if (a.cross_check) r.args["cross_check"] = true;
    Universe u = clh::universe(cfg);
    clh::ClhSpec s = clh::spec(cfg);
    r.input = to_sexpr(clh::executable(cfg));

    if (a.sub == "theorems") {
        auto ths = clh::theorem_derivations(cfg);
        if (!a.emit.empty()) emit_theorems(a.emit, cfg, ths);
        CheckOptions o = clh::check_options(cfg);
        for (const auto& [name, d] : ths) {
            r.verdicts.push_back(report::check_report_json(name, check_derivation(d, u, o), u));
            std::vector<Quintuple> qs;
            if (a.cross_check) {
                collect_quintuples(d, qs);
            } else {
                qs.push_back(d.concl);
            }
            for (std::size_t k = 0; k < qs.size(); ++k) {
                SemanticVerdict v = check_quintuple_semantic(qs[k], u);
                json j = report::semantic_json(name + " semantic #" + std::to_string(k), v, u, {});
                j["command"] = to_sexpr(qs[k].c);
                r.verdicts.push_back(j);
            }
        }
        return;
    }

    ExploreResult res = clh::explore_clh(cfg, u);
    r.extra["exploration"] = report::stats_json(res.stats);
    if (a.sub == "explore") {
        r.verdicts.push_back(semantic("assertions and evaluation", exploration_verdict(res), res));
        r.verdicts.push_back(semantic("terminal q=[] and cur=reserved", clh::check_terminals(res, cfg.n), res));
    } else if (a.sub == "invariants") {
        r.verdicts.push_back(semantic("invariant", check_global_invariant(res, s.inv), res));
        r.verdicts.push_back(semantic("queued nodes pending", check_global_invariant(res, clh::queued_pending()), res));
        r.verdicts.push_back(semantic("status prev", check_global_invariant(res, clh::status_prev_all(cfg.n)), res));
        CheckOptions filtered;
        filtered.filter = s.inv;
        for (int i = 1; i <= cfg.n; ++i) {
            Expr pre = ex::and_({s.inv, ex::mem(clh::tid(i), clh::q())});
            r.verdicts.push_back(report::verdict_json("status prev implication " + thread_name(i - 1),
                                                      implies_pred(pre, clh::status_prev(i), u, filtered), u));
        }
    } else if (a.sub == "guarantees") {
        r.verdicts.push_back(semantic("thread guarantees", clh::check_thread_guarantees(res, s), res));
        r.verdicts.push_back(semantic("queue index non-increasing", clh::check_index_monotone(res, cfg.n), res));
    } else if (a.sub == "lock-props") {
        r.verdicts.push_back(semantic("mutual exclusion at crit", clh::check_mutual_exclusion(res), res));
        for (const auto& c : clh::check_generic_lock_properties(s, u).checks) {
            r.verdicts.push_back(report::verdict_json(c.name, c.verdict, u));
        }
    } else {
        throw clh::InvalidConfig("unknown clh subverb '" + a.sub + "'");
    }
}

void run_rg_check(const std::string& deriv, const std::string& universe, bool sem, RunReport& r)
{
    std::string text = read_file(deriv);
    std::string utext = read_file(universe);
    r.args = {{"derivation", std::filesystem::path(deriv).filename().string()},
              {"universe", std::filesystem::path(universe).filename().string()}};
    if (sem) r.args["semantic"] = true;
    r.input = text + "\n" + utext;
    UniverseSpec us = parse_universe_json(utext);
    Derivation d = parse_derivation(text);
    r.verdicts.push_back(report::check_report_json("derivation", check_derivation(d, us.universe, us.options), us.universe));
    if (sem && r.holds()) {
        std::vector<Quintuple> qs;
        collect_quintuples(d, qs);
        for (std::size_t k = 0; k < qs.size(); ++k) {
            r.verdicts.push_back(report::semantic_json("semantic #" + std::to_string(k),
                                                       check_quintuple_semantic(qs[k], us.universe), us.universe, {}));
        }
    }
}

void run_reorder(const std::string& file, const std::string& model, RunReport& r)
{
    std::string text = read_file(file);
    r.args = {{"input", std::filesystem::path(file).filename().string()}, {"model", model}};
    r.input = text;
    MemoryModel m = memory_model(model);
    ReorderReport rep = pairwise_report(parse_command(text), m);
    r.extra["reorder"] = report::reorder_json(rep);
    r.extra["table"] = report::reorder_table(rep);
    std::cerr << report::reorder_table(rep);
}

void run_transform(const std::string& file, const std::string& model, bool strip, RunReport& r)
{
    std::string text = read_file(file);
    r.args = {{"input", std::filesystem::path(file).filename().string()}, {"model", model}};
    if (strip) r.args["strip"] = true;
    r.input = text;
    Command c = transform(parse_command(text), memory_model(model));
    if (strip) c = strip_ordering(c);
    r.extra["transformed"] = to_sexpr(c);
    std::cerr << to_sexpr(c) << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rely/guarantee, exploration and weak-memory checks for the CLH lock"};
    app.require_subcommand(1);
    std::string out;
    app.add_option("--out", out, "report file (default stdout)");

    ClhArgs ca;
    auto* clh_cmd = app.add_subcommand("clh", "CLH lock checks");
    clh_cmd->add_option("subverb", ca.sub, "explore | invariants | guarantees | lock-props | theorems")->required();
    clh_cmd->add_option("--n", ca.n, "threads");
    clh_cmd->add_option("--rounds", ca.rounds, "lock rounds per thread");
    clh_cmd->add_option("--variant", ca.variant, "annotated | hw | buggy | fenced-usage");
    clh_cmd->add_option("--config", ca.config, "JSON file {N, rounds, variant}");
    clh_cmd->add_option("--emit", ca.emit, "directory for derivation files (theorems)");
    clh_cmd->add_flag("--cross-check", ca.cross_check, "explore every quintuple of each derivation (theorems)");
    clh_cmd->add_option("--out", out, "report file (default stdout)");

    std::string deriv, universe;
    bool sem = false;
    auto* rg_cmd = app.add_subcommand("rg-check", "check a derivation");
    rg_cmd->add_option("derivation", deriv)->required();
    rg_cmd->add_option("universe", universe)->required();
    rg_cmd->add_flag("--semantic", sem, "also explore every quintuple");
    rg_cmd->add_option("--out", out, "report file (default stdout)");

    std::string file, model = "arm-like";
    bool strip = false;
    auto* ro_cmd = app.add_subcommand("reorder", "pairwise reordering report");
    ro_cmd->add_option("file", file)->required();
    ro_cmd->add_option("--model", model);
    ro_cmd->add_option("--out", out, "report file (default stdout)");
    auto* tr_cmd = app.add_subcommand("transform", "resolve parallelized sequential composition");
    tr_cmd->add_option("file", file)->required();
    tr_cmd->add_option("--model", model);
    tr_cmd->add_flag("--strip", strip, "drop release annotations and fences afterwards");
    tr_cmd->add_option("--out", out, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kInvalid;
    }

    auto t0 = std::chrono::steady_clock::now();
    RunReport r;
    r.verb = app.get_subcommands().front()->get_name();
    try {
        if (*clh_cmd) {
            run_clh(ca, r);
        } else if (*rg_cmd) {
            run_rg_check(deriv, universe, sem, r);
        } else if (*ro_cmd) {
            run_reorder(file, model, r);
        } else {
            run_transform(file, model, strip, r);
        }
    } catch (const std::exception& e) {
        r.exit_code = kInvalid;
        r.verdicts = json::array();
        r.extra["error"] = e.what();
        std::cerr << "error: " << e.what() << "\n";
        try {
            return finish(r, out, t0);
        } catch (const std::exception&) {
            return kInvalid;
        }
    }
    summary(r.verdicts);
    return finish(r, out, t0);
}
