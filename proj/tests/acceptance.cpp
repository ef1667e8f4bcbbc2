// One line per acceptance criterion; exit status 0 only when all pass.
#include <rgclh.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

using namespace rgclh;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string data_path(const std::string& rel) { return std::string(RGCLH_DATA) + "/" + rel; }
std::string golden_path(const std::string& rel) { return std::string(RGCLH_GOLDEN) + "/" + rel; }

std::string trimmed(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

const char* kRuleFiles[] = {"asgn", "spin", "seq", "conseq", "par_u", "par_int", "par_gen"};

// shared across criteria 3 to 5; the result refers to the universe
struct ClhRun {
    clh::ClhConfig cfg;
    Universe u;
    clh::ClhSpec spec;
    std::optional<ExploreResult> res;
    double seconds = 0;
};

ClhRun& annotated_run()
{
    static ClhRun run{clh::ClhConfig{}, clh::universe(clh::ClhConfig{}), clh::spec(clh::ClhConfig{}), std::nullopt};
    if (!run.res) {
        auto t0 = std::chrono::steady_clock::now();
        run.res.emplace(clh::explore_clh(run.cfg, run.u, Bounds{10'000'000}));
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return run;
}

Outcome textbook()
{
    Outcome o;
    UniverseSpec us = parse_universe_json(slurp(data_path("int_x.json")));
    auto t0 = std::chrono::steady_clock::now();
    CheckReport r = check_derivation(parse_derivation(slurp(data_path("textbook.deriv"))), us.universe, us.options);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(r.holds(), "derivation rejected");
    o.require(s < 1.0, "took " + std::to_string(s) + "s");
    return o;
}

Outcome rule_suite()
{
    Outcome o;
    UniverseSpec us = parse_universe_json(slurp(data_path("rules/universe.json")));
    auto t0 = std::chrono::steady_clock::now();
    for (const char* f : kRuleFiles) {
        std::string base = std::string("rules/") + f;
        bool pass = check_derivation(parse_derivation(slurp(data_path(base + "_pass.deriv"))), us.universe, us.options).holds();
        bool fail = check_derivation(parse_derivation(slurp(data_path(base + "_fail.deriv"))), us.universe, us.options).holds();
        o.require(pass, std::string(f) + " passing derivation rejected");
        o.require(!fail, std::string(f) + " failing derivation accepted");
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < 10.0, "took " + std::to_string(s) + "s");
    return o;
}

Outcome clh_safety()
{
    Outcome o;
    ClhRun& r = annotated_run();
    o.require(r.res->complete, "exploration hit the ceiling");
    o.require(r.res->stats.configs <= 10'000'000, "more than 1e7 configs");
    o.require(check_global_invariant(*r.res, r.spec.inv).holds, "invariant");
    o.require(clh::check_thread_guarantees(*r.res, r.spec).holds, "guarantees");
    o.require(exploration_verdict(*r.res).holds, "assertions");
    o.require(clh::check_terminals(*r.res, r.cfg.n).holds, "terminals");
    auto ths = clh::theorem_derivations(r.cfg);
    for (const char* name : {"acquire", "release", "locking-system"}) {
        o.require(check_derivation(ths.at(name), r.u, clh::check_options(r.cfg)).holds(), std::string(name) + " derivation");
    }
    o.require(r.seconds < 300, "took " + std::to_string(r.seconds) + "s");
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(r.res->stats.configs) + " configs";
    return o;
}

Outcome mutex_fifo()
{
    Outcome o;
    ClhRun& r = annotated_run();
    o.require(clh::check_mutual_exclusion(*r.res).holds, "mutual exclusion");
    o.require(clh::check_index_monotone(*r.res, r.cfg.n).holds, "queue index increased");
    return o;
}

Outcome status_prev()
{
    Outcome o;
    ClhRun& r = annotated_run();
    CheckOptions filtered;
    filtered.filter = r.spec.inv;
    for (int i = 1; i <= r.cfg.n; ++i) {
        Expr pre = ex::and_({r.spec.inv, ex::mem(clh::tid(i), clh::q())});
        Verdict v = implies_pred(pre, clh::status_prev(i), r.u, filtered);
        o.require(v.holds && v.mode == CheckMode::Filtered, "implication for " + thread_name(i - 1));
    }
    o.require(check_global_invariant(*r.res, clh::status_prev_all(r.cfg.n)).holds, "reachable states");
    return o;
}

Outcome reorder_goldens()
{
    Outcome o;
    MemoryModel m = MemoryModel::arm_like();
    struct G {
        const char* input;
        const char* table;
        std::vector<std::string> verdicts;
    };
    std::vector<G> gs = {{"acquire.sexpr", "reorder_acquire.txt", {"ordered", "reorderable", "ordered", "reorderable"}},
                         {"release.sexpr", "reorder_release.txt", {"ordered"}},
                         {"release_then_acquire.sexpr", "reorder_release_then_acquire.txt", {"ordered"}}};
    for (const auto& g : gs) {
        ReorderReport r = pairwise_report(parse_command(slurp(data_path(g.input))), m);
        o.require(r.verdicts() == g.verdicts, std::string(g.input) + " verdicts");
        o.require(report::reorder_table(r) == slurp(golden_path(g.table)), std::string(g.input) + " table");
    }
    return o;
}

Outcome acquire_under_arm()
{
    Outcome o;
    Command in = parse_command(slurp(data_path("acquire_release.sexpr")));
    std::string out = to_sexpr(strip_ordering(transform(in, MemoryModel::arm_like())));
    o.require(out == trimmed(slurp(golden_path("transform_acquire_release.sexpr"))), "differs from golden");
    o.require(out == to_sexpr(clh::acquire_par(1)), "differs from the parallel acquire");
    return o;
}

Outcome par_sel4()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    clh::ClhConfig cfg;
    Universe u = clh::universe(cfg);
    Derivation d = clh::par_sel4_derivation(cfg, 1);
    SemanticVerdict v = check_quintuple_semantic(d.concl, u);
    o.require(v.holds && v.complete, "parallel tail");
    Command seq_tail = cmd::seq(clh::link_next(1), clh::await_granted(1));
    o.require(check_transform_equiv(d.concl, seq_tail, d.concl.c, u).holds(), "sequential and parallel differ");
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < 60, "took " + std::to_string(s) + "s");
    return o;
}

Outcome bug_reproduction()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    clh::ClhConfig cfg;
    cfg.variant = clh::Variant::Buggy;
    Universe u = clh::universe(cfg);
    ExploreResult res = clh::explore_clh(cfg, u);
    SemanticVerdict v = check_global_invariant(res, clh::queued_pending());
    o.require(!v.holds, "no violation in the buggy variant");
    if (!v.holds) {
        try {
            Config end = replay(res, v.violation->trace);
            o.require(!Compiled(u, clh::queued_pending()).holds(end.state), "replay does not end in a violation");
        } catch (const BrokenTrace& e) {
            o.require(false, std::string("replay failed: ") + e.what());
        }
        // breadth-first order makes the first violating config a shallowest one
        std::size_t len = v.violation->trace.steps.size();
        Compiled qp(u, clh::queued_pending());
        for (std::size_t i = 0; i < res.config_count(); ++i) {
            if (!qp.holds(res.state(i)) && res.trace_to(i).steps.size() < len) {
                o.require(false, "shorter violation exists");
                break;
            }
        }
        o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(len) + "-step trace";
    }
    clh::ClhConfig hw;
    hw.variant = clh::Variant::Hw;
    Universe uh = clh::universe(hw);
    ExploreResult rh = clh::explore_clh(hw, uh);
    o.require(rh.complete && check_global_invariant(rh, clh::queued_pending()).holds, "release-annotated variant violates");
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(s < 300, "took " + std::to_string(s) + "s");
    return o;
}

Outcome cross_validation()
{
    Outcome o;
    std::size_t checked = 0;
    auto verify = [&](const Derivation& d, const Universe& u, const CheckOptions& opts, const std::string& name) {
        if (!check_derivation(d, u, opts).holds()) return;
        std::vector<Quintuple> qs;
        collect_quintuples(d, qs);
        for (std::size_t k = 0; k < qs.size(); ++k) {
            SemanticVerdict v = check_quintuple_semantic(qs[k], u);
            o.require(v.holds && v.complete, name + " quintuple " + std::to_string(k));
            ++checked;
        }
    };
    UniverseSpec tb = parse_universe_json(slurp(data_path("int_x.json")));
    verify(parse_derivation(slurp(data_path("textbook.deriv"))), tb.universe, tb.options, "textbook");
    UniverseSpec rs = parse_universe_json(slurp(data_path("rules/universe.json")));
    for (const char* f : kRuleFiles) {
        for (const char* kind : {"_pass", "_fail"}) {
            std::string file = std::string("rules/") + f + kind + ".deriv";
            verify(parse_derivation(slurp(data_path(file))), rs.universe, rs.options, file);
        }
    }
    clh::ClhConfig cfg;
    Universe u = clh::universe(cfg);
    for (const auto& [name, d] : clh::theorem_derivations(cfg)) verify(d, u, clh::check_options(cfg), name);
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(checked) + " quintuples";
    return o;
}

}  // namespace

int main()
{
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"textbook assignment derivation", textbook},
        {"seven rules pass and fail", rule_suite},
        {"CLH safety at N=2, rounds=2", clh_safety},
        {"mutual exclusion and queue order", mutex_fifo},
        {"status of prev under the invariant", status_prev},
        {"pairwise reordering goldens", reorder_goldens},
        {"release-annotated acquire transforms to the parallel tail", acquire_under_arm},
        {"parallel tail quintuple and transform equivalence", par_sel4},
        {"reordered swap reproduces the bug", bug_reproduction},
        {"derivations agree with exploration", cross_validation},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu: %s  %s (%.2fs)%s%s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, s,
                    o.detail.empty() ? "" : "  ", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
