#pragma once

#include <rgclh/explorer.hpp>
#include <rgclh/rg.hpp>
#include <rgclh/wmm.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace rgclh::report {

using json = nlohmann::ordered_json;

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json state_json(const Universe& u, const State& s)
{
    json j = json::object();
    for (std::size_t k = 0; k < u.size(); ++k) j[u.var(k).name] = to_string(value_of(u, s, static_cast<int>(k)));
    return j;
}

/// Only the variables that change are listed for each step.
inline json trace_json(const Universe& u, const Trace& t, const std::vector<std::string>& actors)
{
    json steps = json::array();
    for (const auto& st : t.steps) {
        json changes = json::object();
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (st.pre[k] != st.post[k]) changes[u.var(k).name] = to_string(value_of(u, st.post, static_cast<int>(k)));
        }
        std::string who = st.actor == kEnvActor ? "env"
                          : st.actor >= 0 && static_cast<std::size_t>(st.actor) < actors.size()
                              ? actors[static_cast<std::size_t>(st.actor)]
                              : std::to_string(st.actor);
        steps.push_back({{"actor", who}, {"label", st.label}, {"changes", changes}});
    }
    return {{"initial", state_json(u, t.initial)}, {"steps", steps}, {"length", t.steps.size()}};
}

inline std::vector<std::string> actor_names(const ExploreResult& res)
{
    std::vector<std::string> out;
    for (std::size_t a = 0; a < res.machine().actor_count(); ++a) out.push_back(res.machine().actor_name(static_cast<int>(a)));
    return out;
}

inline json verdict_json(const std::string& name, const Verdict& v, const Universe& u)
{
    json j = {{"name", name}, {"kind", "implication"}, {"holds", v.holds}, {"mode", mode_name(v.mode)}};
    if (!v.holds) {
        json c = {{"failed", v.failed}};
        if (v.state) c["pre"] = state_json(u, *v.state);
        if (v.post) c["post"] = state_json(u, *v.post);
        j["counterexample"] = c;
    }
    j["search"] = {{"syntactic", v.syntactic}, {"enumerated", v.enumerated}, {"nodes", v.nodes}};
    return j;
}

inline json stats_json(const ExploreStats& s)
{
    return {{"configs", s.configs},     {"states", s.states},       {"transitions", s.transitions},
            {"env_transitions", s.env_transitions}, {"terminals", s.terminals}};
}

inline json semantic_json(const std::string& name, const SemanticVerdict& v, const Universe& u,
                          const std::vector<std::string>& actors)
{
    json j = {{"name", name}, {"kind", "exploration"}, {"holds", v.holds}, {"complete", v.complete},
              {"stats", stats_json(v.stats)}};
    if (v.violation) {
        j["violation"] = {{"kind", v.violation->kind},
                          {"message", v.violation->message},
                          {"trace", trace_json(u, v.violation->trace, actors)}};
    }
    return j;
}

inline json check_report_json(const std::string& name, const CheckReport& r, const Universe& u)
{
    json conds = json::array();
    for (const auto& c : r.conditions) {
        json j = {{"path", c.path}, {"rule", c.rule}, {"name", c.name}, {"shape", c.shape}, {"holds", c.holds}};
        if (!c.holds) {
            j["note"] = c.note;
            if (c.verdict.state) j["pre"] = state_json(u, *c.verdict.state);
            if (c.verdict.post) j["post"] = state_json(u, *c.verdict.post);
        }
        conds.push_back(j);
    }
    json j = {{"name", name}, {"kind", "derivation"}, {"holds", r.holds()}, {"mode", mode_name(r.mode)},
              {"conditions", conds}};
    if (const Condition* f = r.first_failure()) j["first_failure"] = {{"path", f->path}, {"rule", f->rule}, {"name", f->name}};
    return j;
}

inline json reorder_json(const ReorderReport& r)
{
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back({{"first", p.first},
                         {"second", p.second},
                         {"verdict", p.reorderable ? "reorderable" : "ordered"},
                         {"reason", p.reason}});
    }
    return {{"model", r.model}, {"pairs", pairs}};
}

inline std::string reorder_table(const ReorderReport& r)
{
    std::string out;
    for (const auto& p : r.pairs) {
        out += p.first + " -> " + p.second + "  " + (p.reorderable ? "reorderable" : "ordered") + "  (" + p.reason + ")\n";
    }
    return out;
}

/// The report every verb writes. `timing` is kept apart so that the rest is
/// byte-identical across runs.
struct RunReport {
    std::string verb;
    json args = json::object();
    std::string input;  // canonical text the digest is taken over
    json verdicts = json::array();
    json extra = json::object();
    double seconds = 0;
    int exit_code = 0;

    bool holds() const
    {
        for (const auto& v : verdicts) {
            if (!v.value("holds", false)) return false;
        }
        return true;
    }

    json to_json() const
    {
        json j = {{"tool", "rgclh"},       {"verb", verb},        {"args", args},
                  {"digest", fnv1a(verb + "\n" + args.dump() + "\n" + input)},
                  {"holds", exit_code != 2 && holds()}, {"exit_code", exit_code}, {"verdicts", verdicts}};
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        j["timing"] = {{"seconds", seconds}};
        return j;
    }
};

}  // namespace rgclh::report
