#pragma once

#include <rgclh/check.hpp>
#include <rgclh/clh.hpp>
#include <rgclh/expr.hpp>
#include <rgclh/universe.hpp>

#include <json.hpp>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rgclh {

class UniverseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A universe file and the enumeration options it requests.
struct UniverseSpec {
    Universe universe;
    CheckOptions options;
};

namespace detail {

inline Domain parse_domain(const std::string& s, int threads, int nodes)
{
    if (s == "bool") return Domain::booleans();
    if (s == "thread") return Domain::threads(threads);
    if (s == "node") return Domain::nodes(nodes, false);
    if (s == "node?") return Domain::nodes(nodes, true);
    if (s == "status") return Domain::statuses();
    if (s == "lock") return Domain::locks(threads);
    int lo = 0, hi = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "int[%d..%d%c", &lo, &hi, &tail) == 3 && tail == ']' && lo <= hi) {
        if (hi - lo >= 65535) throw UniverseError("int range too wide: " + s);
        return Domain::ints(lo, hi);
    }
    int len = 0;
    if (std::sscanf(s.c_str(), "seq[%d%c", &len, &tail) == 2 && tail == ']' && len >= 0 && len <= 8) {
        return Domain::thread_seqs(threads, len);
    }
    throw UniverseError("unknown domain '" + s + "'");
}

}  // namespace detail

/// Either
///   {"threads": T, "nodes": K, "vars": {name: domain}, "arrays": {name: {"index": "threads"|"nodes", "domain": d}},
///    "filter": "<predicate>"}
/// or {"clh": {"N": 2, "rounds": 2, "variant": "annotated"}}.
/// Domains: bool, int[lo..hi], thread, node, node?, status, lock, seq[len].
inline UniverseSpec universe_from_json(const nlohmann::json& j)
{
    try {
        if (j.contains("clh")) {
            const auto& c = j.at("clh");
            clh::ClhConfig cfg;
            cfg.n = c.value("N", 2);
            cfg.rounds = c.value("rounds", 2);
            cfg.variant = clh::parse_variant(c.value("variant", std::string("annotated")));
            cfg.validate();
            return {clh::universe(cfg), clh::check_options(cfg)};
        }
        int threads = j.value("threads", 0);
        int nodes = j.value("nodes", 0);
        if (threads < 0 || threads > 8 || nodes < 0 || nodes > 16) throw UniverseError("thread or node count out of range");
        Universe::Builder b(threads, nodes);
        if (j.contains("vars")) {
            for (const auto& [name, d] : j.at("vars").items()) b.scalar(name, detail::parse_domain(d.get<std::string>(), threads, nodes));
        }
        if (j.contains("arrays")) {
            for (const auto& [name, a] : j.at("arrays").items()) {
                std::string idx = a.at("index").get<std::string>();
                if (idx != "threads" && idx != "nodes") throw UniverseError("array index must be threads or nodes");
                b.array(name, idx == "threads" ? IndexKind::Threads : IndexKind::Nodes,
                        detail::parse_domain(a.at("domain").get<std::string>(), threads, nodes));
            }
        }
        UniverseSpec out{b.build(), {}};
        if (j.contains("filter")) out.options.filter = parse_expr(j.at("filter").get<std::string>());
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw UniverseError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UniverseError(e.what());
    }
}

inline UniverseSpec parse_universe_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UniverseError(e.what());
    }
    return universe_from_json(j);
}

}  // namespace rgclh
