#pragma once

#include <rgclh/command.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace rgclh {

class NotLinear : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotTransformable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which ordering constraints a model honours beyond same-location order.
struct MemoryModel {
    std::string name;
    bool fences_order_all = true;
    bool release_orders_earlier = true;

    static MemoryModel arm_like() { return {"arm-like", true, true}; }
};

inline MemoryModel memory_model(const std::string& name)
{
    if (name == "arm-like") return MemoryModel::arm_like();
    throw std::invalid_argument("unknown memory model " + name);
}

struct ReorderVerdict {
    bool reorderable = false;
    std::string reason;
};

namespace detail {

inline bool is_fence(const Command& c) { return c->kind == CmdKind::Instr && c->instr.kind == InstrKind::Fence; }
inline bool is_release(const Command& c) { return c->kind == CmdKind::Instr && c->instr.release; }

inline std::string shared_locations(const Footprint& a, const Footprint& b)
{
    std::set<std::string> out;
    auto scan = [&](const std::set<std::string>& xs, const std::set<std::string>& ys) {
        for (const auto& x : xs) {
            for (const auto& y : ys) {
                if (may_alias(x, y)) out.insert(x.size() >= y.size() ? x : y);
            }
        }
    };
    scan(a.writes, b.reads);
    scan(a.writes, b.writes);
    scan(a.reads, b.writes);
    std::string s;
    for (const auto& x : out) s += (s.empty() ? "" : " ") + x;
    return s;
}

}  // namespace detail

/// Whether b, program-order after a, may be executed before it. Loops and
/// awaits take part through the footprint of their guard.
inline ReorderVerdict reorders(const Command& a, const Command& b, const MemoryModel& m)
{
    if (m.fences_order_all && (detail::is_fence(a) || detail::is_fence(b))) {
        return {false, "fence"};
    }
    Footprint fa = footprint(a);
    Footprint fb = footprint(b);
    if (conflicts(fa, fb)) {
        return {false, "shared " + detail::shared_locations(fa, fb)};
    }
    if (m.release_orders_earlier && detail::is_release(b)) {
        return {false, "release"};
    }
    return {true, "independent"};
}

inline ReorderVerdict reorders(const Instr& a, const Instr& b, const MemoryModel& m)
{
    return reorders(cmd::instr(a), cmd::instr(b), m);
}

struct ReorderPair {
    std::string first;
    std::string second;
    bool reorderable = false;
    std::string reason;
};

struct ReorderReport {
    std::string model;
    std::vector<ReorderPair> pairs;

    std::vector<std::string> verdicts() const
    {
        std::vector<std::string> v;
        for (const auto& p : pairs) v.push_back(p.reorderable ? "reorderable" : "ordered");
        return v;
    }
};

inline std::string element_label(const Command& c)
{
    if (c->kind == CmdKind::Instr) {
        std::string l = instr_label(c->instr);
        return l.empty() ? to_sexpr(c) : l;
    }
    if (c->kind == CmdKind::Spin && !c->label.empty()) return c->label;
    return to_sexpr(c);
}

/// The elements of a linear ppseq chain: instructions and loops.
inline std::vector<Command> linear_elements(const Command& c, const MemoryModel& m)
{
    std::vector<Command> xs;
    if (c->kind == CmdKind::PPSeq) {
        if (c->model != m.name) throw NotLinear("chain is tagged " + c->model + ", not " + m.name);
        flatten(c, CmdKind::PPSeq, xs, c->model);
    } else {
        xs.push_back(c);
    }
    for (const auto& x : xs) {
        if (x->kind != CmdKind::Instr && x->kind != CmdKind::Spin && x->kind != CmdKind::While) {
            throw NotLinear("not an instruction or loop: " + to_sexpr(x));
        }
    }
    return xs;
}

inline ReorderReport pairwise_report(const Command& c, const MemoryModel& m)
{
    ReorderReport r{m.name, {}};
    auto xs = linear_elements(c, m);
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        ReorderVerdict v = reorders(xs[k], xs[k + 1], m);
        r.pairs.push_back({element_label(xs[k]), element_label(xs[k + 1]), v.reorderable, v.reason});
    }
    return r;
}

namespace detail {

inline Command transform_chain(const std::vector<Command>& xs, const MemoryModel& m)
{
    for (const auto& x : xs) {
        if (x->kind == CmdKind::While) throw NotTransformable("loop under parallelized sequential composition: " + to_sexpr(x));
        if (x->kind != CmdKind::Instr && x->kind != CmdKind::Spin) {
            throw NotTransformable("non-linear element under parallelized sequential composition: " + to_sexpr(x));
        }
    }
    std::vector<Command> out;
    std::vector<Command> seg;
    auto flush_segment = [&]() {
        std::size_t k = 0;
        while (k < seg.size()) {
            std::size_t j = k;
            while (j + 1 < seg.size() && reorders(seg[j], seg[j + 1], m).reorderable) ++j;
            if (j == k) {
                out.push_back(seg[k]);
            } else {
                for (std::size_t x = k; x <= j; ++x) {
                    for (std::size_t y = x + 1; y <= j; ++y) {
                        if (!reorders(seg[x], seg[y], m).reorderable) {
                            throw NotTransformable("run " + element_label(seg[k]) + ".." + element_label(seg[j]) +
                                                   " is not pairwise reorderable");
                        }
                    }
                }
                Command acc = seg[j];
                for (std::size_t x = j; x-- > k;) acc = cmd::par(seg[x], acc);
                out.push_back(acc);
            }
            k = j + 1;
        }
        seg.clear();
    };
    for (const auto& x : xs) {
        if (is_fence(x) && m.fences_order_all) {
            flush_segment();
        } else {
            seg.push_back(x);
        }
    }
    flush_segment();
    return cmd::seq(std::move(out));
}

}  // namespace detail

/// Resolves every ppseq: ordered neighbours become sequential, reorderable
/// runs parallel, and fences are erased after splitting the chain.
inline Command transform(const Command& c, const MemoryModel& m)
{
    switch (c->kind) {
    case CmdKind::PPSeq: {
        if (c->model != m.name) throw NotTransformable("chain is tagged " + c->model + ", not " + m.name);
        std::vector<Command> xs;
        flatten(c, CmdKind::PPSeq, xs, c->model);
        return detail::transform_chain(xs, m);
    }
    case CmdKind::Seq:
    case CmdKind::Par:
    case CmdKind::ParN:
    case CmdKind::While: {
        CommandNode n = *c;
        for (auto& k : n.kids) k = transform(k, m);
        return cmd::make(std::move(n));
    }
    default: return c;
    }
}

/// Drops release annotations and fences (fences in seq become skip-free).
inline Command strip_ordering(const Command& c)
{
    switch (c->kind) {
    case CmdKind::Instr: {
        if (!c->instr.release) return c;
        Instr i = c->instr;
        i.release = false;
        return cmd::instr(std::move(i));
    }
    case CmdKind::Seq:
    case CmdKind::PPSeq: {
        std::vector<Command> xs;
        flatten(c, c->kind, xs, c->model);
        std::vector<Command> kept;
        for (const auto& x : xs) {
            if (!detail::is_fence(x)) kept.push_back(strip_ordering(x));
        }
        return cmd::chain(c->kind, std::move(kept), c->model);
    }
    case CmdKind::Par:
    case CmdKind::ParN:
    case CmdKind::While: {
        CommandNode n = *c;
        for (auto& k : n.kids) k = strip_ordering(k);
        return cmd::make(std::move(n));
    }
    default: return c;
    }
}

}  // namespace rgclh
