#pragma once

#include <rgclh/explorer.hpp>
#include <rgclh/rg.hpp>
#include <rgclh/wmm.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgclh::clh {

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Variant { Annotated, Hw, Buggy, FencedUsage };

inline const char* variant_name(Variant v)
{
    switch (v) {
    case Variant::Annotated: return "annotated";
    case Variant::Hw: return "hw";
    case Variant::Buggy: return "buggy";
    case Variant::FencedUsage: return "fenced-usage";
    }
    return "?";
}

inline Variant parse_variant(const std::string& s)
{
    for (Variant v : {Variant::Annotated, Variant::Hw, Variant::Buggy, Variant::FencedUsage}) {
        if (s == variant_name(v)) return v;
    }
    throw InvalidConfig("unknown variant '" + s + "'");
}

struct ClhConfig {
    int n = 2;
    int rounds = 2;
    Variant variant = Variant::Annotated;

    void validate() const
    {
        if (n < 1) throw InvalidConfig("N must be at least 1");
        if (n > 4) throw InvalidConfig("N above 4 is not supported");
        if (rounds < 1) throw InvalidConfig("rounds must be at least 1");
    }
    bool has_register() const { return variant != Variant::Annotated; }
};

// ---------------------------------------------------------------------------
// Variables

inline Expr tid(int i) { return ex::thread(i); }
inline Expr q() { return ex::var("q"); }
inline Expr q_post() { return ex::pvar("q"); }
inline Expr tail() { return ex::var("tail"); }
inline Expr auxhead() { return ex::var("auxhead"); }
inline Expr cur(int i) { return ex::at("cur", tid(i)); }
inline Expr next(int i) { return ex::at("next", tid(i)); }
inline Expr prev(int i) { return ex::at("prev", tid(i)); }
inline Expr reserved(int i) { return ex::at("reserved", tid(i)); }
inline Expr reg(int i) { return ex::at("r", tid(i)); }

inline Universe universe(const ClhConfig& cfg)
{
    cfg.validate();
    int nodes = cfg.n + 1;
    auto b = Universe::Builder(cfg.n, nodes);
    b.scalar("q", Domain::thread_seqs(cfg.n, cfg.n))
        .scalar("tail", Domain::nodes(nodes, false))
        .scalar("auxhead", Domain::nodes(nodes, false))
        .array("status", IndexKind::Nodes, Domain::statuses())
        .array("cur", IndexKind::Threads, Domain::nodes(nodes, false))
        .array("reserved", IndexKind::Threads, Domain::nodes(nodes, false))
        .array("next", IndexKind::Threads, Domain::nodes(nodes, true))
        .array("prev", IndexKind::Threads, Domain::nodes(nodes, true));
    if (cfg.has_register()) b.array("r", IndexKind::Threads, Domain::nodes(nodes, true));
    return b.build();
}

inline Expr init(const ClhConfig& cfg)
{
    cfg.validate();
    std::vector<Expr> xs = {ex::eq(q(), ex::empty_list()), ex::eq(auxhead(), ex::nodec(0)), ex::eq(tail(), ex::nodec(0)),
                            ex::eq(ex::status(ex::nodec(0)), ex::granted())};
    for (int i = 1; i <= cfg.n; ++i) {
        xs.push_back(ex::eq(ex::status(ex::nodec(i)), ex::pending()));
        xs.push_back(ex::eq(cur(i), ex::nodec(i)));
        xs.push_back(ex::eq(reserved(i), ex::nodec(i)));
        xs.push_back(ex::eq(next(i), ex::bottom()));
        xs.push_back(ex::eq(prev(i), ex::bottom()));
        if (cfg.has_register()) xs.push_back(ex::eq(reg(i), ex::bottom()));
    }
    return ex::and_(xs);
}

// ---------------------------------------------------------------------------
// Specification

inline Expr invariant()
{
    Expr j = ex::bound("j");
    return ex::and_({
        ex::distinct(q()),
        ex::injective("reserved"),
        ex::not_(ex::in_range(auxhead(), "reserved")),
        ex::eq(ex::status(auxhead()), ex::granted()),
        ex::forall("j", IndexKind::Threads,
                   ex::implies(ex::mem(j, q()), ex::eq(ex::status(ex::at("reserved", j)), ex::pending()))),
        ex::eq(ex::cons(auxhead(), ex::fmap("reserved", q())), ex::concat(ex::fmap("prev", q()), ex::list({tail()}))),
    });
}

inline Expr preservation() { return preserves(invariant()); }

inline Expr contract(int i)
{
    Expr t = tid(i);
    return ex::and_({
        ex::id({cur(i), next(i), reserved(i), ex::status(reserved(i))}),
        ex::iff(ex::mem(t, q()), ex::mem(t, q_post())),
        ex::implies(ex::mem(t, q()), ex::le(ex::index_of(q_post(), t), ex::index_of(q(), t))),
    });
}

/// Thread-local variables, which no other thread writes.
inline Expr locals(const ClhConfig& cfg, int i)
{
    std::vector<Expr> xs = {prev(i)};
    if (cfg.has_register()) xs.push_back(reg(i));
    return ex::id(xs);
}

inline Expr rely(const ClhConfig& cfg, int i) { return ex::and_({contract(i), locals(cfg, i), preservation()}); }

inline Expr guar(const ClhConfig& cfg, int i)
{
    std::vector<Expr> xs;
    for (int j = 1; j <= cfg.n; ++j) {
        if (j == i) continue;
        xs.push_back(contract(j));
        xs.push_back(locals(cfg, j));
    }
    xs.push_back(preservation());
    return ex::and_(xs);
}

/// The lock value read off the queue: Free when empty, else held by its head.
inline Expr lock_value(int n)
{
    Expr v = ex::cst(Value::held(n - 1));
    for (int i = n - 1; i >= 1; --i) v = ex::ite(ex::eq(ex::hd(q()), tid(i)), ex::cst(Value::held(i - 1)), v);
    return ex::ite(ex::eq(q(), ex::empty_list()), ex::lock_free(), v);
}

inline Expr coupling(int n) { return ex::eq(ex::var("lock"), lock_value(n)); }

inline Expr lock_held(int n, int i, bool primed = false)
{
    Expr e = ex::eq(lock_value(n), ex::cst(Value::held(i - 1)));
    return primed ? prime(e) : e;
}

inline Expr status_prev(int i)
{
    return ex::implies(ex::mem(tid(i), q()),
                       ex::iff(ex::eq(ex::status(prev(i)), ex::granted()), ex::eq(tid(i), ex::hd(q()))));
}

inline Expr status_prev_all(int n)
{
    std::vector<Expr> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(status_prev(i));
    return ex::and_(xs);
}

/// A thread still queued never moves away from the head.
inline Expr index_monotone(int n)
{
    std::vector<Expr> xs;
    for (int i = 1; i <= n; ++i) {
        Expr t = tid(i);
        xs.push_back(ex::implies(ex::and_({ex::mem(t, q()), ex::mem(t, q_post())}),
                                 ex::le(ex::index_of(q_post(), t), ex::index_of(q(), t))));
    }
    return ex::and_(xs);
}

inline Expr terminal_condition(int n)
{
    std::vector<Expr> xs = {ex::eq(q(), ex::empty_list())};
    for (int i = 1; i <= n; ++i) xs.push_back(ex::eq(cur(i), reserved(i)));
    return ex::and_(xs);
}

/// Program points of acquire and release.
struct Ladder {
    Expr idle;      // before acquire, after release
    Expr pending;   // own node marked Pending
    Expr enqueued;  // after the swap
    Expr linked;    // next = prev
    Expr holding;   // after the await: at the head
    Expr released;  // after the release block
};

inline Ladder ladder(int i)
{
    Expr t = tid(i);
    Expr in_q = ex::mem(t, q());
    Expr out_q = ex::not_(in_q);
    Expr own = ex::eq(cur(i), reserved(i));
    return {ex::and_({out_q, own}),
            ex::and_({out_q, own, ex::eq(ex::status(cur(i)), ex::pending())}),
            ex::and_({in_q, own}),
            ex::and_({in_q, own, ex::eq(next(i), prev(i))}),
            ex::and_({in_q, own, ex::eq(next(i), auxhead()), ex::eq(t, ex::hd(q()))}),
            ex::and_({out_q, ex::eq(next(i), reserved(i))})};
}

// ---------------------------------------------------------------------------
// Programs

namespace detail {

inline Update upd(Expr target, Expr value) { return {{std::move(target)}, {std::move(value)}}; }

inline Command swap_block(int i, const Expr& node, std::string label, bool release)
{
    return cmd::atomic({upd(prev(i), tail()), upd(tail(), node), upd(q(), ex::concat(q(), ex::list({tid(i)})))},
                       std::move(label), release);
}

inline Command release_block(int i, std::string label)
{
    return cmd::atomic({upd(ex::status(cur(i)), ex::granted()), {{auxhead(), reserved(i)}, {reserved(i), auxhead()}},
                        upd(q(), ex::tl(q()))},
                       std::move(label));
}

}  // namespace detail

inline Command reset_prev(int i) { return cmd::assign(prev(i), ex::bottom(), "reset"); }
inline Command set_pending(int i) { return cmd::assign(ex::status(cur(i)), ex::pending(), "pending"); }
inline Command swap_annotated(int i) { return detail::swap_block(i, cur(i), "swap", false); }
inline Command link_next(int i, const std::string& label = "next") { return cmd::assign(next(i), prev(i), label); }
inline Command await_granted(int i, const std::string& label = "await")
{
    return cmd::spin(ex::eq(ex::status(prev(i)), ex::granted()), label);
}
inline Command grant(int i) { return detail::release_block(i, "grant"); }
inline Command restore_cur(int i, const std::string& label = "restore") { return cmd::assign(cur(i), next(i), label); }
inline Command crit() { return cmd::marker("crit", "crit"); }

inline Command acquire_annotated(int i)
{
    Ladder l = ladder(i);
    return cmd::seq({cmd::assert_anno(l.idle), set_pending(i), cmd::assert_anno(l.pending), swap_annotated(i),
                     cmd::assert_anno(l.enqueued), link_next(i), cmd::assert_anno(l.linked), await_granted(i),
                     cmd::assert_anno(l.holding)});
}

inline Command release_annotated(int i)
{
    Ladder l = ladder(i);
    return cmd::seq({cmd::assert_anno(l.holding), grant(i), cmd::assert_anno(l.released), restore_cur(i),
                     cmd::assert_anno(l.idle)});
}

/// a..e of the hardware acquire, with the swap optionally release-ordered.
inline std::vector<Command> acquire_hw_elements(int i, bool release)
{
    return {cmd::assign(reg(i), cur(i), "a"), cmd::assign(ex::status(reg(i)), ex::pending(), "b"),
            detail::swap_block(i, reg(i), "c", release), link_next(i, "d"), await_granted(i, "e")};
}

inline std::vector<Command> release_hw_elements(int i)
{
    return {detail::release_block(i, "f"), restore_cur(i, "g")};
}

inline Command acquire_hw(int i, bool release)
{
    return cmd::ppseq(MemoryModel::arm_like().name, acquire_hw_elements(i, release));
}

inline Command release_hw(int i) { return cmd::ppseq(MemoryModel::arm_like().name, release_hw_elements(i)); }

/// The last instruction of release followed by the first of acquire.
inline Command release_then_acquire(int i)
{
    return cmd::ppseq(MemoryModel::arm_like().name, {release_hw_elements(i).back(), acquire_hw_elements(i, false).front()});
}

/// acquire with the swap ordered and the final two instructions in parallel.
inline Command acquire_par(int i)
{
    auto xs = acquire_hw_elements(i, false);
    return cmd::seq({xs[0], xs[1], xs[2], cmd::par(xs[3], xs[4])});
}

inline Command round_program(const ClhConfig& cfg, int i)
{
    std::string m = MemoryModel::arm_like().name;
    switch (cfg.variant) {
    case Variant::Annotated:
        return cmd::seq({reset_prev(i), acquire_annotated(i), crit(), release_annotated(i)});
    case Variant::Hw:
    case Variant::Buggy:
        return cmd::seq({reset_prev(i), acquire_hw(i, cfg.variant == Variant::Hw), crit(), release_hw(i)});
    case Variant::FencedUsage: {
        auto xs = acquire_hw_elements(i, true);
        xs.push_back(cmd::fence());
        xs.push_back(crit());
        xs.push_back(cmd::fence());
        for (auto& x : release_hw_elements(i)) xs.push_back(x);
        return cmd::seq(reset_prev(i), cmd::ppseq(m, xs));
    }
    }
    return cmd::skip();
}

inline Command thread_program(const ClhConfig& cfg, int i)
{
    std::vector<Command> rs;
    for (int k = 0; k < cfg.rounds; ++k) rs.push_back(round_program(cfg, i));
    return cmd::seq(rs);
}

inline Command program(const ClhConfig& cfg)
{
    cfg.validate();
    std::vector<std::pair<int, Command>> ts;
    for (int i = 1; i <= cfg.n; ++i) ts.emplace_back(i - 1, thread_program(cfg, i));
    return cmd::par_n(std::move(ts));
}

/// The program the explorer runs: every ppseq resolved under arm-like.
inline Command executable(const ClhConfig& cfg) { return transform(program(cfg), MemoryModel::arm_like()); }

struct ClhSpec {
    ClhConfig cfg;
    Expr inv;
    std::vector<Expr> contracts;  // index i-1
    std::vector<Expr> relies;
    std::vector<Expr> guars;
    Expr cinv;
    std::vector<Ladder> ladders;

    const Expr& rely_of(int i) const { return relies.at(static_cast<std::size_t>(i - 1)); }
    const Expr& guar_of(int i) const { return guars.at(static_cast<std::size_t>(i - 1)); }
};

inline ClhSpec spec(const ClhConfig& cfg)
{
    cfg.validate();
    ClhSpec s{cfg, invariant(), {}, {}, {}, coupling(cfg.n), {}};
    for (int i = 1; i <= cfg.n; ++i) {
        s.contracts.push_back(contract(i));
        s.relies.push_back(rely(cfg, i));
        s.guars.push_back(guar(cfg, i));
        s.ladders.push_back(ladder(i));
    }
    return s;
}

struct Built {
    Command program;
    Universe universe;
    Expr init;
    ClhSpec spec;
};

inline Built build(const ClhConfig& cfg)
{
    cfg.validate();
    return {program(cfg), universe(cfg), init(cfg), spec(cfg)};
}

/// Above two threads the universe is too large to sweep; side conditions
/// are then checked over Invariant states only.
inline CheckOptions check_options(const ClhConfig& cfg)
{
    CheckOptions o;
    if (cfg.n > 2) o.filter = invariant();
    return o;
}

// ---------------------------------------------------------------------------
// Theorems

namespace detail {

struct Step {
    Derivation d;
    Expr post;  // without the invariant
};

inline Expr with_inv(const Expr& p) { return ex::and_({p, invariant()}); }

class Prover {
public:
    Prover(const ClhConfig& cfg, int i) : cfg_(cfg), i_(i), r_(rely(cfg, i)), g_(guar(cfg, i)) {}

    Step asgn(const Expr& pre, const Command& c, const Expr& post) const
    {
        Derivation leaf{Rule::Asgn, {with_inv(pre), r_, c, ex::or_({g_, ex::id_all()}), with_inv(post)}, nullptr, {}};
        Derivation d{Rule::Conseq, {with_inv(pre), r_, c, g_, with_inv(post)}, nullptr, {leaf}};
        return {d, post};
    }

    Step spin(const Expr& pre, const Command& c, const Expr& post) const
    {
        return {Derivation{Rule::SpinLoop, {with_inv(pre), r_, c, g_, with_inv(post)}, nullptr, {}}, post};
    }

    /// Joins steps with seq, using each step's postcondition as the mid-state.
    Step chain(const Expr& pre, std::vector<Step> steps, const Command& whole = nullptr) const
    {
        Step acc = steps.back();
        Command acc_cmd = acc.d.concl.c;
        for (std::size_t k = steps.size() - 1; k-- > 0;) {
            acc_cmd = cmd::seq(steps[k].d.concl.c, acc_cmd);
            Expr p = k == 0 ? pre : steps[k - 1].post;
            Derivation d{Rule::Seq, {with_inv(p), r_, acc_cmd, g_, acc.d.concl.q}, with_inv(steps[k].post),
                         {steps[k].d, acc.d}};
            acc = {d, steps.back().post};
        }
        if (whole) acc.d.concl.c = whole;
        return acc;
    }

    Step acquire() const
    {
        Ladder l = ladder(i_);
        return chain(l.idle,
                     {asgn(l.idle, set_pending(i_), l.pending), asgn(l.pending, swap_annotated(i_), l.enqueued),
                      asgn(l.enqueued, link_next(i_), l.linked), spin(l.linked, await_granted(i_), l.holding)},
                     acquire_annotated(i_));
    }

    Step release() const
    {
        Ladder l = ladder(i_);
        return chain(l.holding, {asgn(l.holding, grant(i_), l.released), asgn(l.released, restore_cur(i_), l.idle)},
                     release_annotated(i_));
    }

    Step thread() const
    {
        Ladder l = ladder(i_);
        std::vector<Step> steps;
        for (int k = 0; k < cfg_.rounds; ++k) {
            steps.push_back(asgn(l.idle, reset_prev(i_), l.idle));
            steps.push_back(acquire());
            steps.push_back(asgn(l.holding, crit(), l.holding));
            steps.push_back(release());
        }
        return chain(l.idle, steps, thread_program(cfg_, i_));
    }

    /// next := prev in parallel with the await, from just after the swap.
    Derivation par_sel4() const
    {
        Ladder l = ladder(i_);
        Expr pre = with_inv(l.enqueued);
        Expr at_head = ex::and_({ex::mem(tid(i_), q()), ex::eq(cur(i_), reserved(i_)), ex::eq(tid(i_), ex::hd(q()))});
        Expr g_left0 = ex::and_({g_, ex::id({q(), cur(i_), reserved(i_)})});
        Expr g_left = ex::or_({g_left0, ex::id_all()});
        Expr g_right = ex::id_all();
        Command left_c = link_next(i_);
        Command right_c = await_granted(i_);
        Derivation left{Rule::Asgn, {pre, ex::or_({r_, g_right}), left_c, g_left, with_inv(l.linked)}, nullptr, {}};
        Derivation right{Rule::SpinLoop, {pre, ex::or_({r_, g_left}), right_c, g_right, with_inv(at_head)}, nullptr, {}};
        Command c = cmd::par(left_c, right_c);
        Derivation pu{Rule::ParU,
                      {pre, r_, c, ex::or_({g_left, g_right}), ex::and_({left.concl.q, right.concl.q})},
                      nullptr,
                      {left, right}};
        return Derivation{Rule::Conseq, {pre, r_, c, g_, with_inv(l.holding)}, nullptr, {pu}};
    }

private:
    ClhConfig cfg_;
    int i_;
    Expr r_;
    Expr g_;
};

}  // namespace detail

inline Derivation acquire_derivation(const ClhConfig& cfg, int i) { return detail::Prover(cfg, i).acquire().d; }
inline Derivation release_derivation(const ClhConfig& cfg, int i) { return detail::Prover(cfg, i).release().d; }
inline Derivation thread_derivation(const ClhConfig& cfg, int i) { return detail::Prover(cfg, i).thread().d; }
inline Derivation par_sel4_derivation(const ClhConfig& cfg, int i) { return detail::Prover(cfg, i).par_sel4(); }

/// The whole system from the initial state: par-gen over the threads,
/// then conseq down to the initial state and an empty queue.
inline Derivation system_derivation(const ClhConfig& cfg)
{
    std::vector<Derivation> ts;
    std::vector<Expr> ps, rs, gs, qs;
    for (int i = 1; i <= cfg.n; ++i) {
        ts.push_back(thread_derivation(cfg, i));
        ps.push_back(ts.back().concl.p);
        rs.push_back(ts.back().concl.r);
        gs.push_back(ts.back().concl.g);
        qs.push_back(ts.back().concl.q);
    }
    Command c = program(cfg);
    Derivation pg{Rule::ParGen, {ex::and_(ps), ex::and_(rs), c, ex::or_(gs), ex::and_(qs)}, nullptr, ts};
    Quintuple top{detail::with_inv(init(cfg)), ex::and_(rs), c, ex::or_(gs),
                  detail::with_inv(terminal_condition(cfg.n))};
    return Derivation{Rule::Conseq, top, nullptr, {pg}};
}

inline std::map<std::string, Derivation> theorem_derivations(const ClhConfig& cfg)
{
    if (cfg.variant != Variant::Annotated) throw InvalidConfig("theorems are stated for the annotated variant");
    cfg.validate();
    return {{"acquire", acquire_derivation(cfg, 1)},
            {"release", release_derivation(cfg, 1)},
            {"par-sel4", par_sel4_derivation(cfg, 1)},
            {"locking-system", system_derivation(cfg)}};
}

// ---------------------------------------------------------------------------
// Checks

struct NamedVerdict {
    std::string name;
    Verdict verdict;
};

struct LockProps {
    std::vector<NamedVerdict> checks;
    bool holds() const
    {
        for (const auto& c : checks) {
            if (!c.verdict.holds) return false;
        }
        return true;
    }
};

/// Acquire's postcondition gives the lock to the thread, its rely never takes
/// it away, and its guarantee never takes it from anyone else.
inline LockProps check_generic_lock_properties(const ClhSpec& s, const Universe& u)
{
    LockProps out;
    CheckOptions o = check_options(s.cfg);
    int n = s.cfg.n;
    for (int i = 1; i <= n; ++i) {
        std::string t = thread_name(i - 1);
        out.checks.push_back({"acquire post gives lock to " + t,
                              implies_pred(ex::and_({s.ladders[static_cast<std::size_t>(i - 1)].holding, s.inv}),
                                           lock_held(n, i), u, o)});
        out.checks.push_back({"contract of " + t + " keeps its lock",
                              implies_rel(s.contracts[static_cast<std::size_t>(i - 1)],
                                          ex::implies(lock_held(n, i), lock_held(n, i, true)), u, o)});
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            out.checks.push_back({"guarantee of " + t + " keeps lock of " + thread_name(j - 1),
                                  implies_rel(s.guar_of(i), ex::implies(lock_held(n, j), lock_held(n, j, true)), u, o)});
        }
    }
    return out;
}

/// At most one thread is at its critical section, and it heads the queue.
inline SemanticVerdict check_mutual_exclusion(const ExploreResult& res)
{
    auto& m = res.machine();
    const Universe& u = res.universe();
    Compiled head(u, ex::hd(q()));
    return check_configs(res, [&](std::size_t i) -> std::optional<std::string> {
        std::vector<int> in;
        for (std::size_t a = 0; a < m.actor_count(); ++a) {
            if (m.at_marker(res.continuation(i, a), "crit")) in.push_back(m.actor_thread(a));
        }
        if (in.empty()) return std::nullopt;
        if (in.size() > 1) return "two threads at crit";
        EvalResult h = head.eval_state(res.state(i));
        if (!h.ok || h.value != Value::thread(in[0])) return thread_name(in[0]) + " at crit but not at the head of q";
        return std::nullopt;
    });
}

inline SemanticVerdict check_index_monotone(const ExploreResult& res, int n)
{
    std::map<int, Expr> g;
    for (std::size_t a = 0; a < res.machine().actor_count(); ++a) g[static_cast<int>(a)] = index_monotone(n);
    return check_guarantees(res, g);
}

inline SemanticVerdict check_thread_guarantees(const ExploreResult& res, const ClhSpec& s)
{
    std::map<int, Expr> g;
    for (std::size_t a = 0; a < res.machine().actor_count(); ++a) {
        g[static_cast<int>(a)] = s.guar_of(res.machine().actor_thread(a) + 1);
    }
    return check_guarantees(res, g);
}

inline SemanticVerdict check_terminals(const ExploreResult& res, int n)
{
    Compiled c(res.universe(), terminal_condition(n));
    return check_configs(res, [&](std::size_t i) -> std::optional<std::string> {
        if (!res.is_terminal(i)) return std::nullopt;
        EvalResult r = c.eval_state(res.state(i));
        if (r.ok && r.is_true()) return std::nullopt;
        return "terminal state violates " + to_sexpr(terminal_condition(n));
    });
}

/// The conjunct of the invariant that the reordered swap breaks.
inline Expr queued_pending()
{
    Expr j = ex::bound("j");
    return ex::forall("j", IndexKind::Threads,
                      ex::implies(ex::mem(j, q()), ex::eq(ex::status(ex::at("reserved", j)), ex::pending())));
}

/// `u` must be universe(cfg) and outlive the result.
inline ExploreResult explore_clh(const ClhConfig& cfg, const Universe& u, const Bounds& b = {})
{
    ExploreOptions o;
    o.bounds = b;
    return Explorer(u, executable(cfg)).run(init(cfg), o);
}

}  // namespace rgclh::clh
