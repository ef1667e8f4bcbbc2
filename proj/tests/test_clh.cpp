#include <rgclh/clh.hpp>

#include <json.hpp>

#include <gtest/gtest.h>

#include <fstream>

using namespace rgclh;
using clh::ClhConfig;
using clh::Variant;

namespace {

nlohmann::json oracle()
{
    std::ifstream in(std::string(RGCLH_GOLDEN) + "/oracle.json");
    return nlohmann::json::parse(in);
}

ClhConfig config(Variant v, int rounds = 2)
{
    ClhConfig c;
    c.variant = v;
    c.rounds = rounds;
    return c;
}

// depth of the first reachable config that violates `p`
std::optional<std::size_t> first_violation(const ExploreResult& res, const Expr& p)
{
    SemanticVerdict v = check_global_invariant(res, p);
    if (v.holds) return std::nullopt;
    return v.violation->trace.steps.size();
}

}  // namespace

TEST(Config, Validation)
{
    ClhConfig c;
    c.n = 0;
    EXPECT_THROW(c.validate(), clh::InvalidConfig);
    c.n = 5;
    EXPECT_THROW(c.validate(), clh::InvalidConfig);
    c.n = 2;
    c.rounds = 0;
    EXPECT_THROW(c.validate(), clh::InvalidConfig);
    EXPECT_THROW(clh::parse_variant("relaxed"), clh::InvalidConfig);
    EXPECT_EQ(clh::parse_variant("fenced-usage"), Variant::FencedUsage);
    c.n = 3;
    c.rounds = 1;
    EXPECT_TRUE(clh::check_options(c).filter != nullptr);
    c.n = 2;
    EXPECT_TRUE(clh::check_options(c).filter == nullptr);
}

TEST(Config, TheoremsNeedTheAnnotatedVariant)
{
    EXPECT_THROW(clh::theorem_derivations(config(Variant::Hw)), clh::InvalidConfig);
}

TEST(Oracle, ReachableStatesMatchIndependentModel)
{
    auto o = oracle();
    for (auto [v, name] : {std::pair{Variant::Annotated, "annotated"}, {Variant::Hw, "hw"}, {Variant::Buggy, "buggy"}}) {
        for (int rounds : {1, 2}) {
            ClhConfig cfg = config(v, rounds);
            Universe u = clh::universe(cfg);
            ExploreResult res = clh::explore_clh(cfg, u);
            const auto& ref = o.at(std::string(name) + "_r" + std::to_string(rounds));
            std::string tag = std::string(name) + " rounds=" + std::to_string(rounds);
            EXPECT_TRUE(res.complete) << tag;
            EXPECT_EQ(res.stats.states, ref.at("states").get<std::size_t>()) << tag;
            EXPECT_EQ(res.stats.terminals, ref.at("terminals").get<std::size_t>()) << tag;
            // the annotated program keeps an assert ahead of each await, so a failed
            // test leaves a distinct control point; configs only line up without asserts
            if (v != Variant::Annotated) {
                EXPECT_EQ(res.stats.configs, ref.at("configs").get<std::size_t>()) << tag;
            }
            const auto& first = ref.at("first_violation_depth");
            auto inv = first_violation(res, clh::invariant());
            auto qp = first_violation(res, clh::queued_pending());
            EXPECT_EQ(inv.has_value(), first.contains("invariant")) << tag;
            EXPECT_EQ(qp.has_value(), first.contains("queued_pending")) << tag;
            if (qp) EXPECT_EQ(*qp, first.at("queued_pending").get<std::size_t>()) << tag;
            if (inv) EXPECT_EQ(*inv, first.at("invariant").get<std::size_t>()) << tag;
            SemanticVerdict mx = clh::check_mutual_exclusion(res);
            EXPECT_EQ(!mx.holds, first.contains("mutual_exclusion")) << tag;
            if (!mx.holds) {
                EXPECT_EQ(mx.violation->trace.steps.size(), first.at("mutual_exclusion").get<std::size_t>()) << tag;
            }
        }
    }
}

TEST(Annotated, AllAssertionsAndTerminalsHold)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    ExploreResult res = clh::explore_clh(cfg, u);
    EXPECT_TRUE(exploration_verdict(res).holds);
    EXPECT_TRUE(clh::check_terminals(res, cfg.n).holds);
    EXPECT_TRUE(check_global_invariant(res, clh::invariant()).holds);
    EXPECT_TRUE(check_global_invariant(res, clh::status_prev_all(cfg.n)).holds);
    EXPECT_TRUE(clh::check_thread_guarantees(res, clh::spec(cfg)).holds);
    EXPECT_TRUE(clh::check_index_monotone(res, cfg.n).holds);
    EXPECT_TRUE(clh::check_mutual_exclusion(res).holds);
}

TEST(Annotated, SingleThreadSingleRound)
{
    ClhConfig cfg;
    cfg.n = 1;
    cfg.rounds = 1;
    Universe u = clh::universe(cfg);
    ExploreResult res = clh::explore_clh(cfg, u);
    EXPECT_TRUE(exploration_verdict(res).holds);
    EXPECT_TRUE(clh::check_terminals(res, 1).holds);
    EXPECT_EQ(res.terminals().size(), 1u);
}

TEST(Spec, StatusPrevUnderInvariant)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    CheckOptions filtered;
    filtered.filter = clh::invariant();
    for (int i = 1; i <= 2; ++i) {
        Expr pre = ex::and_({clh::invariant(), ex::mem(clh::tid(i), clh::q())});
        Verdict v = implies_pred(pre, clh::status_prev(i), u, filtered);
        EXPECT_TRUE(v.holds);
        EXPECT_EQ(v.mode, CheckMode::Filtered);
        // without the invariant the property is false
        EXPECT_FALSE(implies_pred(ex::mem(clh::tid(i), clh::q()), clh::status_prev(i), u).holds);
    }
}

TEST(Spec, RelyAndGuaranteeFitTogether)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    clh::ClhSpec s = clh::spec(cfg);
    EXPECT_TRUE(implies_rel(s.guar_of(1), s.rely_of(2), u).holds);
    EXPECT_TRUE(implies_rel(s.guar_of(2), s.rely_of(1), u).holds);
    EXPECT_TRUE(implies_rel(ex::id_all(), s.rely_of(1), u).holds);
    EXPECT_FALSE(implies_rel(s.rely_of(1), s.guar_of(1), u).holds);
}

TEST(Spec, LadderStepsAreStableUnderRely)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    clh::ClhSpec s = clh::spec(cfg);
    const clh::Ladder& l = s.ladders[0];
    for (const Expr& p : {l.idle, l.pending, l.enqueued, l.linked, l.holding, l.released}) {
        EXPECT_TRUE(stable(ex::and_({p, s.inv}), ex::and_({s.rely_of(1), clh::preservation()}), u).holds)
            << to_sexpr(p);
    }
}

TEST(Spec, LocalsFrameIsNeeded)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    clh::ClhSpec s = clh::spec(cfg);
    Expr without = ex::and_({clh::contract(1), clh::preservation()});
    EXPECT_FALSE(stable(ex::and_({s.ladders[0].linked, s.inv}), without, u).holds);
}

TEST(Spec, GenericLockProperties)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    clh::LockProps p = clh::check_generic_lock_properties(clh::spec(cfg), u);
    EXPECT_EQ(p.checks.size(), 6u);
    EXPECT_TRUE(p.holds());
}

TEST(Theorems, DerivationsCheck)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    auto ths = clh::theorem_derivations(cfg);
    ASSERT_EQ(ths.size(), 4u);
    for (const auto& [name, d] : ths) {
        CheckReport r = check_derivation(d, u, clh::check_options(cfg));
        EXPECT_TRUE(r.holds()) << name << ": " << (r.first_failure() ? r.first_failure()->name : "");
        EXPECT_EQ(r.mode, CheckMode::Full);
    }
}

TEST(Theorems, SwapFromIdleDoesNotEnqueue)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    clh::ClhSpec s = clh::spec(cfg);
    const clh::Ladder& l = s.ladders[0];
    Quintuple bad{ex::and_({l.idle, s.inv}), s.rely_of(1), clh::swap_annotated(1),
                  ex::or_({s.guar_of(1), ex::id_all()}), ex::and_({l.enqueued, s.inv})};
    EXPECT_FALSE(check_asgn(bad, u).holds());
}

TEST(Theorems, ParallelTailSatisfiesTheSequentialQuintuple)
{
    ClhConfig cfg;
    Universe u = clh::universe(cfg);
    Derivation d = clh::par_sel4_derivation(cfg, 1);
    EXPECT_TRUE(check_derivation(d, u).holds());
    SemanticVerdict v = check_quintuple_semantic(d.concl, u);
    EXPECT_TRUE(v.holds && v.complete);
    Command seq_tail = cmd::seq(clh::link_next(1), clh::await_granted(1));
    TransformEquivVerdict eq = check_transform_equiv(d.concl, seq_tail, d.concl.c, u);
    EXPECT_TRUE(eq.holds());
}

TEST(Buggy, ViolationTraceReplays)
{
    ClhConfig cfg = config(Variant::Buggy);
    Universe u = clh::universe(cfg);
    ExploreResult res = clh::explore_clh(cfg, u);
    SemanticVerdict v = check_global_invariant(res, clh::queued_pending());
    ASSERT_FALSE(v.holds);
    Config end = replay(res, v.violation->trace);
    Compiled qp(u, clh::queued_pending());
    EXPECT_FALSE(qp.holds(end.state));
    // the trace uses the reordered swap: within a round, c runs before b
    bool swapped_first = false;
    std::set<int> stored;
    for (const auto& st : v.violation->trace.steps) {
        if (st.label == "reset") stored.erase(st.actor);
        if (st.label == "b") stored.insert(st.actor);
        if (st.label == "c" && !stored.count(st.actor)) swapped_first = true;
    }
    EXPECT_TRUE(swapped_first);
}

TEST(Hw, ReleaseAnnotationRestoresSafety)
{
    for (Variant v : {Variant::Hw, Variant::FencedUsage}) {
        ClhConfig cfg = config(v);
        Universe u = clh::universe(cfg);
        ExploreResult res = clh::explore_clh(cfg, u);
        EXPECT_TRUE(check_global_invariant(res, clh::queued_pending()).holds);
        EXPECT_TRUE(check_global_invariant(res, clh::invariant()).holds);
        EXPECT_TRUE(clh::check_mutual_exclusion(res).holds);
        EXPECT_TRUE(clh::check_terminals(res, cfg.n).holds);
    }
}
