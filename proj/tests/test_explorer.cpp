#include <rgclh/explorer.hpp>

#include <gtest/gtest.h>

using namespace rgclh;

namespace {

Universe counters()
{
    return Universe::Builder(2, 0)
        .scalar("x", Domain::ints(0, 3))
        .scalar("y", Domain::ints(0, 3))
        .scalar("q", Domain::thread_seqs(2, 2))
        .build();
}

ExploreResult run(const Universe& u, const char* program, const char* init, ExploreOptions o = {})
{
    return Explorer(u, parse_command(program)).run(parse_expr(init), o);
}

}  // namespace

TEST(Explorer, InterleavingsOfTwoIncrements)
{
    Universe u = counters();
    // non-atomic increments lose an update in some interleaving
    ExploreResult res = run(u,
                            "(parN (t1 (seq (assign y x :label r1) (assign x (+ y 1) :label w1)))"
                            " (t2 (seq (assign y x :label r2) (assign x (+ y 1) :label w2))))",
                            "(and (= x 0) (= y 0) (= q (list)))");
    EXPECT_TRUE(res.complete);
    std::set<int> finals;
    for (auto i : res.terminals()) finals.insert(value_of(u, res.state(i), u.id("x")).i);
    EXPECT_EQ(finals, (std::set<int>{1, 2}));
}

TEST(Explorer, AssertionViolationHasMinimalReplayableTrace)
{
    Universe u = counters();
    ExploreResult res = run(u,
                            "(parN (t1 (seq (assign x 1 :label a) (assign x 2 :label b)))"
                            " (t2 (seq (assign y 1 :label c) (assert (< x 2)))))",
                            "(and (= x 0) (= y 0) (= q (list)))");
    ASSERT_FALSE(res.violations.empty());
    const Violation& v = res.violations.front();
    EXPECT_EQ(v.kind, "assertion");
    EXPECT_EQ(v.trace.steps.size(), 3u);
    Config end = replay(res, v.trace);
    EXPECT_EQ(value_of(u, end.state, u.id("x")), Value::integer(2));
}

TEST(Explorer, TamperedTraceIsRejected)
{
    Universe u = counters();
    ExploreResult res = run(u, "(parN (t1 (seq (assign x 1 :label a) (assert (= x 0)))))", "(= x 0)");
    ASSERT_FALSE(res.violations.empty());
    Trace t = res.violations.front().trace;
    t.steps[0].label = "b";
    EXPECT_THROW(replay(res, t), BrokenTrace);
}

TEST(Explorer, AwaitBlocksUntilEnabled)
{
    Universe u = counters();
    ExploreResult res = run(u,
                            "(parN (t1 (seq (await (= y 1) :label e) (assign x 1 :label a)))"
                            " (t2 (assign y 1 :label c)))",
                            "(and (= x 0) (= y 0) (= q (list)))");
    for (const auto& e : res.edges()) {
        if (res.machine().label(e.label) == "a") {
            EXPECT_EQ(value_of(u, res.state(e.from), u.id("y")), Value::integer(1));
        }
    }
    ASSERT_EQ(res.terminals().size(), 1u);
}

TEST(Explorer, UnguardedIndexIsAViolation)
{
    Universe u = counters();
    ExploreResult res = run(u, "(parN (t1 (assign q (tl q) :label pop)))", "(= q (list))");
    ASSERT_FALSE(res.violations.empty());
    EXPECT_EQ(res.violations.front().kind, "unguarded-index");
}

TEST(Explorer, CeilingMarksResultIncomplete)
{
    Universe u = counters();
    ExploreOptions o;
    o.bounds.max_configs = 3;
    ExploreResult res = run(u, "(parN (t1 (seq (assign x 1) (assign x 2) (assign x 3))))", "(= x 0)", o);
    EXPECT_FALSE(res.complete);
    EXPECT_LE(res.config_count(), 3u);
}

TEST(Explorer, RunsAreDeterministic)
{
    Universe u = counters();
    const char* prog = "(parN (t1 (seq (assign x 1) (assign y x))) (t2 (seq (assign y 2) (assign x y))))";
    ExploreResult a = run(u, prog, "(= q (list))");
    ExploreResult b = run(u, prog, "(= q (list))");
    ASSERT_EQ(a.config_count(), b.config_count());
    for (std::size_t i = 0; i < a.config_count(); ++i) EXPECT_EQ(a.state(i), b.state(i));
}

TEST(Semantic, RelyStepsInterleave)
{
    Universe u = counters();
    Quintuple ok{parse_expr("(= x 0)"), parse_expr("(ID x)"), parse_command("(assign x 1)"),
                 parse_expr("(or (and (= x' 1) (ID y q)) id)"), parse_expr("(= x 1)")};
    EXPECT_TRUE(check_quintuple_semantic(ok, u).holds);
    Quintuple bad = ok;
    bad.r = parse_expr("(<= x x')");
    SemanticVerdict v = check_quintuple_semantic(bad, u);
    ASSERT_FALSE(v.holds);
    EXPECT_EQ(v.violation->kind, "postcondition");
    EXPECT_EQ(v.violation->trace.steps.back().actor, kEnvActor);
}

TEST(Semantic, GuaranteeIsCheckedOnProgramSteps)
{
    Universe u = counters();
    Quintuple q{parse_expr("true"), parse_expr("(ID x y q)"), parse_command("(seq (assign x 1) (assign y 2))"),
                parse_expr("(or (and (= x' 1) (ID y q)) id)"), parse_expr("true")};
    SemanticVerdict v = check_quintuple_semantic(q, u);
    ASSERT_FALSE(v.holds);
    EXPECT_EQ(v.violation->kind, "guarantee");
}

TEST(Semantic, GlobalInvariantAndGuaranteeChecks)
{
    Universe u = counters();
    ExploreResult res = run(u, "(parN (t1 (assign x (+ x 1) :label inc)) (t2 (assign y 1 :label set)))",
                            "(and (= x 0) (= y 0))");
    EXPECT_TRUE(check_global_invariant(res, parse_expr("(<= x 1)")).holds);
    SemanticVerdict inv = check_global_invariant(res, parse_expr("(= x 0)"));
    ASSERT_FALSE(inv.holds);
    EXPECT_EQ(inv.violation->trace.steps.size(), 1u);
    std::map<int, Expr> g{{0, parse_expr("(ID y)")}, {1, parse_expr("(ID x)")}};
    EXPECT_TRUE(check_guarantees(res, g).holds);
    g[1] = parse_expr("(ID y)");
    EXPECT_FALSE(check_guarantees(res, g).holds);
}
