#include <rgclh/check.hpp>
#include <rgclh/clh.hpp>
#include <rgclh/command.hpp>
#include <rgclh/explorer.hpp>

#include <gtest/gtest.h>

using namespace rgclh;

namespace {

Universe heap()
{
    return Universe::Builder(2, 3)
        .scalar("tail", Domain::nodes(3, false))
        .array("status", IndexKind::Nodes, Domain::statuses())
        .array("r", IndexKind::Threads, Domain::nodes(3, true))
        .scalar("q", Domain::thread_seqs(2, 2))
        .build();
}

}  // namespace

TEST(Command, SexprRoundTrip)
{
    for (const char* text : {
             "(seq (assign x 1 :label a) (assign y x :label b))",
             "(ppseq arm-like (assign x 1) (fence) (assign y 2 :release))",
             "(par (await (= x 1) :label e) (assert (= y 0)))",
             "(parN (t1 (assign x 1)) (t2 (marker crit :label crit)))",
             "(while (< x 3) (assign x (+ x 1)))",
             "(atomic (assign (at prev t1) tail) (assign tail (at r t1)) :label c :release)",
             "(atomic (passign (auxhead (at reserved t1)) ((at reserved t1) auxhead)))",
         }) {
        Command c = parse_command(text);
        EXPECT_EQ(to_sexpr(c), text);
        EXPECT_TRUE(structurally_equal(parse_command(to_sexpr(c)), c));
    }
    for (const auto& c : {clh::acquire_annotated(1), clh::release_annotated(2), clh::acquire_hw(1, true)}) {
        EXPECT_EQ(to_sexpr(parse_command(to_sexpr(c))), to_sexpr(c));
    }
}

TEST(Command, ParseErrors)
{
    EXPECT_THROW(parse_command("(jump x)"), ParseError);
    EXPECT_THROW(parse_command("(assign x)"), ParseError);
}

TEST(Command, Footprints)
{
    Footprint f = footprint(parse_command("(assign (at status (at r t1)) Pending)"));
    EXPECT_TRUE(f.reads.count("r[t1]"));
    EXPECT_TRUE(f.writes.count("status[*]"));
    Footprint g = footprint(parse_command("(atomic (assign (at prev t1) tail) (assign tail (at r t1)))"));
    EXPECT_TRUE(g.reads.count("tail"));
    EXPECT_TRUE(g.writes.count("tail"));
    EXPECT_TRUE(g.writes.count("prev[t1]"));
    EXPECT_FALSE(conflicts(f, g));
    EXPECT_TRUE(conflicts(f, footprint(parse_command("(await (= (at status n1) Granted))"))));
    EXPECT_TRUE(footprint(parse_command("(marker crit)")).empty());
}

TEST(Command, ValidateFindsUndeclaredTargets)
{
    Universe u = heap();
    EXPECT_TRUE(validate(parse_command("(assign tail (at r t1))"), u).ok());
    EXPECT_FALSE(validate(parse_command("(assign nowhere 1)"), u).ok());
}

TEST(Command, SimultaneousAssignmentReadsBeforeWriting)
{
    Universe u = Universe::Builder(0, 0).scalar("a", Domain::ints(0, 3)).scalar("b", Domain::ints(0, 3)).build();
    Command c = parse_command("(atomic (passign (a b) (b a)))");
    State s = make_state(u, {{"a", Value::integer(1)}, {"b", Value::integer(2)}});
    auto posts = successors(transition_relation(c->instr, u), s, u);
    ASSERT_EQ(posts.size(), 1u);
    EXPECT_EQ(value_of(u, posts[0], u.id("a")), Value::integer(2));
    EXPECT_EQ(value_of(u, posts[0], u.id("b")), Value::integer(1));
}

// the symbolic relation and the explorer's execution agree on every state
TEST(Command, TransitionRelationMatchesExecution)
{
    Universe u = heap();
    for (const char* text : {"(assign (at status (at r t1)) Pending)",
                             "(atomic (assign (at r t2) tail) (assign tail (at r t1)) (assign q (concat q (list t1))))",
                             "(assign tail (at r t2))", "(atomic (assign q (tl q)) (assign (at status tail) Granted))"}) {
        Command c = parse_command(text);
        Expr guard = parse_expr("(and (!= (at r t1) bot) (!= (at r t2) bot) (< (len q) 2) (!= q (list)))");
        ExploreOptions o;
        ExploreResult res = Explorer(u, c).run(guard, o);
        std::size_t checked = 0;
        for (std::size_t i = 0; i < res.config_count(); ++i) {
            if (!res.is_terminal(i)) continue;
            Trace t = res.trace_to(i);
            ASSERT_EQ(t.steps.size(), 1u);
            auto posts = successors(transition_relation(c->instr, u), t.initial, u);
            ASSERT_EQ(posts.size(), 1u) << text;
            EXPECT_EQ(posts[0], res.state(i)) << text << " from " << describe(u, t.initial);
            ++checked;
        }
        EXPECT_GT(checked, 0u);
    }
}
