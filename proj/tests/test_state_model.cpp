#include <rgclh/check.hpp>
#include <rgclh/clh.hpp>

#include <gtest/gtest.h>

using namespace rgclh;

namespace {

Universe small()
{
    return Universe::Builder(2, 2)
        .scalar("x", Domain::ints(0, 3))
        .scalar("y", Domain::ints(0, 3))
        .scalar("q", Domain::thread_seqs(2, 2))
        .array("p", IndexKind::Threads, Domain::nodes(2, true))
        .build();
}

// reference: first pre-state (in enumeration order) where a holds and c does not
std::optional<State> brute_pred(const Expr& a, const Expr& c, const Universe& u)
{
    Compiled ca(u, a), cc(u, c);
    std::optional<State> out;
    for_each_state(u, nullptr, [&](const State& s) {
        if (ca.holds(s) && !cc.holds(s)) {
            out = s;
            return false;
        }
        return true;
    });
    return out;
}

}  // namespace

TEST(Universe, VariablesAreOrderedByName)
{
    Universe u = small();
    ASSERT_EQ(u.size(), 5u);
    EXPECT_EQ(u.var(0).name, "p[t1]");
    EXPECT_EQ(u.var(1).name, "p[t2]");
    EXPECT_EQ(u.var(2).name, "q");
    EXPECT_EQ(u.var(4).name, "y");
    EXPECT_DOUBLE_EQ(u.state_count(), 3.0 * 3 * 7 * 4 * 4);
}

TEST(Universe, ThreadSequencesByLengthThenLexicographic)
{
    Domain d = Domain::thread_seqs(2, 2);
    std::vector<std::string> names;
    for (const auto& v : d.values) names.push_back(to_string(v));
    EXPECT_EQ(names, (std::vector<std::string>{"(list)", "(list t1)", "(list t2)", "(list t1 t1)", "(list t1 t2)", "(list t2 t1)", "(list t2 t2)"}));
}

TEST(Universe, UndeclaredVariableIsAnError)
{
    Universe u = small();
    EXPECT_THROW(Compiled(u, ex::var("nope")), EvalError);
}

TEST(Expr, SexprRoundTrip)
{
    for (const char* text : {"(and (= x 1) (or (< y 2) (not (in t1 q))))", "(= (at p t1) bot)",
                             "(forall j threads (implies (in j q) (= (at p j) n0)))", "(implies (= x' 3) (ID y))",
                             "(= (index q t2) (+ x 1))"}) {
        Expr e = parse_expr(text);
        EXPECT_EQ(to_sexpr(e), text);
        EXPECT_EQ(to_sexpr(parse_expr(to_sexpr(e))), to_sexpr(e));
    }
}

TEST(Expr, ParseErrorsCarryLine)
{
    EXPECT_THROW(parse_expr("(frobnicate x)"), ParseError);
    EXPECT_THROW(parse_expr("(and (= x 1)"), ParseError);
}

TEST(Implication, MatchesBruteForceAndReportsFirstCounterexample)
{
    Universe u = small();
    std::vector<std::pair<const char*, const char*>> cases = {
        {"(= x 1)", "(< x 2)"},
        {"(< x 2)", "(= x 1)"},
        {"(and (in t1 q) (= (len q) 1))", "(= (hd q) t1)"},
        {"(in t1 q)", "(= (hd q) t1)"},
        {"(= (at p t1) n0)", "(!= (at p t1) bot)"},
        {"(<= x y)", "(or (< x y) (= x y))"},
        {"true", "(or (= x 0) (< y 3))"},
    };
    for (const auto& [a, c] : cases) {
        Verdict v = implies_pred(parse_expr(a), parse_expr(c), u);
        auto ref = brute_pred(parse_expr(a), parse_expr(c), u);
        EXPECT_EQ(v.holds, !ref.has_value()) << a << " => " << c;
        if (ref) {
            ASSERT_TRUE(v.state.has_value());
            EXPECT_EQ(*v.state, *ref) << a << " => " << c << ": " << describe(u, *v.state);
        }
        EXPECT_EQ(v.mode, CheckMode::Full);
    }
}

TEST(Implication, FilterRestrictsPreStatesAndIsReported)
{
    Universe u = small();
    CheckOptions o;
    o.filter = parse_expr("(= x 1)");
    Verdict v = implies_pred(ex::tt(), parse_expr("(= x 1)"), u, o);
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.mode, CheckMode::Filtered);
    EXPECT_FALSE(implies_pred(ex::tt(), parse_expr("(= x 1)"), u).holds);
}

TEST(Implication, RelationsAndStability)
{
    Universe u = small();
    EXPECT_TRUE(implies_rel(parse_expr("(and (= x' x) (= y' y))"), parse_expr("(<= x x')"), u).holds);
    Verdict v = implies_rel(parse_expr("(<= x x')"), parse_expr("(= x' x)"), u);
    ASSERT_FALSE(v.holds);
    ASSERT_TRUE(v.post.has_value());
    EXPECT_NE(value_of(u, *v.state, u.id("x")), value_of(u, *v.post, u.id("x")));

    EXPECT_TRUE(stable(parse_expr("(<= 2 x)"), parse_expr("(<= x x')"), u).holds);
    EXPECT_FALSE(stable(parse_expr("(<= 2 x)"), parse_expr("(<= x' x)"), u).holds);
    EXPECT_TRUE(stable(parse_expr("(= y 1)"), parse_expr("(ID y)"), u).holds);
}

TEST(Implication, PrimedAntecedentRejectedForPredicates)
{
    Universe u = small();
    EXPECT_THROW(implies_pred(parse_expr("(= x' 1)"), ex::tt(), u), EvalError);
}

TEST(Implication, UnguardedIndexIsAnError)
{
    Universe u = small();
    EXPECT_THROW(implies_pred(ex::tt(), parse_expr("(= (hd q) t1)"), u), EvalError);
    EXPECT_NO_THROW(implies_pred(parse_expr("(!= q (list))"), parse_expr("(in (hd q) q)"), u));
}

TEST(Successors, EnumerateRelationImage)
{
    Universe u = small();
    State s = make_state(u, {{"x", Value::integer(1)}, {"y", Value::integer(2)}});
    auto posts = successors(parse_expr("(and (<= x x') (ID y q p))"), s, u);
    ASSERT_EQ(posts.size(), 3u);
    for (std::size_t k = 0; k < posts.size(); ++k) {
        EXPECT_EQ(value_of(u, posts[k], u.id("x")), Value::integer(static_cast<int>(k) + 1));
        EXPECT_EQ(value_of(u, posts[k], u.id("y")), Value::integer(2));
    }
    Stepper st(parse_expr("(or (ID x y q p) (and (= x' 0) (ID y q p)))"), u);
    EXPECT_EQ(st(s).size(), 2u);
}

TEST(Clh, InvariantStateCountMatchesBruteForceOracle)
{
    clh::ClhConfig cfg;
    Universe u = clh::universe(cfg);
    // tests/oracle/clh_oracle.py, "invariant_states"
    EXPECT_EQ(count_states(u, clh::invariant()), 70848u);
}
