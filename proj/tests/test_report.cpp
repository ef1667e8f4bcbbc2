#include <rgclh/clh.hpp>
#include <rgclh/report.hpp>

#include <gtest/gtest.h>

using namespace rgclh;
using report::json;

TEST(Report, DigestIgnoresTiming)
{
    report::RunReport a;
    a.verb = "reorder";
    a.args = {{"model", "arm-like"}};
    a.input = "(ppseq arm-like (assign x 1) (assign y 1))";
    a.seconds = 0.5;
    report::RunReport b = a;
    b.seconds = 7;
    json ja = a.to_json(), jb = b.to_json();
    EXPECT_EQ(ja["digest"], jb["digest"]);
    ja.erase("timing");
    jb.erase("timing");
    EXPECT_EQ(ja.dump(), jb.dump());
    b.input += " ";
    EXPECT_NE(a.to_json()["digest"], b.to_json()["digest"]);
}

TEST(Report, Fnv1aKnownValues)
{
    EXPECT_EQ(report::fnv1a(""), "cbf29ce484222325");
    EXPECT_EQ(report::fnv1a("a"), "af63dc4c8601ec8c");
}

TEST(Report, ExitCodeTwoNeverHolds)
{
    report::RunReport r;
    r.verb = "clh";
    r.exit_code = 2;
    EXPECT_FALSE(r.to_json()["holds"].get<bool>());
}

TEST(Report, TraceListsChangedVariablesPerStep)
{
    clh::ClhConfig cfg;
    cfg.variant = clh::Variant::Buggy;
    Universe u = clh::universe(cfg);
    ExploreResult res = clh::explore_clh(cfg, u);
    SemanticVerdict v = check_global_invariant(res, clh::queued_pending());
    ASSERT_FALSE(v.holds);
    json j = report::semantic_json("queued", v, u, report::actor_names(res));
    const json& t = j["violation"]["trace"];
    EXPECT_EQ(t["length"].get<std::size_t>(), v.violation->trace.steps.size());
    EXPECT_EQ(t["initial"]["tail"], "n0");
    EXPECT_EQ(t["steps"][0]["actor"].get<std::string>().substr(0, 1), "t");
    for (const auto& st : t["steps"]) {
        EXPECT_LE(st["changes"].size(), 4u);
    }
}
