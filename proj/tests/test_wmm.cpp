#include <rgclh/clh.hpp>
#include <rgclh/report.hpp>
#include <rgclh/wmm.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace rgclh;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trimmed(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

const MemoryModel arm = MemoryModel::arm_like();

}  // namespace

TEST(Reorder, AcquireListingMatchesGolden)
{
    Command c = parse_command(slurp(std::string(RGCLH_DATA) + "/acquire.sexpr"));
    ReorderReport r = pairwise_report(c, arm);
    EXPECT_EQ(r.verdicts(), (std::vector<std::string>{"ordered", "reorderable", "ordered", "reorderable"}));
    EXPECT_EQ(report::reorder_table(r), slurp(std::string(RGCLH_GOLDEN) + "/reorder_acquire.txt"));
    EXPECT_EQ(to_sexpr(c), to_sexpr(clh::acquire_hw(1, false)));
}

TEST(Reorder, ReleaseListingMatchesGolden)
{
    ReorderReport r = pairwise_report(parse_command(slurp(std::string(RGCLH_DATA) + "/release.sexpr")), arm);
    EXPECT_EQ(r.verdicts(), (std::vector<std::string>{"ordered"}));
    EXPECT_EQ(report::reorder_table(r), slurp(std::string(RGCLH_GOLDEN) + "/reorder_release.txt"));
}

TEST(Reorder, ReleaseThenAcquireIsOrdered)
{
    ReorderReport r =
        pairwise_report(parse_command(slurp(std::string(RGCLH_DATA) + "/release_then_acquire.sexpr")), arm);
    EXPECT_EQ(r.verdicts(), (std::vector<std::string>{"ordered"}));
    EXPECT_EQ(report::reorder_table(r), slurp(std::string(RGCLH_GOLDEN) + "/reorder_release_then_acquire.txt"));
}

TEST(Reorder, ReleaseAnnotationOrdersEarlierAccesses)
{
    Command b = parse_command("(assign (at status (at r t1)) Pending :label b)");
    Command c = parse_command("(atomic (assign (at prev t1) tail) (assign tail (at r t1)) :label c)");
    Command c_rel = parse_command("(atomic (assign (at prev t1) tail) (assign tail (at r t1)) :label c :release)");
    EXPECT_TRUE(reorders(b, c, arm).reorderable);
    ReorderVerdict v = reorders(b, c_rel, arm);
    EXPECT_FALSE(v.reorderable);
    EXPECT_EQ(v.reason, "release");
    // later independent accesses may still overtake a release
    EXPECT_TRUE(reorders(c_rel, parse_command("(assign x 1)"), arm).reorderable);
}

TEST(Reorder, FencesOrderEverything)
{
    ReorderVerdict v = reorders(parse_command("(fence)"), parse_command("(assign x 1)"), arm);
    EXPECT_FALSE(v.reorderable);
    EXPECT_EQ(v.reason, "fence");
}

TEST(Reorder, NonLinearInputIsRejected)
{
    EXPECT_THROW(pairwise_report(parse_command("(ppseq arm-like (assign x 1) (par (assign y 1) (assign z 1)))"), arm),
                 NotLinear);
    EXPECT_THROW(pairwise_report(parse_command("(ppseq sc (assign x 1) (assign y 1))"), arm), NotLinear);
}

TEST(Transform, ReleaseAnnotatedAcquireBecomesParallelTail)
{
    Command in = parse_command(slurp(std::string(RGCLH_DATA) + "/acquire_release.sexpr"));
    Command out = strip_ordering(transform(in, arm));
    EXPECT_EQ(to_sexpr(out), trimmed(slurp(std::string(RGCLH_GOLDEN) + "/transform_acquire_release.sexpr")));
    EXPECT_TRUE(structurally_equal(out, clh::acquire_par(1)));
}

TEST(Transform, UnannotatedAcquireLetsSwapOvertakeTheStore)
{
    Command out = transform(clh::acquire_hw(1, false), arm);
    ASSERT_EQ(out->kind, CmdKind::Seq);
    std::vector<Command> xs;
    flatten(out, CmdKind::Seq, xs);
    ASSERT_EQ(xs.size(), 3u);
    EXPECT_EQ(xs[1]->kind, CmdKind::Par);
    EXPECT_EQ(xs[2]->kind, CmdKind::Par);
}

TEST(Transform, FencesSplitChainsAndDisappear)
{
    Command out = transform(parse_command("(ppseq arm-like (assign x 1) (fence) (assign y 1))"), arm);
    EXPECT_EQ(to_sexpr(out), "(seq (assign x 1) (assign y 1))");
}

TEST(Transform, LoopsUnderPpseqAreNotTransformable)
{
    EXPECT_THROW(transform(parse_command("(ppseq arm-like (assign x 1) (while (< y 1) (assign y 1)))"), arm),
                 NotTransformable);
    EXPECT_THROW(transform(parse_command("(ppseq arm-like (assign x 1) skip)"), arm), NotTransformable);
}

TEST(Transform, OrderedChainsStaySequential)
{
    Command out = transform(clh::release_hw(1), arm);
    EXPECT_EQ(out->kind, CmdKind::Seq);
    EXPECT_EQ(to_sexpr(strip_ordering(out)), to_sexpr(strip_ordering(cmd::seq(clh::release_hw_elements(1)))));
}
