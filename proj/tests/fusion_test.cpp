#include "bnfuse/fusion.hpp"

#include <gtest/gtest.h>

#include "bnfuse/random_nets.hpp"
#include "testutil.hpp"

using namespace bnfuse;

namespace {

const std::set<Arc> kWalkthroughFused{{"a", "c"}, {"b", "d"}, {"e", "c"},
                                  {"c", "f"}, {"d", "f"}, {"a", "d"},
                                  {"b", "e"}, {"a", "b"}};
const std::set<Arc> kWalkthroughTransformed{
    {"a", "b"}, {"a", "c"}, {"b", "d"}, {"b", "e"}, {"a", "d"}};

std::vector<std::pair<EventKind, Arc>> kinds_and_arcs(const FusionTrace& trace) {
    std::vector<std::pair<EventKind, Arc>> out;
    for (const auto& e : trace.events) out.emplace_back(e.kind, e.arc);
    return out;
}

} // namespace

TEST(Classify, WalkthroughInitialization) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    LayerMap tau = layer_values(d1, d2.nodes());
    ArcPartition parts = classify_arcs(d2.arcs(), tau, d1.arcs());
    EXPECT_TRUE(parts.direct.empty());
    EXPECT_EQ(parts.reverse, (std::set<Arc>{{"d", "b"}}));
    EXPECT_EQ(parts.deferred, (std::set<Arc>{{"a", "b"}, {"b", "e"}}));
}

TEST(Classify, IdenticalArcSetsAllDrop) {
    Dag d1 = testutil::walkthrough_first();
    LayerMap tau = layer_values(d1);
    ArcPartition parts = classify_arcs(d1.arcs(), tau, d1.arcs());
    EXPECT_TRUE(parts.empty());
}

TEST(Classify, HigherTailValueNeedsReversal) {
    LayerMap tau{{"x", 2}, {"y", 0}};
    EXPECT_EQ(classify_arc({"x", "y"}, tau, {}), ArcBucket::reverse);
}

TEST(Classify, MissingValueThrows) {
    EXPECT_THROW(classify_arc({"x", "y"}, LayerMap{{"x", 0}}, {}), LookupError);
}

TEST(MinReversal, WalkthroughSingleton) {
    ArcPartition parts;
    parts.reverse = {{"d", "b"}};
    LayerMap tau2{{"a", 0}, {"b", 1}, {"c", 1}, {"d", 0}, {"e", 2}};
    EXPECT_EQ(min_reversal(parts, tau2), (Arc{"d", "b"}));
}

TEST(MinReversal, SmallerHeadValueWins) {
    ArcPartition parts;
    parts.reverse = {{"x", "y"}, {"u", "v"}};
    LayerMap tau2{{"x", 1}, {"y", 0}, {"u", 1}, {"v", 3}};
    EXPECT_EQ(min_reversal(parts, tau2), (Arc{"x", "y"}));
}

TEST(MinReversal, LargerTailValueBreaksHeadTies) {
    ArcPartition parts;
    parts.reverse = {{"p", "y"}, {"q", "y"}};
    LayerMap tau2{{"p", 2}, {"q", 1}, {"y", 0}};
    EXPECT_EQ(min_reversal(parts, tau2), (Arc{"p", "y"}));
}

TEST(MinReversal, EmptySetThrows) {
    EXPECT_THROW(min_reversal(ArcPartition{}, LayerMap{}), ValidationError);
}

TEST(MinDeferred, WalkthroughPicksDeeperSecondNetHead) {
    ArcPartition parts;
    parts.deferred = {{"a", "b"}, {"b", "e"}};
    LayerMap fused_layers{{"a", 0}, {"b", 0}, {"e", 0}};
    LayerMap tau2{{"a", 0}, {"b", 1}, {"c", 1}, {"d", 2}, {"e", 2}};
    EXPECT_EQ(min_deferred(parts, fused_layers, tau2), (Arc{"b", "e"}));
}

TEST(MinDeferred, Singleton) {
    ArcPartition parts;
    parts.deferred = {{"x", "y"}};
    EXPECT_EQ(min_deferred(parts, LayerMap{{"x", 1}, {"y", 1}},
                           LayerMap{{"x", 0}, {"y", 1}}),
              (Arc{"x", "y"}));
}

TEST(MinDeferred, LargerFusedTailValueWins) {
    ArcPartition parts;
    parts.deferred = {{"x", "y"}, {"u", "v"}};
    LayerMap fused_layers{{"x", 3}, {"y", 3}, {"u", 1}, {"v", 1}};
    LayerMap tau2{{"x", 0}, {"y", 1}, {"u", 0}, {"v", 1}};
    EXPECT_EQ(min_deferred(parts, fused_layers, tau2), (Arc{"x", "y"}));
}

TEST(MinDeferred, EmptySetThrows) {
    EXPECT_THROW(min_deferred(ArcPartition{}, LayerMap{}, LayerMap{}),
                 ValidationError);
}

TEST(FuseDags, SixNodeWalkthrough) {
    FusionOptions checked{.checked = true};
    FusionResult result = fuse_dags(testutil::walkthrough_first(),
                                    testutil::walkthrough_second(), checked);

    EXPECT_EQ(result.fused.arcs(), kWalkthroughFused);
    EXPECT_EQ(result.transformed_second.arcs(), kWalkthroughTransformed);
    EXPECT_EQ(result.trace.reversal_iterations, 1);
    EXPECT_EQ(result.trace.merge_iterations, 2);

    std::vector<std::pair<EventKind, Arc>> expected{
        {EventKind::classify, {"a", "b"}},        // deferred
        {EventKind::classify, {"a", "c"}},        // present
        {EventKind::classify, {"b", "e"}},        // deferred
        {EventKind::classify, {"d", "b"}},        // reverse
        {EventKind::select_reverse, {"d", "b"}},
        {EventKind::reverse, {"d", "b"}},
        {EventKind::new_arc, {"a", "d"}},         // lands in direct
        {EventKind::add_arc, {"a", "d"}},         // direct flush
        {EventKind::select_deferred, {"b", "e"}},
        {EventKind::add_arc, {"b", "e"}},
        {EventKind::select_deferred, {"a", "b"}},
        {EventKind::add_arc, {"a", "b"}},
    };
    EXPECT_EQ(kinds_and_arcs(result.trace), expected);

    EXPECT_EQ(result.only_first,
              (std::set<Arc>{{"e", "c"}, {"c", "f"}, {"d", "f"}}));
    EXPECT_EQ(result.only_second,
              (std::set<Arc>{{"a", "b"}, {"a", "d"}, {"b", "e"}}));
    EXPECT_EQ(result.shared, (std::set<Arc>{{"a", "c"}, {"b", "d"}}));
}

TEST(FuseDags, SecondWithoutArcs) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2({"a", "b", "g"}, {});
    FusionResult result = fuse_dags(d1, d2);
    std::set<NodeId> expected_nodes = d1.nodes();
    expected_nodes.insert("g");
    EXPECT_EQ(result.fused.nodes(), expected_nodes);
    EXPECT_EQ(result.fused.arcs(), d1.arcs());
    EXPECT_TRUE(result.trace.events.empty());
    EXPECT_EQ(result.trace.reversal_iterations, 0);
    EXPECT_EQ(result.trace.merge_iterations, 0);
}

TEST(FuseDags, IdenticalInputs) {
    Dag d1 = testutil::walkthrough_first();
    FusionResult result = fuse_dags(d1, d1, {.checked = true});
    EXPECT_EQ(result.fused, d1);
    EXPECT_EQ(result.transformed_second, d1);
    for (const auto& event : result.trace.events) {
        EXPECT_EQ(event.kind, EventKind::classify);
        EXPECT_EQ(event.bucket, ArcBucket::present);
    }
}

TEST(FuseDags, TransferFiresWhenDeferredArcsShareAHead) {
    Dag d1({"p", "q", "y"}, {});
    Dag d2 = testutil::make_dag({"p", "q", "y"}, {{"p", "y"}, {"q", "y"}});
    FusionResult result = fuse_dags(d1, d2, {.checked = true});

    bool saw_transfer = false;
    for (const auto& event : result.trace.events)
        if (event.kind == EventKind::transfer) {
            saw_transfer = true;
            EXPECT_EQ(event.arc, (Arc{"q", "y"}));
        }
    EXPECT_TRUE(saw_transfer);
    EXPECT_EQ(result.fused.arcs(), d2.arcs());
    EXPECT_EQ(result.trace.merge_iterations, 2);
}

TEST(FuseDags, ModesProduceIdenticalRuns) {
    auto corpus = testutil::random_pairs(150, 10, 777);
    for (const auto& pair : corpus) {
        FusionResult incremental = fuse_dags(
            pair.first, pair.second,
            {.checked = true, .layer_maintenance = LayerMaintenance::incremental});
        FusionResult full = fuse_dags(
            pair.first, pair.second,
            {.checked = true, .layer_maintenance = LayerMaintenance::full_recompute});
        EXPECT_EQ(incremental.fused, full.fused) << "seed " << pair.seed;
        EXPECT_EQ(incremental.transformed_second, full.transformed_second);
        EXPECT_EQ(kinds_and_arcs(incremental.trace), kinds_and_arcs(full.trace))
            << "seed " << pair.seed;
    }
}

TEST(FuseDags, CheckedCorpusHoldsEveryInvariant) {
    auto corpus = testutil::random_pairs(250, 12, 4242);
    for (const auto& pair : corpus) {
        FusionResult result;
        ASSERT_NO_THROW(result = fuse_dags(pair.first, pair.second,
                                           {.checked = true}))
            << "seed " << pair.seed << " density " << pair.density;

        // Union and embedding, re-derived here rather than trusting the
        // library's own post-checks.
        std::set<Arc> expected_union = pair.first.arcs();
        const auto& transformed = result.transformed_second.arcs();
        expected_union.insert(transformed.begin(), transformed.end());
        EXPECT_EQ(result.fused.arcs(), expected_union);

        std::set<Arc> first_keep = result.only_first;
        first_keep.insert(result.shared.begin(), result.shared.end());
        EXPECT_EQ(project(result.fused, pair.first.nodes(), first_keep),
                  pair.first);
        std::set<Arc> second_keep = result.only_second;
        second_keep.insert(result.shared.begin(), result.shared.end());
        EXPECT_EQ(project(result.fused, pair.second.nodes(), second_keep),
                  result.transformed_second);

        auto n2 = static_cast<long long>(pair.second.nodes().size());
        EXPECT_LE(result.trace.reversal_iterations +
                      result.trace.merge_iterations,
                  n2 * (n2 - 1) / 2);
        EXPECT_LE(result.trace.merge_iterations, n2);

        EXPECT_TRUE(testutil::no_reentry(result.trace)) << "seed " << pair.seed;

        auto replay =
            testutil::replay_trace(pair.first, pair.second, result.trace);
        EXPECT_EQ(replay.fused_arcs, result.fused.arcs());
        EXPECT_EQ(replay.transformed_second, result.transformed_second);
    }
}

TEST(FuseDags, TraceReplayOnWalkthrough) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    FusionResult result = fuse_dags(d1, d2);
    auto replay = testutil::replay_trace(d1, d2, result.trace);
    EXPECT_EQ(replay.fused_arcs, result.fused.arcs());
    EXPECT_EQ(replay.transformed_second, result.transformed_second);
}

TEST(FuseDags, TraceLogIsStableAcrossRuns) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    std::string log1 = fuse_dags(d1, d2).trace.to_log();
    std::string log2 = fuse_dags(d1, d2).trace.to_log();
    EXPECT_EQ(log1, log2);
    EXPECT_NE(log1.find("select-reverse d->b"), std::string::npos);
}

TEST(FuseMany, SingleInputIsIdentity) {
    Dag d1 = testutil::walkthrough_first();
    MultiFusionResult result = fuse_many({d1});
    EXPECT_EQ(result.fused, d1);
    ASSERT_EQ(result.transformed.size(), 1u);
    EXPECT_EQ(result.transformed[0], d1);
    EXPECT_TRUE(result.traces[0].events.empty());
}

TEST(FuseMany, PairMatchesFuseDags) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    MultiFusionResult many = fuse_many({d1, d2});
    FusionResult two = fuse_dags(d1, d2);
    EXPECT_EQ(many.fused, two.fused);
    ASSERT_EQ(many.transformed.size(), 2u);
    EXPECT_EQ(many.transformed[1], two.transformed_second);
}

TEST(FuseMany, RepeatedInputAddsNothing) {
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    MultiFusionResult twice = fuse_many({d1, d2});
    MultiFusionResult thrice = fuse_many({d1, d2, d2}, {.checked = true});
    EXPECT_EQ(thrice.fused.arcs(), twice.fused.arcs());
    // The third pass re-derives the same transformed shape.
    EXPECT_EQ(thrice.transformed[2].arcs(), twice.transformed[1].arcs());
}

TEST(FuseMany, EmptyInputListThrows) {
    EXPECT_THROW(fuse_many({}), ValidationError);
}

TEST(FuseMany, OrderMatters) {
    // Both orders are valid consensus structures, but not the same one.
    Dag d1 = testutil::walkthrough_first();
    Dag d2 = testutil::walkthrough_second();
    MultiFusionResult ab = fuse_many({d1, d2});
    MultiFusionResult ba = fuse_many({d2, d1});
    EXPECT_TRUE(is_acyclic(ab.fused.nodes(), ab.fused.arcs()).acyclic);
    EXPECT_TRUE(is_acyclic(ba.fused.nodes(), ba.fused.arcs()).acyclic);
    EXPECT_NE(ab.fused.arcs(), ba.fused.arcs());
}
