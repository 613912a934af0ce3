#include "yoloslim/cost.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <numeric>

#include "yoloslim/builder.hpp"
#include "yoloslim/expand.hpp"
#include "yoloslim/prune.hpp"

using namespace yoloslim;

namespace {

const ArchGraph& reference() {
    static const ArchGraph g = build_yolov11n();
    return g;
}

CostReport cost_of(Variant v, int side = 640, int bpp = 4) {
    return cost_graph(prune(reference(), v).graph, {3, side, side}, bpp);
}

struct Golden {
    Variant variant;
    std::uint64_t params;
    std::uint64_t flops;
    std::uint64_t bn_buffers;
};

// Frozen against an independent implementation of the counting
// conventions documented in cost.hpp, at 640x640 with 80 classes.
constexpr Golden kGoldens[] = {
    {Variant::Full,   2408668, 5918235200, 15296},
    {Variant::Small,  1598164, 4774508800, 10240},
    {Variant::Medium, 1769364, 4624832000, 10880},
    {Variant::Large,  1980308, 3853256000, 11776},
    {Variant::SM,     1805400, 5436275200, 11936},
    {Variant::ML,     2372632, 5106792000, 14240},
    {Variant::SL,     2275416, 5493012800, 13856},
};

}  // namespace

TEST(CostConv, MatchesTheDocumentedFormula) {
    // 3x3 conv, 16 -> 32 channels, 160x160 output:
    // params = 9*16*32 + 2*32 = 4672
    // flops  = (2*9*16*32 + 3*32) * 160*160 = 238387200
    const NodeCost c = cost_conv(16, 32, 3, 2, 160, 160);
    EXPECT_EQ(c.params, 4672u);
    EXPECT_EQ(c.flops, 238387200u);
}

TEST(CostConv, StrideDoesNotAppearOnceOutputDimsAreFixed) {
    EXPECT_EQ(cost_conv(16, 32, 3, 1, 160, 160),
              cost_conv(16, 32, 3, 2, 160, 160));
}

TEST(CostGraph, StemConvCost) {
    const CostReport r = cost_of(Variant::Full);
    // b0: 3x3, 3 -> 16, output 320x320.
    EXPECT_EQ(r.per_node.at(0), (NodeCost{464, 93388800}));
}

TEST(CostGraph, FrozenTotalsForAllVariants) {
    for (const Golden& gold : kGoldens) {
        const CostReport r = cost_of(gold.variant);
        EXPECT_EQ(r.total_params, gold.params) << to_string(gold.variant);
        EXPECT_EQ(r.total_flops, gold.flops) << to_string(gold.variant);
        EXPECT_EQ(r.bn_buffer_scalars, gold.bn_buffers)
            << to_string(gold.variant);
        EXPECT_EQ(r.variant, gold.variant);
    }
}

TEST(CostGraph, TotalsAreThePerNodeSums) {
    for (Variant v : kAllVariants) {
        const CostReport r = cost_of(v);
        NodeCost sum;
        for (const auto& [id, c] : r.per_node) sum += c;
        EXPECT_EQ(sum.params, r.total_params) << to_string(v);
        EXPECT_EQ(sum.flops, r.total_flops) << to_string(v);
    }
}

TEST(CostGraph, ParameterCountIsResolutionIndependent) {
    EXPECT_EQ(cost_of(Variant::Full, 320).total_params,
              cost_of(Variant::Full, 640).total_params);
}

TEST(CostGraph, FrozenTotalsAtOtherResolutions) {
    EXPECT_EQ(cost_of(Variant::Full, 320).total_flops, 1467888800u);
    EXPECT_EQ(cost_of(Variant::Full, 64).total_flops, 58566176u);
}

TEST(CostGraph, FlopsScaleNearlyQuadraticallyWithResolution) {
    // Convolutions scale exactly x4 from 320 to 640; the attention
    // block is the one super-linear term, so the ratio sits just under
    // a quarter rather than exactly on it.
    const double ratio =
        static_cast<double>(cost_of(Variant::Full, 320).total_flops) /
        static_cast<double>(cost_of(Variant::Full, 640).total_flops);
    EXPECT_GE(ratio, 0.245);
    EXPECT_LT(ratio, 0.25);
}

TEST(CostGraph, ModelSizeFollowsBytesPerParam) {
    const CostReport fp32 = cost_of(Variant::Full, 640, 4);
    const CostReport fp16 = cost_of(Variant::Full, 640, 2);
    EXPECT_EQ(fp32.model_size_bytes, fp32.total_params * 4);
    EXPECT_EQ(fp16.model_size_bytes, fp16.total_params * 2);
    EXPECT_EQ(fp32.model_size_bytes, 2 * fp16.model_size_bytes);
}

TEST(CostGraph, RejectsGraphsThatDoNotValidate) {
    ArchGraph g = reference();
    g.nodes.pop_back();
    EXPECT_THROW(cost_graph(g, {3, 640, 640}), GraphError);
}

TEST(CostGraph, RejectsIndivisibleInputs) {
    EXPECT_THROW(cost_graph(reference(), {3, 100, 100}),
                 IndivisibleInputError);
}

TEST(Compare, RatiosAndStrictReduction) {
    const CostReport base = cost_of(Variant::Full);
    const CostReport large = cost_of(Variant::Large);
    const CostDelta d = compare(base, large);
    EXPECT_NEAR(d.flops_ratio, 3853256000.0 / 5918235200.0, 1e-12);
    EXPECT_NEAR(d.params_ratio, 1980308.0 / 2408668.0, 1e-12);
    EXPECT_TRUE(d.strict_reduction);

    const CostDelta self = compare(base, base);
    EXPECT_DOUBLE_EQ(self.flops_ratio, 1.0);
    EXPECT_FALSE(self.strict_reduction);
}

TEST(Compare, RejectsMismatchedConventions) {
    EXPECT_THROW(compare(cost_of(Variant::Full, 640),
                         cost_of(Variant::Large, 320)),
                 IncomparableReportsError);
    EXPECT_THROW(compare(cost_of(Variant::Full, 640, 4),
                         cost_of(Variant::Large, 640, 2)),
                 IncomparableReportsError);
}

TEST(Expand, ConvBlockYieldsOnePrim) {
    const Node& stem = reference().at(0);
    const NodeEnv env{{ {3, 640, 640} }, {16, 320, 320}};
    const auto prims = enumerate_convs(stem, env);
    ASSERT_EQ(prims.size(), 1u);
    EXPECT_EQ(prims[0].name, "conv");
    EXPECT_EQ(prims[0].in_ch, 3);
    EXPECT_EQ(prims[0].out_ch, 16);
    EXPECT_EQ(prims[0].weight_scalars(), 9 * 3 * 16);
    EXPECT_EQ(prims[0].bn_scalars(), 32);
}

TEST(Expand, C3k2ExpansionOrderIsStable) {
    // b2: C3k2 out 64, one plain bottleneck repeat.
    const Node& b2 = reference().at(2);
    const NodeEnv env{{ {32, 160, 160} }, {64, 160, 160}};
    const auto prims = enumerate_convs(b2, env);
    ASSERT_EQ(prims.size(), 4u);
    EXPECT_EQ(prims[0].name, "cv1");
    EXPECT_EQ(prims[1].name, "m0.cv1");
    EXPECT_EQ(prims[2].name, "m0.cv2");
    EXPECT_EQ(prims[3].name, "cv2");
    // expansion 0.25: hidden width 16, split conv emits 2*16.
    EXPECT_EQ(prims[0].out_ch, 32);
    EXPECT_EQ(prims[3].in_ch, 48);
    EXPECT_EQ(prims[3].out_ch, 64);
}

TEST(Expand, DetectEmitsBothTowersPerHead) {
    const Node& det = reference().at(23);
    const NodeEnv env{
        {{64, 80, 80}, {128, 40, 40}, {256, 20, 20}},
        {84, 80, 80}};
    const auto prims = enumerate_convs(det, env);
    ASSERT_EQ(prims.size(), 3u * 8u);
    EXPECT_EQ(prims[0].name, "head0.box.0");
    EXPECT_EQ(prims[7].name, "head0.cls.4");
    // Prediction convs are plain: bias, no BatchNorm, no activation.
    EXPECT_TRUE(prims[2].bias);
    EXPECT_FALSE(prims[2].bn);
    EXPECT_FALSE(prims[2].act);
    EXPECT_EQ(prims[2].out_ch, 4);
    EXPECT_EQ(prims[7].out_ch, 80);
    // The class tower leans on depthwise convs.
    EXPECT_EQ(prims[3].groups, 64);
}

TEST(Expand, PassThroughBlocksCarryNoWeights) {
    const Node& up = reference().at(11);
    const NodeEnv up_env{{ {256, 20, 20} }, {256, 40, 40}};
    EXPECT_TRUE(enumerate_convs(up, up_env).empty());
    const Node& cat = reference().at(12);
    const NodeEnv cat_env{{{256, 40, 40}, {128, 40, 40}}, {384, 40, 40}};
    EXPECT_TRUE(enumerate_convs(cat, cat_env).empty());
}
