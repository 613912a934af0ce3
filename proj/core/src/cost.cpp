#include "yoloslim/cost.hpp"

#include "yoloslim/expand.hpp"

namespace yoloslim {

namespace {

NodeCost cost_prim(const ConvPrim& p) {
    const std::uint64_t w = static_cast<std::uint64_t>(p.kernel) * p.kernel *
                            (p.in_ch / p.groups) * p.out_ch;
    const std::uint64_t hw = static_cast<std::uint64_t>(p.out_h) * p.out_w;
    const std::uint64_t per_element =
        (p.bn ? 2 : 0) + (p.act ? 1 : 0) + (p.bias ? 1 : 0);
    NodeCost c;
    c.params = w + (p.bn ? 2ull * p.out_ch : 0) + (p.bias ? p.out_ch : 0);
    c.flops = 2 * w * hw + per_element * p.out_ch * hw;
    return c;
}

// Ops carried by pool windows, residual adds and attention products,
// which own no weights and so sit outside the prim list.
struct ExtraFlops {
    const NodeEnv& env;

    std::uint64_t operator()(const C3k2Block& b) const {
        const std::uint64_t hw =
            static_cast<std::uint64_t>(env.output.height) * env.output.width;
        const int c = static_cast<int>(b.out_channels * b.expansion);
        // One shortcut add per bottleneck: the stack holds `repeats`
        // bottlenecks at width c, or with use_c3k two per repeat at c/2.
        const std::uint64_t adds =
            b.use_c3k ? 2ull * (c / 2) * b.repeats : 1ull * c * b.repeats;
        return adds * hw;
    }
    std::uint64_t operator()(const SppfBlock& b) const {
        const std::uint64_t hw =
            static_cast<std::uint64_t>(env.output.height) * env.output.width;
        const std::uint64_t c_ = env.inputs[0].channels / 2;
        return 3ull * b.pool_kernel * b.pool_kernel * c_ * hw;
    }
    std::uint64_t operator()(const C2psaBlock& b) const {
        const std::uint64_t n =
            static_cast<std::uint64_t>(env.output.height) * env.output.width;
        const std::uint64_t c = env.inputs[0].channels / 2;
        const std::uint64_t kd = c / 2;
        // q.k scores, scale, softmax, attn.v, plus three elementwise
        // adds (positional encoding, attention residual, ffn residual).
        const std::uint64_t per_repeat =
            (2 * kd + 1 + 4 + 2 * c) * n * n + 3 * c * n;
        return per_repeat * b.repeats;
    }
    std::uint64_t operator()(const ConvBlock&) const { return 0; }
    std::uint64_t operator()(const UpsampleBlock&) const { return 0; }
    std::uint64_t operator()(const ConcatBlock&) const { return 0; }
    std::uint64_t operator()(const DetectBlock&) const { return 0; }
};

}  // namespace

NodeCost cost_conv(int in_ch, int out_ch, int kernel, int stride, int out_h,
                   int out_w) {
    return cost_prim(ConvPrim{"conv", in_ch, out_ch, kernel, stride, 1, out_h,
                              out_w, true, true, false});
}

CostReport cost_graph(const ArchGraph& g, const TensorShape& input,
                      int bytes_per_param) {
    ValidationReport validation = validate(g);
    if (!validation.valid()) {
        throw GraphError(validation.violations.front().node_id,
                         "cannot cost an invalid graph:\n" +
                             validation.to_string());
    }

    CostReport report;
    report.input = input;
    report.bytes_per_param = bytes_per_param;
    report.variant = g.variant;

    const ShapeMap shapes = propagate_shapes(g, input);
    for (const Node& node : g.nodes) {
        const NodeEnv env = node_env(node, shapes, input);
        NodeCost cost;
        for (const ConvPrim& prim : enumerate_convs(node, env)) {
            cost += cost_prim(prim);
            report.bn_buffer_scalars += prim.bn_buffer_scalars();
        }
        cost.flops += std::visit(ExtraFlops{env}, node.kind);
        report.per_node[node.id] = cost;
        report.total_params += cost.params;
        report.total_flops += cost.flops;
    }
    report.model_size_bytes = report.total_params * bytes_per_param;
    return report;
}

CostDelta compare(const CostReport& baseline, const CostReport& variant) {
    if (!(baseline.input == variant.input) ||
        baseline.bytes_per_param != variant.bytes_per_param) {
        throw IncomparableReportsError(
            "reports differ in input resolution or bytes per parameter");
    }
    CostDelta d;
    d.baseline = baseline;
    d.variant = variant;
    d.params_ratio = static_cast<double>(variant.total_params) /
                     static_cast<double>(baseline.total_params);
    d.flops_ratio = static_cast<double>(variant.total_flops) /
                    static_cast<double>(baseline.total_flops);
    d.size_ratio = static_cast<double>(variant.model_size_bytes) /
                   static_cast<double>(baseline.model_size_bytes);
    d.strict_reduction =
        d.params_ratio < 1.0 && d.flops_ratio < 1.0 && d.size_ratio < 1.0;
    return d;
}

}  // namespace yoloslim
