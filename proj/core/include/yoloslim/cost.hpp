#pragma once

#include <cstdint>
#include <map>

#include "yoloslim/graph.hpp"
#include "yoloslim/shapes.hpp"

namespace yoloslim {

struct NodeCost {
    std::uint64_t params = 0;
    std::uint64_t flops = 0;

    NodeCost& operator+=(const NodeCost& o) {
        params += o.params;
        flops += o.flops;
        return *this;
    }
    bool operator==(const NodeCost&) const = default;
};

// FLOPs convention, applied uniformly:
//   conv        2 * k^2 * (cin/groups) * cout per output element (MAC = 2)
//   BatchNorm   2 ops/element, SiLU 1, conv bias 1
//   max-pool    k^2 ops per output element
//   residual    1 op/element
//   attention   2 * contraction-length per output element; softmax 4/element
//   upsample, concat: free
// Params exclude BatchNorm running mean/var; those are reported apart as
// bn_buffer_scalars.
struct CostReport {
    std::map<int, NodeCost> per_node;
    std::uint64_t total_params = 0;
    std::uint64_t total_flops = 0;
    std::uint64_t model_size_bytes = 0;
    std::uint64_t bn_buffer_scalars = 0;
    TensorShape input;
    int bytes_per_param = 4;
    Variant variant = Variant::Full;

    double gflops() const { return static_cast<double>(total_flops) / 1e9; }
    double size_mb() const { return static_cast<double>(model_size_bytes) / 1e6; }
};

/// Cost of one standard conv (BatchNorm + SiLU attached):
/// params = k^2*in*out + 2*out, flops = 2*k^2*in*out*oh*ow + 3*out*oh*ow.
/// Stride does not appear once output dims are fixed.
NodeCost cost_conv(int in_ch, int out_ch, int kernel, int stride, int out_h,
                   int out_w);

/// Whole-graph cost at the given input. The graph must validate; shape
/// propagation errors pass through. Totals are the exact per-node sums.
CostReport cost_graph(const ArchGraph& g, const TensorShape& input,
                      int bytes_per_param = 4);

class IncomparableReportsError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CostDelta {
    CostReport baseline;
    CostReport variant;
    double params_ratio = 1.0;
    double flops_ratio = 1.0;
    double size_ratio = 1.0;
    // All three ratios strictly below 1.
    bool strict_reduction = false;
};

/// Throws IncomparableReportsError when input resolution or
/// bytes_per_param differ.
CostDelta compare(const CostReport& baseline, const CostReport& variant);

}  // namespace yoloslim
