#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "yoloslim/graph.hpp"

namespace yoloslim {

// One primitive convolution inside a block, with its output extent
// resolved. Composite blocks expand to a deterministic prim list; the
// cost model folds formulas over it and the executor allocates weight
// buffers in the same order, which is what makes the parameter-count
// cross-check between the two meaningful.
struct ConvPrim {
    std::string name;  // position inside the block, e.g. "cv1", "m0.cv2"
    int in_ch = 0;
    int out_ch = 0;
    int kernel = 1;
    int stride = 1;
    int groups = 1;
    int out_h = 0;
    int out_w = 0;
    bool bn = true;    // BatchNorm follows the conv
    bool act = true;   // SiLU follows BatchNorm
    bool bias = false; // raw conv bias (prediction layers only)

    // kernel^2 * (in/groups) * out weights, + out bias when present.
    std::int64_t weight_scalars() const;
    // BatchNorm scale+shift (learnable).
    std::int64_t bn_scalars() const { return bn ? 2 * static_cast<std::int64_t>(out_ch) : 0; }
    // BatchNorm running mean/var (buffers, not learnable).
    std::int64_t bn_buffer_scalars() const { return bn_scalars(); }
};

// Shapes surrounding one node: its inputs' propagated shapes in input
// order, and its own propagated output shape.
struct NodeEnv {
    std::vector<TensorShape> inputs;
    TensorShape output;
};

/// Expands a node into its primitive convolutions in execution order.
/// Upsample and Concat expand to nothing. Detect contributes one box
/// tower and one class tower per head, each at that head's spatial
/// size. Pool windows, residual adds and attention products carry no
/// weights and are handled by the cost model separately.
std::vector<ConvPrim> enumerate_convs(const Node& node, const NodeEnv& env);

/// NodeEnv of one node from a propagated shape map; the source node
/// (no inputs) reads graph_input.
NodeEnv node_env(const Node& node, const std::map<int, TensorShape>& shapes,
                 const TensorShape& graph_input);

}  // namespace yoloslim
