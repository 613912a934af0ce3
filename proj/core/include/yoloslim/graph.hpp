#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "yoloslim/variant.hpp"

namespace yoloslim {

struct TensorShape {
    int channels = 0;
    int height = 0;
    int width = 0;

    bool operator==(const TensorShape&) const = default;
    bool positive() const { return channels >= 1 && height >= 1 && width >= 1; }
    std::int64_t elements() const {
        return static_cast<std::int64_t>(channels) * height * width;
    }
};

std::string to_string(const TensorShape& s);  // "CxHxW"

// Block kinds. Input channel counts are never stored: they are derived
// from the producing node during shape propagation, which is what makes
// rewiring legal whenever spatial dims line up.

// Conv + BatchNorm + SiLU.
struct ConvBlock {
    int out_channels = 0;
    int kernel = 1;
    int stride = 1;
    bool operator==(const ConvBlock&) const = default;
};

// Cross-stage-partial block: split conv, bottleneck stack, merge conv.
struct C3k2Block {
    int out_channels = 0;
    int repeats = 1;
    bool use_c3k = false;
    double expansion = 0.5;
    bool operator==(const C3k2Block&) const = default;
};

// Spatial pyramid pooling: 1x1 conv, chained max-pools, concat, 1x1 conv.
struct SppfBlock {
    int out_channels = 0;
    int pool_kernel = 5;
    bool operator==(const SppfBlock&) const = default;
};

// Partial spatial attention block at the deepest stage.
struct C2psaBlock {
    int out_channels = 0;
    int repeats = 1;
    bool operator==(const C2psaBlock&) const = default;
};

// Nearest-neighbor spatial upsample.
struct UpsampleBlock {
    int scale = 2;
    bool operator==(const UpsampleBlock&) const = default;
};

// Channel concatenation; inputs must agree spatially.
struct ConcatBlock {
    bool operator==(const ConcatBlock&) const = default;
};

// Anchor-free detection head. One box tower and one class tower per
// input scale; head inputs live in Node::inputs, ordered by increasing
// stride. Tower widths are fixed when the reference graph is built and
// survive pruning unchanged, so removing a head never rescales the
// remaining towers.
struct DetectBlock {
    int num_classes = 80;
    int box_width = 16;
    int cls_width = 80;
    bool operator==(const DetectBlock&) const = default;
};

using BlockKind = std::variant<ConvBlock, C3k2Block, SppfBlock, C2psaBlock,
                               UpsampleBlock, ConcatBlock, DetectBlock>;

std::string_view kind_name(const BlockKind& kind);

struct Node {
    int id = 0;
    BlockKind kind;
    std::vector<int> inputs;
    // True for blocks inserted by shape repair rather than the builder.
    bool repair = false;

    bool operator==(const Node&) const = default;
};

// Topologically ordered node list. Every input id is numerically smaller
// than its consumer's id and nodes appear in ascending id order, so list
// order and id order coincide. Graphs are immutable after construction;
// transformations return fresh graphs.
struct ArchGraph {
    Variant variant = Variant::Full;
    int input_channels = 3;
    std::vector<Node> nodes;

    bool operator==(const ArchGraph&) const = default;

    const Node* find(int id) const;
    const Node& at(int id) const;  // throws GraphError when absent
    bool has(int id) const { return find(id) != nullptr; }

    // The Detect node, or nullptr when the graph has none / several.
    const Node* detect() const;
};

class GraphError : public std::runtime_error {
  public:
    GraphError(int node_id, const std::string& message)
        : std::runtime_error(message), node_id_(node_id) {}
    int node_id() const noexcept { return node_id_; }

  private:
    int node_id_;
};

}  // namespace yoloslim
