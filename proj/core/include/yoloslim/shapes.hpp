#pragma once

#include <map>
#include <string>
#include <vector>

#include "yoloslim/graph.hpp"

namespace yoloslim {

/// Concat inputs disagree on height or width; node_id() is the Concat.
class ShapeMismatchError : public GraphError {
    using GraphError::GraphError;
};

/// Input height or width not divisible by 32.
class IndivisibleInputError : public GraphError {
  public:
    explicit IndivisibleInputError(const std::string& message)
        : GraphError(-1, message) {}
};

using ShapeMap = std::map<int, TensorShape>;

/// Static shape propagation. Stride-2 Conv halves H and W, Upsample
/// multiplies by its scale, Concat sums channels and requires equal
/// spatial dims, composite blocks preserve H and W and set channels to
/// out_channels. The Detect node maps to its first head input's output
/// shape; per-head shapes come from detect_output_shapes. Pure: equal
/// graphs and inputs give equal maps.
ShapeMap propagate_shapes(const ArchGraph& g, const TensorShape& input);

/// Raw output shape per detection head, in head order: channels
/// 4 + num_classes at each head input's spatial size.
std::vector<TensorShape> detect_output_shapes(const ArchGraph& g,
                                              const ShapeMap& shapes);

/// input.height / feature height, one entry per Detect input.
std::vector<int> head_strides(const ArchGraph& g, const ShapeMap& shapes,
                              const TensorShape& input);

struct Violation {
    int node_id = -1;
    // Stable machine-readable tag, e.g. "forward-reference", "dead-block".
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
    bool has(const std::string& code) const;
    std::string to_string() const;
};

/// Structural checks (unique ascending ids, input references, arities,
/// exactly one Detect, reachability from b0, every block on a path to
/// Detect, kind parameter ranges) plus shape propagation at a canonical
/// 640x640 probe. Violations are data, not exceptions.
ValidationReport validate(const ArchGraph& g);

}  // namespace yoloslim
