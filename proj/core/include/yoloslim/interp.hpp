#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "yoloslim/expand.hpp"
#include "yoloslim/graph.hpp"
#include "yoloslim/shapes.hpp"

namespace yoloslim {

// Dense fp32 tensor, row-major (c, h, w).
struct Tensor {
    TensorShape shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(TensorShape s)
        : shape(s), data(static_cast<std::size_t>(s.elements()), 0.0f) {}

    float& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
    }
    float at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
    }
};

// Weights for one primitive conv. BatchNorm starts at identity (scale 1,
// shift 0, running mean 0, var 1) and its buffers are not learnable.
struct ConvWeights {
    ConvPrim prim;
    std::vector<float> w;         // [out][in/groups][k][k]
    std::vector<float> bias;      // out, only when prim.bias
    std::vector<float> bn_scale;  // out, only when prim.bn
    std::vector<float> bn_shift;
    std::vector<float> bn_mean;   // buffer
    std::vector<float> bn_var;    // buffer

    std::uint64_t learnable_scalars() const;
    std::uint64_t buffer_scalars() const;
};

// All weights of a graph. Regeneration from the same seed is
// bit-identical; the learnable scalar count is the cost model's
// parameter oracle.
struct WeightStore {
    std::uint64_t seed = 0;
    // node id -> conv weights in enumeration order
    std::map<int, std::vector<ConvWeights>> per_node;

    std::uint64_t learnable_scalars() const;
    std::uint64_t buffer_scalars() const;
    bool operator==(const WeightStore&) const;
};

/// Draws conv weights uniformly from [-0.1, 0.1] with a single mt19937
/// stream seeded directly with `seed`: each scalar is
/// u32 * (0.2 / 2^32) - 0.1, consumed in node order, then prim order,
/// then weights before bias. BatchNorm parameters are identity-set and
/// consume no randomness.
WeightStore instantiate(const ArchGraph& g, std::uint64_t seed);

struct HeadOutput {
    int source_node_id = -1;  // graph id of the feature the head reads
    int stride = 0;
    Tensor tensor;            // channels = 4 + num_classes
};

/// Numerical failure (NaN/Inf) during forward; node_id is the first
/// offending block.
class NonFiniteError : public GraphError {
    using GraphError::GraphError;
};

/// Reference forward pass with naive kernels: same-padded convs,
/// identity BatchNorm folded as configured, SiLU, chained max-pools,
/// nearest upsample, single-head scaled dot-product attention at the
/// deepest stage. Returns one raw map per kept head in head order.
/// Every activation is checked finite.
std::vector<HeadOutput> forward(const ArchGraph& g, const WeightStore& w,
                                const Tensor& input);

struct ShapeCheckReport {
    bool pass = true;
    int first_divergence_node = -1;
    std::string detail;
};

/// Runs forward capturing every intermediate tensor and compares each
/// against propagate_shapes; reports the first divergence.
ShapeCheckReport check_against_shapes(const ArchGraph& g, const WeightStore& w,
                                      const Tensor& input);

/// FNV-1a 64-bit over the little-endian byte encoding of every output
/// float, heads in order. Pins regressions across runs.
std::uint64_t output_checksum(const std::vector<HeadOutput>& heads);

/// Deterministic test input: value = ((c*31 + y)*31 + x) % 255 / 255.
Tensor make_test_input(int channels, int height, int width);

}  // namespace yoloslim
