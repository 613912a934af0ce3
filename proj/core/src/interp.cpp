#include "yoloslim/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "yoloslim/shapes.hpp"

namespace yoloslim {

std::uint64_t ConvWeights::learnable_scalars() const {
    return w.size() + bias.size() + bn_scale.size() + bn_shift.size();
}

std::uint64_t ConvWeights::buffer_scalars() const {
    return bn_mean.size() + bn_var.size();
}

std::uint64_t WeightStore::learnable_scalars() const {
    std::uint64_t total = 0;
    for (const auto& [id, convs] : per_node) {
        for (const ConvWeights& cw : convs) total += cw.learnable_scalars();
    }
    return total;
}

std::uint64_t WeightStore::buffer_scalars() const {
    std::uint64_t total = 0;
    for (const auto& [id, convs] : per_node) {
        for (const ConvWeights& cw : convs) total += cw.buffer_scalars();
    }
    return total;
}

bool WeightStore::operator==(const WeightStore& o) const {
    if (seed != o.seed || per_node.size() != o.per_node.size()) return false;
    for (const auto& [id, convs] : per_node) {
        auto it = o.per_node.find(id);
        if (it == o.per_node.end() || it->second.size() != convs.size()) {
            return false;
        }
        for (std::size_t i = 0; i < convs.size(); ++i) {
            const ConvWeights& a = convs[i];
            const ConvWeights& b = it->second[i];
            if (a.w != b.w || a.bias != b.bias || a.bn_scale != b.bn_scale ||
                a.bn_shift != b.bn_shift || a.bn_mean != b.bn_mean ||
                a.bn_var != b.bn_var) {
                return false;
            }
        }
    }
    return true;
}

WeightStore instantiate(const ArchGraph& g, std::uint64_t seed) {
    ValidationReport validation = validate(g);
    if (!validation.valid()) {
        throw GraphError(validation.violations.front().node_id,
                         "cannot instantiate an invalid graph:\n" +
                             validation.to_string());
    }

    // Channel widths are resolution-independent; probe at the canonical
    // input purely to resolve producer channels.
    const TensorShape probe{g.input_channels, 640, 640};
    const ShapeMap shapes = propagate_shapes(g, probe);

    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    auto draw = [&rng]() {
        return static_cast<float>(rng() * (0.2 / 4294967296.0) - 0.1);
    };

    WeightStore store;
    store.seed = seed;
    for (const Node& node : g.nodes) {
        const NodeEnv env = node_env(node, shapes, probe);
        std::vector<ConvWeights> convs;
        for (const ConvPrim& prim : enumerate_convs(node, env)) {
            ConvWeights cw;
            cw.prim = prim;
            const std::size_t wlen = static_cast<std::size_t>(prim.kernel) *
                                     prim.kernel * (prim.in_ch / prim.groups) *
                                     prim.out_ch;
            cw.w.resize(wlen);
            for (float& v : cw.w) v = draw();
            if (prim.bias) {
                cw.bias.resize(prim.out_ch);
                for (float& v : cw.bias) v = draw();
            }
            if (prim.bn) {
                cw.bn_scale.assign(prim.out_ch, 1.0f);
                cw.bn_shift.assign(prim.out_ch, 0.0f);
                cw.bn_mean.assign(prim.out_ch, 0.0f);
                cw.bn_var.assign(prim.out_ch, 1.0f);
            }
            convs.push_back(std::move(cw));
        }
        store.per_node[node.id] = std::move(convs);
    }
    return store;
}

namespace {

constexpr float kBnEps = 1e-5f;

float silu(float x) { return x / (1.0f + std::exp(-x)); }

// Same-padded grouped convolution; BatchNorm, SiLU and bias applied as
// the prim dictates.
Tensor run_conv(const Tensor& x, const ConvWeights& cw) {
    const ConvPrim& p = cw.prim;
    const int k = p.kernel, pad = p.kernel / 2, stride = p.stride;
    const int oh = (x.shape.height + stride - 1) / stride;
    const int ow = (x.shape.width + stride - 1) / stride;
    const int in_per_group = p.in_ch / p.groups;
    const int out_per_group = p.out_ch / p.groups;

    Tensor out(TensorShape{p.out_ch, oh, ow});
    for (int oc = 0; oc < p.out_ch; ++oc) {
        const int group = oc / out_per_group;
        const int ic0 = group * in_per_group;
        const float* wbase =
            cw.w.data() + static_cast<std::size_t>(oc) * in_per_group * k * k;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                float acc = p.bias ? cw.bias[oc] : 0.0f;
                for (int ic = 0; ic < in_per_group; ++ic) {
                    const float* wrow = wbase + static_cast<std::size_t>(ic) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= x.shape.height) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * stride + kx - pad;
                            if (ix < 0 || ix >= x.shape.width) continue;
                            acc += wrow[ky * k + kx] * x.at(ic0 + ic, iy, ix);
                        }
                    }
                }
                if (p.bn) {
                    acc = cw.bn_scale[oc] * (acc - cw.bn_mean[oc]) /
                              std::sqrt(cw.bn_var[oc] + kBnEps) +
                          cw.bn_shift[oc];
                }
                if (p.act) acc = silu(acc);
                out.at(oc, oy, ox) = acc;
            }
        }
    }
    return out;
}

// Stride-1 same-padded max pool; out-of-bounds window cells are ignored.
Tensor run_maxpool(const Tensor& x, int k) {
    const int pad = k / 2;
    Tensor out(x.shape);
    for (int c = 0; c < x.shape.channels; ++c) {
        for (int oy = 0; oy < x.shape.height; ++oy) {
            for (int ox = 0; ox < x.shape.width; ++ox) {
                float best = -std::numeric_limits<float>::infinity();
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = oy + ky - pad;
                    if (iy < 0 || iy >= x.shape.height) continue;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = ox + kx - pad;
                        if (ix < 0 || ix >= x.shape.width) continue;
                        best = std::max(best, x.at(c, iy, ix));
                    }
                }
                out.at(c, oy, ox) = best;
            }
        }
    }
    return out;
}

Tensor run_upsample(const Tensor& x, int scale) {
    Tensor out(TensorShape{x.shape.channels, x.shape.height * scale,
                           x.shape.width * scale});
    for (int c = 0; c < x.shape.channels; ++c) {
        for (int y = 0; y < out.shape.height; ++y) {
            for (int xpos = 0; xpos < out.shape.width; ++xpos) {
                out.at(c, y, xpos) = x.at(c, y / scale, xpos / scale);
            }
        }
    }
    return out;
}

Tensor slice_channels(const Tensor& x, int from, int to) {
    Tensor out(TensorShape{to - from, x.shape.height, x.shape.width});
    const std::size_t plane =
        static_cast<std::size_t>(x.shape.height) * x.shape.width;
    std::copy(x.data.begin() + from * plane, x.data.begin() + to * plane,
              out.data.begin());
    return out;
}

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
    int channels = 0;
    for (const Tensor* t : parts) channels += t->shape.channels;
    Tensor out(TensorShape{channels, parts[0]->shape.height,
                           parts[0]->shape.width});
    auto it = out.data.begin();
    for (const Tensor* t : parts) {
        it = std::copy(t->data.begin(), t->data.end(), it);
    }
    return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

const ConvWeights& find_weights(const std::vector<ConvWeights>& weights,
                                const std::string& name, int node_id) {
    for (const ConvWeights& cw : weights) {
        if (cw.prim.name == name) return cw;
    }
    throw GraphError(node_id, "missing weights for " + name);
}

struct NodeRunner {
    const Node& node;
    const std::vector<const Tensor*>& in;
    const std::vector<ConvWeights>& weights;

    const ConvWeights& lookup(const std::string& name) const {
        return find_weights(weights, name, node.id);
    }

    Tensor bottleneck(const std::string& prefix, const Tensor& x) const {
        Tensor y = run_conv(run_conv(x, lookup(prefix + ".cv1")),
                            lookup(prefix + ".cv2"));
        add_inplace(y, x);  // shortcut: widths match by construction
        return y;
    }

    Tensor c3k(const std::string& prefix, const Tensor& x) const {
        Tensor y1 = run_conv(x, lookup(prefix + ".cv1"));
        y1 = bottleneck(prefix + ".m0", y1);
        y1 = bottleneck(prefix + ".m1", y1);
        Tensor y2 = run_conv(x, lookup(prefix + ".cv2"));
        return run_conv(concat_channels({&y1, &y2}), lookup(prefix + ".cv3"));
    }

    Tensor operator()(const ConvBlock&) const {
        return run_conv(*in[0], lookup("conv"));
    }

    Tensor operator()(const C3k2Block& b) const {
        const int c = static_cast<int>(b.out_channels * b.expansion);
        Tensor y = run_conv(*in[0], lookup("cv1"));
        std::vector<Tensor> ys;
        ys.push_back(slice_channels(y, 0, c));
        ys.push_back(slice_channels(y, c, 2 * c));
        for (int i = 0; i < b.repeats; ++i) {
            const std::string prefix = "m" + std::to_string(i);
            ys.push_back(b.use_c3k ? c3k(prefix, ys.back())
                                   : bottleneck(prefix, ys.back()));
        }
        std::vector<const Tensor*> parts;
        for (const Tensor& t : ys) parts.push_back(&t);
        return run_conv(concat_channels(parts), lookup("cv2"));
    }

    Tensor operator()(const SppfBlock& b) const {
        Tensor y = run_conv(*in[0], lookup("cv1"));
        Tensor p1 = run_maxpool(y, b.pool_kernel);
        Tensor p2 = run_maxpool(p1, b.pool_kernel);
        Tensor p3 = run_maxpool(p2, b.pool_kernel);
        return run_conv(concat_channels({&y, &p1, &p2, &p3}), lookup("cv2"));
    }

    // Single-head scaled dot-product attention over flattened positions.
    Tensor attention(const std::string& prefix, const Tensor& x) const {
        const int c = x.shape.channels;
        const int kd = c / 2;
        const int n = x.shape.height * x.shape.width;
        Tensor qkv = run_conv(x, lookup(prefix + ".qkv"));
        // Rows 0..kd: q, kd..2kd: k, 2kd..2kd+c: v (planes are already
        // flat position-major storage).
        auto plane = [&](const Tensor& t, int channel) {
            return t.data.data() + static_cast<std::size_t>(channel) * n;
        };
        const float scale = 1.0f / std::sqrt(static_cast<float>(kd));

        std::vector<float> scores(static_cast<std::size_t>(n) * n, 0.0f);
        for (int d = 0; d < kd; ++d) {
            const float* q = plane(qkv, d);
            const float* k = plane(qkv, kd + d);
            for (int i = 0; i < n; ++i) {
                float* row = scores.data() + static_cast<std::size_t>(i) * n;
                const float qi = q[i];
                for (int j = 0; j < n; ++j) row[j] += qi * k[j];
            }
        }
        for (int i = 0; i < n; ++i) {
            float* row = scores.data() + static_cast<std::size_t>(i) * n;
            float peak = -std::numeric_limits<float>::infinity();
            for (int j = 0; j < n; ++j) {
                row[j] *= scale;
                peak = std::max(peak, row[j]);
            }
            float sum = 0.0f;
            for (int j = 0; j < n; ++j) {
                row[j] = std::exp(row[j] - peak);
                sum += row[j];
            }
            for (int j = 0; j < n; ++j) row[j] /= sum;
        }

        Tensor v = slice_channels(qkv, 2 * kd, 2 * kd + c);
        Tensor attended(x.shape);
        for (int d = 0; d < c; ++d) {
            const float* vrow = plane(v, d);
            float* orow = attended.data.data() + static_cast<std::size_t>(d) * n;
            for (int i = 0; i < n; ++i) {
                const float* srow = scores.data() + static_cast<std::size_t>(i) * n;
                float acc = 0.0f;
                for (int j = 0; j < n; ++j) acc += srow[j] * vrow[j];
                orow[i] = acc;
            }
        }
        add_inplace(attended, run_conv(v, lookup(prefix + ".pe")));
        return run_conv(attended, lookup(prefix + ".proj"));
    }

    Tensor operator()(const C2psaBlock& b) const {
        const int c = in[0]->shape.channels / 2;
        Tensor y = run_conv(*in[0], lookup("cv1"));
        Tensor a = slice_channels(y, 0, c);
        Tensor bpart = slice_channels(y, c, 2 * c);
        for (int i = 0; i < b.repeats; ++i) {
            const std::string prefix = "m" + std::to_string(i);
            Tensor att = attention(prefix + ".attn", bpart);
            add_inplace(bpart, att);
            Tensor f = run_conv(run_conv(bpart, lookup(prefix + ".ffn.0")),
                                lookup(prefix + ".ffn.1"));
            add_inplace(bpart, f);
        }
        return run_conv(concat_channels({&a, &bpart}), lookup("cv2"));
    }

    Tensor operator()(const UpsampleBlock& b) const {
        return run_upsample(*in[0], b.scale);
    }

    Tensor operator()(const ConcatBlock&) const {
        for (const Tensor* t : in) {
            if (t->shape.height != in[0]->shape.height ||
                t->shape.width != in[0]->shape.width) {
                throw ShapeMismatchError(node.id,
                                         "concat inputs disagree spatially");
            }
        }
        return concat_channels(in);
    }

    Tensor operator()(const DetectBlock&) const {
        throw GraphError(node.id, "detect runs through run_detect_head");
    }
};

Tensor run_detect_head(const Node& det, const std::vector<ConvWeights>& weights,
                       std::size_t head, const Tensor& x) {
    auto w = [&](const std::string& name) -> const ConvWeights& {
        return find_weights(weights, "head" + std::to_string(head) + name,
                            det.id);
    };
    Tensor box = run_conv(x, w(".box.0"));
    box = run_conv(box, w(".box.1"));
    box = run_conv(box, w(".box.2"));
    Tensor cls = run_conv(x, w(".cls.0"));
    cls = run_conv(cls, w(".cls.1"));
    cls = run_conv(cls, w(".cls.2"));
    cls = run_conv(cls, w(".cls.3"));
    cls = run_conv(cls, w(".cls.4"));
    return concat_channels({&box, &cls});
}

void require_finite(int node_id, const Tensor& t) {
    for (float v : t.data) {
        if (!std::isfinite(v)) {
            throw NonFiniteError(node_id, "non-finite value at b" +
                                              std::to_string(node_id));
        }
    }
}

std::vector<HeadOutput> forward_impl(const ArchGraph& g, const WeightStore& w,
                                     const Tensor& input,
                                     std::map<int, Tensor>* capture) {
    if (input.shape.channels != g.input_channels) {
        throw GraphError(-1, "input has " + std::to_string(input.shape.channels) +
                                 " channels, graph expects " +
                                 std::to_string(g.input_channels));
    }
    if (input.shape.height % 32 != 0 || input.shape.width % 32 != 0) {
        throw IndivisibleInputError("input " + to_string(input.shape) +
                                    " not divisible by 32");
    }

    std::map<int, Tensor> values;
    std::vector<HeadOutput> heads;
    for (const Node& node : g.nodes) {
        auto weights_it = w.per_node.find(node.id);
        if (weights_it == w.per_node.end()) {
            throw GraphError(node.id, "weight store has no entry for b" +
                                          std::to_string(node.id));
        }
        std::vector<const Tensor*> in;
        if (node.inputs.empty()) {
            in.push_back(&input);
        } else {
            for (int id : node.inputs) in.push_back(&values.at(id));
        }

        if (std::holds_alternative<DetectBlock>(node.kind)) {
            for (std::size_t h = 0; h < in.size(); ++h) {
                HeadOutput out;
                out.source_node_id = node.inputs[h];
                out.stride = input.shape.height / in[h]->shape.height;
                out.tensor = run_detect_head(node, weights_it->second, h, *in[h]);
                require_finite(node.id, out.tensor);
                heads.push_back(std::move(out));
            }
            if (capture && !heads.empty()) {
                (*capture)[node.id] = heads.front().tensor;
            }
            continue;
        }

        Tensor out = std::visit(NodeRunner{node, in, weights_it->second},
                                node.kind);
        require_finite(node.id, out);
        if (capture) (*capture)[node.id] = out;
        values[node.id] = std::move(out);
    }
    if (heads.empty()) {
        throw GraphError(-1, "graph has no Detect outputs");
    }
    return heads;
}

}  // namespace

std::vector<HeadOutput> forward(const ArchGraph& g, const WeightStore& w,
                                const Tensor& input) {
    return forward_impl(g, w, input, nullptr);
}

ShapeCheckReport check_against_shapes(const ArchGraph& g, const WeightStore& w,
                                      const Tensor& input) {
    ShapeCheckReport report;
    std::map<int, Tensor> captured;
    ShapeMap predicted;
    try {
        predicted = propagate_shapes(g, input.shape);
        forward_impl(g, w, input, &captured);
    } catch (const GraphError& e) {
        report.pass = false;
        report.first_divergence_node = e.node_id();
        report.detail = e.what();
        return report;
    }
    for (const auto& [id, shape] : predicted) {
        auto it = captured.find(id);
        if (it == captured.end()) {
            report.pass = false;
            report.first_divergence_node = id;
            report.detail = "b" + std::to_string(id) + " produced no tensor";
            return report;
        }
        if (!(it->second.shape == shape)) {
            report.pass = false;
            report.first_divergence_node = id;
            report.detail = "b" + std::to_string(id) + " predicted " +
                            to_string(shape) + " but executed " +
                            to_string(it->second.shape);
            return report;
        }
    }
    return report;
}

std::uint64_t output_checksum(const std::vector<HeadOutput>& heads) {
    std::uint64_t hash = 14695981039346656037ull;
    auto mix = [&hash](const float value) {
        std::uint32_t bits;
        std::memcpy(&bits, &value, sizeof(bits));
        for (int shift = 0; shift < 32; shift += 8) {
            hash ^= (bits >> shift) & 0xffu;
            hash *= 1099511628211ull;
        }
    };
    for (const HeadOutput& head : heads) {
        for (float v : head.tensor.data) mix(v);
    }
    return hash;
}

Tensor make_test_input(int channels, int height, int width) {
    Tensor t(TensorShape{channels, height, width});
    for (int c = 0; c < channels; ++c) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                t.at(c, y, x) = static_cast<float>(((c * 31 + y) * 31 + x) % 255) / 255.0f;
            }
        }
    }
    return t;
}

}  // namespace yoloslim
