#include "yoloslim/expand.hpp"

namespace yoloslim {

std::int64_t ConvPrim::weight_scalars() const {
    std::int64_t w = static_cast<std::int64_t>(kernel) * kernel *
                     (in_ch / groups) * out_ch;
    return w + (bias ? out_ch : 0);
}

NodeEnv node_env(const Node& node, const std::map<int, TensorShape>& shapes,
                 const TensorShape& graph_input) {
    NodeEnv env;
    if (node.inputs.empty()) {
        env.inputs.push_back(graph_input);
    } else {
        for (int id : node.inputs) env.inputs.push_back(shapes.at(id));
    }
    env.output = shapes.at(node.id);
    return env;
}

namespace {

struct Expander {
    const Node& node;
    const NodeEnv& env;
    std::vector<ConvPrim> prims;

    void conv(std::string name, int cin, int cout, int k, int oh, int ow,
              int stride = 1, int groups = 1, bool bn = true, bool act = true,
              bool bias = false) {
        prims.push_back(
            ConvPrim{std::move(name), cin, cout, k, stride, groups, oh, ow,
                     bn, act, bias});
    }

    void bottleneck(const std::string& prefix, int c, int h, int w) {
        conv(prefix + ".cv1", c, c, 3, h, w);
        conv(prefix + ".cv2", c, c, 3, h, w);
    }

    void c3k(const std::string& prefix, int cin, int cout, int h, int w) {
        const int c_ = cout / 2;
        conv(prefix + ".cv1", cin, c_, 1, h, w);
        conv(prefix + ".cv2", cin, c_, 1, h, w);
        bottleneck(prefix + ".m0", c_, h, w);
        bottleneck(prefix + ".m1", c_, h, w);
        conv(prefix + ".cv3", 2 * c_, cout, 1, h, w);
    }

    void operator()(const ConvBlock& b) {
        conv("conv", env.inputs[0].channels, b.out_channels, b.kernel,
             env.output.height, env.output.width, b.stride);
    }

    void operator()(const C3k2Block& b) {
        const int cin = env.inputs[0].channels;
        const int c = static_cast<int>(b.out_channels * b.expansion);
        const int h = env.output.height, w = env.output.width;
        conv("cv1", cin, 2 * c, 1, h, w);
        for (int i = 0; i < b.repeats; ++i) {
            const std::string prefix = "m" + std::to_string(i);
            if (b.use_c3k) {
                c3k(prefix, c, c, h, w);
            } else {
                bottleneck(prefix, c, h, w);
            }
        }
        conv("cv2", (2 + b.repeats) * c, b.out_channels, 1, h, w);
    }

    void operator()(const SppfBlock& b) {
        const int cin = env.inputs[0].channels;
        const int c_ = cin / 2;
        const int h = env.output.height, w = env.output.width;
        conv("cv1", cin, c_, 1, h, w);
        conv("cv2", 4 * c_, b.out_channels, 1, h, w);
    }

    void operator()(const C2psaBlock& b) {
        const int cin = env.inputs[0].channels;
        const int c = cin / 2;
        const int h = env.output.height, w = env.output.width;
        conv("cv1", cin, 2 * c, 1, h, w);
        for (int i = 0; i < b.repeats; ++i) {
            const std::string prefix = "m" + std::to_string(i);
            // Single-head attention: q and k at c/2 channels, v at c.
            conv(prefix + ".attn.qkv", c, 2 * c, 1, h, w, 1, 1, true, false);
            conv(prefix + ".attn.pe", c, c, 3, h, w, 1, c, true, false);
            conv(prefix + ".attn.proj", c, c, 1, h, w, 1, 1, true, false);
            conv(prefix + ".ffn.0", c, 2 * c, 1, h, w);
            conv(prefix + ".ffn.1", 2 * c, c, 1, h, w, 1, 1, true, false);
        }
        conv("cv2", 2 * c, b.out_channels, 1, h, w);
    }

    void operator()(const UpsampleBlock&) {}
    void operator()(const ConcatBlock&) {}

    void operator()(const DetectBlock& b) {
        for (std::size_t i = 0; i < env.inputs.size(); ++i) {
            const int x = env.inputs[i].channels;
            const int h = env.inputs[i].height, w = env.inputs[i].width;
            const std::string head = "head" + std::to_string(i);
            conv(head + ".box.0", x, b.box_width, 3, h, w);
            conv(head + ".box.1", b.box_width, b.box_width, 3, h, w);
            conv(head + ".box.2", b.box_width, 4, 1, h, w, 1, 1, false, false,
                 true);
            conv(head + ".cls.0", x, x, 3, h, w, 1, x);
            conv(head + ".cls.1", x, b.cls_width, 1, h, w);
            conv(head + ".cls.2", b.cls_width, b.cls_width, 3, h, w, 1,
                 b.cls_width);
            conv(head + ".cls.3", b.cls_width, b.cls_width, 1, h, w);
            conv(head + ".cls.4", b.cls_width, b.num_classes, 1, h, w, 1, 1,
                 false, false, true);
        }
    }
};

}  // namespace

std::vector<ConvPrim> enumerate_convs(const Node& node, const NodeEnv& env) {
    Expander e{node, env, {}};
    std::visit(e, node.kind);
    return std::move(e.prims);
}

}  // namespace yoloslim
