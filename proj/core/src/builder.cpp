#include "yoloslim/builder.hpp"

#include <algorithm>
#include <cmath>

namespace yoloslim {

namespace {

// Round up to the nearest multiple of 8, the family's channel alignment.
int make_divisible(double x, int divisor = 8) {
    return static_cast<int>(std::ceil(x / divisor)) * divisor;
}

}  // namespace

int scaled_channels(int base, const ScaleConfig& scale) {
    double capped = std::min(base, scale.max_channels) * scale.width;
    return make_divisible(capped);
}

int scaled_repeats(int base, const ScaleConfig& scale) {
    return std::max(1, static_cast<int>(std::lround(base * scale.depth)));
}

ArchGraph build_yolov11n(int num_classes, const ScaleConfig& scale) {
    if (num_classes < 1) {
        throw GraphError(-1, "num_classes must be at least 1");
    }

    ArchGraph g;
    g.variant = Variant::Full;
    g.input_channels = 3;
    g.nodes.reserve(24);

    auto ch = [&](int base) { return scaled_channels(base, scale); };
    const int reps = scaled_repeats(2, scale);

    auto add = [&](BlockKind kind, std::vector<int> inputs) {
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(Node{id, std::move(kind), std::move(inputs), false});
        return id;
    };
    auto conv = [&](int base_out, int stride, int input) {
        return add(ConvBlock{ch(base_out), 3, stride}, {input});
    };
    auto c3k2 = [&](int base_out, bool use_c3k, double e, int input) {
        return add(C3k2Block{ch(base_out), reps, use_c3k, e}, {input});
    };

    // Backbone: strides double at b0, b1, b3, b5, b7 (P1..P5).
    // b0 is the graph source and reads the image directly.
    int b0 = add(ConvBlock{ch(64), 3, 2}, {});
    int b1 = conv(128, 2, b0);
    int b2 = c3k2(256, false, 0.25, b1);
    int b3 = conv(256, 2, b2);
    int b4 = c3k2(512, false, 0.25, b3);
    int b5 = conv(512, 2, b4);
    int b6 = c3k2(512, true, 0.5, b5);
    int b7 = conv(1024, 2, b6);
    int b8 = c3k2(1024, true, 0.5, b7);
    int b9 = add(SppfBlock{ch(1024), 5}, {b8});
    int b10 = add(C2psaBlock{ch(1024), reps}, {b9});

    // Neck: top-down fusion to P3, then bottom-up back to P5.
    int b11 = add(UpsampleBlock{2}, {b10});
    int b12 = add(ConcatBlock{}, {b11, b6});
    int b13 = c3k2(512, false, 0.5, b12);
    int b14 = add(UpsampleBlock{2}, {b13});
    int b15 = add(ConcatBlock{}, {b14, b4});
    int b16 = c3k2(256, false, 0.5, b15);
    int b17 = conv(256, 2, b16);
    int b18 = add(ConcatBlock{}, {b17, b13});
    int b19 = c3k2(512, false, 0.5, b18);
    int b20 = conv(512, 2, b19);
    int b21 = add(ConcatBlock{}, {b20, b10});
    int b22 = c3k2(1024, true, 0.5, b21);

    // Tower widths derive from the stride-8 feature width once, here;
    // pruning never re-derives them.
    const int p3_channels = ch(256);
    DetectBlock detect;
    detect.num_classes = num_classes;
    detect.box_width = std::max(16, p3_channels / 4);
    detect.cls_width = std::max(p3_channels, std::min(num_classes, 100));
    add(detect, {b16, b19, b22});

    return g;
}

}  // namespace yoloslim
