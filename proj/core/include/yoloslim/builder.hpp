#pragma once

#include "yoloslim/graph.hpp"

namespace yoloslim {

// Width/depth multipliers applied to the family's base channel and
// repeat table. Defaults are the nano scale; other scales are accepted
// but carry no golden coverage.
struct ScaleConfig {
    double width = 0.25;
    double depth = 0.50;
    int max_channels = 1024;
};

// Channel count after width scaling, rounded to a multiple of 8.
int scaled_channels(int base, const ScaleConfig& scale);

// Repeat count after depth scaling (at least 1).
int scaled_repeats(int base, const ScaleConfig& scale);

/// Builds the reference detection graph: backbone b0–b10 (Conv, Conv,
/// C3k2, Conv, C3k2, Conv, C3k2, Conv, C3k2, SPPF, C2PSA), neck b11–b22
/// (Upsample, Concat, C3k2, Upsample, Concat, C3k2, Conv, Concat, C3k2,
/// Conv, Concat, C3k2), and a Detect node over [b16, b19, b22]
/// (strides 8/16/32). Detect tower widths are derived once here from
/// the stride-8 input width and pinned into the DetectBlock.
ArchGraph build_yolov11n(int num_classes = 80, const ScaleConfig& scale = {});

}  // namespace yoloslim
