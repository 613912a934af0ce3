#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "yoloslim/variant.hpp"

namespace yoloslim {

// One annotation line: `class_id cx cy w h`, geometry normalized to [0,1].
struct LabelRecord {
    int class_id = 0;
    double cx = 0.0, cy = 0.0;
    double w = 0.0, h = 0.0;
};

enum class ObjectSizeClass { Small, Medium, Large };

constexpr std::string_view to_string(ObjectSizeClass c) {
    switch (c) {
        case ObjectSizeClass::Small:  return "small";
        case ObjectSizeClass::Medium: return "medium";
        case ObjectSizeClass::Large:  return "large";
    }
    return "?";
}

// Size-category thresholds in px^2: small <= 32^2 < medium <= 96^2 < large.
inline constexpr double kSmallAreaMax = 32.0 * 32.0;
inline constexpr double kMediumAreaMax = 96.0 * 96.0;

class LabelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wrong token count or a non-numeric token.
class MalformedLineError : public LabelError {
    using LabelError::LabelError;
};

/// A coordinate outside [0,1] beyond tolerance 1e-6.
class OutOfRangeError : public LabelError {
    using LabelError::LabelError;
};

class DirNotFoundError : public LabelError {
    using LabelError::LabelError;
};

class EmptyProfileError : public LabelError {
    using LabelError::LabelError;
};

/// Parses one label line. Trailing CR is tolerated; extra tokens
/// (segmentation polygons) are rejected, not truncated. Coordinates
/// within 1e-6 of [0,1] are clamped to the range.
LabelRecord parse_label_line(std::string_view line);

/// Pixel area of a normalized box on an img_w x img_h image.
double object_area_px(const LabelRecord& rec, double img_w, double img_h);

/// Table lookup: area <= 32^2 -> Small, <= 96^2 -> Medium, else Large.
/// Boundaries are inclusive on the lower class.
ObjectSizeClass classify_size(double area_px);

/// How label geometry is converted to pixels: either a fixed assumed
/// image size, or true dimensions read from sidecar image files.
struct ImageSizePolicy {
    enum class Kind { FixedSize, SidecarImages };

    Kind kind = Kind::FixedSize;
    int width = 640;
    int height = 640;
    std::filesystem::path image_dir;

    static ImageSizePolicy fixed(int w = 640, int h = 640) {
        ImageSizePolicy p;
        p.kind = Kind::FixedSize;
        p.width = w;
        p.height = h;
        return p;
    }
    static ImageSizePolicy sidecar(std::filesystem::path image_dir) {
        ImageSizePolicy p;
        p.kind = Kind::SidecarImages;
        p.image_dir = std::move(image_dir);
        return p;
    }
};

struct DatasetProfile {
    std::uint64_t total_objects = 0;
    std::uint64_t count_small = 0;
    std::uint64_t count_medium = 0;
    std::uint64_t count_large = 0;
    std::uint64_t files_scanned = 0;
    std::uint64_t files_failed = 0;
    // Malformed lines skipped in lenient mode.
    std::uint64_t lines_rejected = 0;
    // Zero-area boxes; classified Small and counted here as well.
    std::uint64_t degenerate_objects = 0;
    // width*height used for denormalization; 0 under a sidecar policy.
    double assumed_image_area = 0.0;
    ImageSizePolicy policy;

    bool empty() const { return total_objects == 0; }
    std::uint64_t count_of(ObjectSizeClass c) const {
        switch (c) {
            case ObjectSizeClass::Small:  return count_small;
            case ObjectSizeClass::Medium: return count_medium;
            case ObjectSizeClass::Large:  return count_large;
        }
        return 0;
    }
};

struct ProfileOptions {
    // Lenient mode skips malformed lines and counts them; strict mode
    // throws on the first bad line with file and line context.
    bool strict = false;
};

/// Scans every *.txt file under dir (non-recursive), classifies each
/// parseable object and aggregates counts. Deterministic regardless of
/// directory enumeration order. Zero parseable objects is a valid,
/// distinguished result (profile.empty()), not an error.
DatasetProfile profile_directory(const std::filesystem::path& dir,
                                 const ImageSizePolicy& policy,
                                 const ProfileOptions& options = {});

/// Classes whose share of total_objects is at least theta.
std::set<ObjectSizeClass> significant_classes(const DatasetProfile& profile,
                                              double theta);

/// Picks the variant whose coverage equals the significant set; when no
/// class reaches theta, falls back to the dominant class (ties go to the
/// larger size class).
Variant recommend_variant(const DatasetProfile& profile, double theta = 0.20);

/// Reads image dimensions from a PNG or JPEG header without decoding
/// pixel data. Returns {width, height}.
std::optional<std::pair<int, int>> read_image_dimensions(
    const std::filesystem::path& image);

}  // namespace yoloslim
