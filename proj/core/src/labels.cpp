#include "yoloslim/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <vector>

namespace yoloslim {

namespace {

constexpr double kCoordTolerance = 1e-6;

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

double parse_coord(std::string_view token, std::string_view what) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                     value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw MalformedLineError("token '" + std::string(token) +
                                 "' is not a number (" + std::string(what) + ")");
    }
    if (value < -kCoordTolerance || value > 1.0 + kCoordTolerance) {
        throw OutOfRangeError(std::string(what) + " = " + std::string(token) +
                              " outside [0, 1]");
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace

LabelRecord parse_label_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = split_tokens(line);
    if (tokens.size() != 5) {
        throw MalformedLineError("expected 5 tokens, got " +
                                 std::to_string(tokens.size()));
    }
    LabelRecord rec;
    auto [ptr, ec] = std::from_chars(
        tokens[0].data(), tokens[0].data() + tokens[0].size(), rec.class_id);
    if (ec != std::errc{} || ptr != tokens[0].data() + tokens[0].size() ||
        rec.class_id < 0) {
        throw MalformedLineError("class id '" + std::string(tokens[0]) +
                                 "' is not a non-negative integer");
    }
    rec.cx = parse_coord(tokens[1], "cx");
    rec.cy = parse_coord(tokens[2], "cy");
    rec.w = parse_coord(tokens[3], "w");
    rec.h = parse_coord(tokens[4], "h");
    return rec;
}

double object_area_px(const LabelRecord& rec, double img_w, double img_h) {
    return rec.w * img_w * rec.h * img_h;
}

ObjectSizeClass classify_size(double area_px) {
    if (area_px <= kSmallAreaMax) return ObjectSizeClass::Small;
    if (area_px <= kMediumAreaMax) return ObjectSizeClass::Medium;
    return ObjectSizeClass::Large;
}

namespace {

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n';
    });
}

std::uint32_t read_be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::uint32_t read_be16(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 8) | std::uint32_t(p[1]);
}

std::optional<std::pair<int, int>> png_dimensions(std::ifstream& file) {
    unsigned char header[24];
    if (!file.read(reinterpret_cast<char*>(header), sizeof(header))) {
        return std::nullopt;
    }
    // IHDR is mandatory first: width and height at offsets 16 and 20.
    return std::pair<int, int>{static_cast<int>(read_be32(header + 16)),
                               static_cast<int>(read_be32(header + 20))};
}

std::optional<std::pair<int, int>> jpeg_dimensions(std::ifstream& file) {
    // Walk the marker stream up to a start-of-frame segment.
    auto next_byte = [&file](unsigned char& out) {
        int c = file.get();
        if (c == EOF) return false;
        out = static_cast<unsigned char>(c);
        return true;
    };
    unsigned char b = 0;
    while (next_byte(b)) {
        if (b != 0xFF) return std::nullopt;
        unsigned char marker = 0xFF;
        while (marker == 0xFF) {
            if (!next_byte(marker)) return std::nullopt;  // skip fill bytes
        }
        if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD7) ||
            marker == 0x01) {
            continue;  // no payload
        }
        if (marker == 0xDA || marker == 0xD9) return std::nullopt;
        unsigned char len[2];
        if (!file.read(reinterpret_cast<char*>(len), 2)) return std::nullopt;
        const std::uint32_t length = read_be16(len);
        if (length < 2) return std::nullopt;
        const bool sof = (marker >= 0xC0 && marker <= 0xCF) && marker != 0xC4 &&
                         marker != 0xC8 && marker != 0xCC;
        if (sof) {
            unsigned char frame[5];  // precision, height, width
            if (!file.read(reinterpret_cast<char*>(frame), sizeof(frame))) {
                return std::nullopt;
            }
            return std::pair<int, int>{static_cast<int>(read_be16(frame + 3)),
                                       static_cast<int>(read_be16(frame + 1))};
        }
        file.seekg(length - 2, std::ios::cur);
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::pair<int, int>> read_image_dimensions(
    const std::filesystem::path& image) {
    std::ifstream file(image, std::ios::binary);
    if (!file) return std::nullopt;
    unsigned char magic[2];
    if (!file.read(reinterpret_cast<char*>(magic), 2)) return std::nullopt;
    file.seekg(0);
    static const unsigned char png_magic[2] = {0x89, 0x50};
    if (magic[0] == png_magic[0] && magic[1] == png_magic[1]) {
        return png_dimensions(file);
    }
    if (magic[0] == 0xFF && magic[1] == 0xD8) {
        file.seekg(2);
        return jpeg_dimensions(file);
    }
    return std::nullopt;
}

namespace {

std::optional<std::pair<int, int>> sidecar_dimensions(
    const std::filesystem::path& image_dir, const std::filesystem::path& label) {
    static const char* extensions[] = {".png", ".jpg", ".jpeg", ".PNG", ".JPG"};
    for (const char* ext : extensions) {
        const auto candidate = image_dir / (label.stem().string() + ext);
        if (std::filesystem::exists(candidate)) {
            return read_image_dimensions(candidate);
        }
    }
    return std::nullopt;
}

}  // namespace

DatasetProfile profile_directory(const std::filesystem::path& dir,
                                 const ImageSizePolicy& policy,
                                 const ProfileOptions& options) {
    if (!std::filesystem::is_directory(dir)) {
        throw DirNotFoundError("label directory not found: " + dir.string());
    }

    DatasetProfile profile;
    profile.policy = policy;
    if (policy.kind == ImageSizePolicy::Kind::FixedSize) {
        profile.assumed_image_area =
            static_cast<double>(policy.width) * policy.height;
    }

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    // Directory enumeration order is filesystem-dependent; sorting keeps
    // strict-mode error reporting deterministic.
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
        double img_w = policy.width, img_h = policy.height;
        if (policy.kind == ImageSizePolicy::Kind::SidecarImages) {
            auto dims = sidecar_dimensions(policy.image_dir, path);
            if (!dims) {
                if (options.strict) {
                    throw LabelError("no readable sidecar image for " +
                                     path.string());
                }
                ++profile.files_failed;
                continue;
            }
            img_w = dims->first;
            img_h = dims->second;
        }

        std::ifstream file(path);
        if (!file) {
            if (options.strict) {
                throw LabelError("cannot open " + path.string());
            }
            ++profile.files_failed;
            continue;
        }
        ++profile.files_scanned;

        std::string line;
        std::uint64_t line_no = 0;
        while (std::getline(file, line)) {
            ++line_no;
            if (blank(line)) continue;
            LabelRecord rec;
            try {
                rec = parse_label_line(line);
            } catch (const LabelError& e) {
                if (options.strict) {
                    throw LabelError(path.string() + ":" +
                                     std::to_string(line_no) + ": " + e.what());
                }
                ++profile.lines_rejected;
                continue;
            }
            const double area = object_area_px(rec, img_w, img_h);
            if (area == 0.0) ++profile.degenerate_objects;
            switch (classify_size(area)) {
                case ObjectSizeClass::Small: ++profile.count_small; break;
                case ObjectSizeClass::Medium: ++profile.count_medium; break;
                case ObjectSizeClass::Large: ++profile.count_large; break;
            }
            ++profile.total_objects;
        }
    }
    return profile;
}

std::set<ObjectSizeClass> significant_classes(const DatasetProfile& profile,
                                              double theta) {
    std::set<ObjectSizeClass> classes;
    if (profile.empty()) return classes;
    const double total = static_cast<double>(profile.total_objects);
    for (ObjectSizeClass c : {ObjectSizeClass::Small, ObjectSizeClass::Medium,
                              ObjectSizeClass::Large}) {
        if (static_cast<double>(profile.count_of(c)) / total >= theta) {
            classes.insert(c);
        }
    }
    return classes;
}

Variant recommend_variant(const DatasetProfile& profile, double theta) {
    if (profile.empty()) {
        throw EmptyProfileError("profile holds no classified objects");
    }
    std::set<ObjectSizeClass> s = significant_classes(profile, theta);
    if (s.empty()) {
        // Nothing reaches theta: fall back to the dominant class, ties
        // resolved toward the larger size class.
        ObjectSizeClass best = ObjectSizeClass::Large;
        for (ObjectSizeClass c : {ObjectSizeClass::Medium, ObjectSizeClass::Small}) {
            if (profile.count_of(c) > profile.count_of(best)) best = c;
        }
        s = {best};
    }
    const bool small = s.count(ObjectSizeClass::Small) != 0;
    const bool medium = s.count(ObjectSizeClass::Medium) != 0;
    const bool large = s.count(ObjectSizeClass::Large) != 0;
    if (small && medium && large) return Variant::Full;
    if (small && medium) return Variant::SM;
    if (medium && large) return Variant::ML;
    if (small && large) return Variant::SL;
    if (small) return Variant::Small;
    if (medium) return Variant::Medium;
    return Variant::Large;
}

}  // namespace yoloslim
