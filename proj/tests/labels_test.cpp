#include "yoloslim/labels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "testutil.hpp"

using namespace yoloslim;
using testutil::TempDir;
using testutil::write_file;

TEST(ParseLabelLine, ReadsAllFiveFields) {
    const LabelRecord rec = parse_label_line("3 0.5 0.25 0.1 0.2");
    EXPECT_EQ(rec.class_id, 3);
    EXPECT_DOUBLE_EQ(rec.cx, 0.5);
    EXPECT_DOUBLE_EQ(rec.cy, 0.25);
    EXPECT_DOUBLE_EQ(rec.w, 0.1);
    EXPECT_DOUBLE_EQ(rec.h, 0.2);
}

TEST(ParseLabelLine, ToleratesTrailingCarriageReturn) {
    EXPECT_EQ(parse_label_line("7 0.5 0.5 0.5 0.5\r").class_id, 7);
}

TEST(ParseLabelLine, ToleratesExtraWhitespaceBetweenTokens) {
    EXPECT_EQ(parse_label_line("  1   0.5  0.5\t0.5 0.5").class_id, 1);
}

TEST(ParseLabelLine, ClampsCoordinatesWithinTolerance) {
    EXPECT_DOUBLE_EQ(parse_label_line("0 0.5 0.5 1.0000005 0.5").w, 1.0);
    EXPECT_DOUBLE_EQ(parse_label_line("0 -0.0000005 0.5 0.5 0.5").cx, 0.0);
}

TEST(ParseLabelLine, RejectsCoordinatesBeyondTolerance) {
    EXPECT_THROW(parse_label_line("0 0.5 0.5 1.01 0.5"), OutOfRangeError);
    EXPECT_THROW(parse_label_line("0 -0.2 0.5 0.5 0.5"), OutOfRangeError);
}

TEST(ParseLabelLine, RejectsWrongTokenCount) {
    EXPECT_THROW(parse_label_line("0 0.5 0.5 0.1"), MalformedLineError);
    // Segmentation polygons carry extra coordinates; they are rejected,
    // not truncated to the first five tokens.
    EXPECT_THROW(parse_label_line("0 0.5 0.5 0.1 0.2 0.3 0.4"),
                 MalformedLineError);
    EXPECT_THROW(parse_label_line(""), MalformedLineError);
}

TEST(ParseLabelLine, RejectsNonNumericTokens) {
    EXPECT_THROW(parse_label_line("x 0.5 0.5 0.1 0.2"), MalformedLineError);
    EXPECT_THROW(parse_label_line("0 0.5 half 0.1 0.2"), MalformedLineError);
    EXPECT_THROW(parse_label_line("-1 0.5 0.5 0.1 0.2"), MalformedLineError);
}

TEST(SizeClassifier, ThresholdsAreInclusiveOnTheLowerClass) {
    EXPECT_EQ(classify_size(1023.0), ObjectSizeClass::Small);
    EXPECT_EQ(classify_size(1024.0), ObjectSizeClass::Small);
    EXPECT_EQ(classify_size(1025.0), ObjectSizeClass::Medium);
    EXPECT_EQ(classify_size(9215.0), ObjectSizeClass::Medium);
    EXPECT_EQ(classify_size(9216.0), ObjectSizeClass::Medium);
    EXPECT_EQ(classify_size(9217.0), ObjectSizeClass::Large);
}

TEST(SizeClassifier, AreaDenormalizesAgainstImageSize) {
    LabelRecord rec;
    rec.w = 0.1;
    rec.h = 0.2;
    EXPECT_DOUBLE_EQ(object_area_px(rec, 640, 640), 64.0 * 128.0);
    // The same box on a larger image covers more pixels and can change
    // class: 0.1*1280 x 0.2*1280 = 128x256 px.
    EXPECT_EQ(classify_size(object_area_px(rec, 640, 640)),
              ObjectSizeClass::Medium);
    EXPECT_EQ(classify_size(object_area_px(rec, 1280, 1280)),
              ObjectSizeClass::Large);
}

namespace {

// One line whose box covers side x side pixels on a 640x640 image.
std::string line_with_side(double side) {
    const double norm = side / 640.0;
    return "0 0.5 0.5 " + std::to_string(norm) + " " + std::to_string(norm) +
           "\n";
}

}  // namespace

TEST(ProfileDirectory, CountsObjectsAcrossFiles) {
    TempDir dir;
    write_file(dir / "a.txt", line_with_side(16) + line_with_side(64));
    write_file(dir / "b.txt", line_with_side(128) + line_with_side(24));
    const DatasetProfile p =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_EQ(p.total_objects, 4u);
    EXPECT_EQ(p.count_small, 2u);
    EXPECT_EQ(p.count_medium, 1u);
    EXPECT_EQ(p.count_large, 1u);
    EXPECT_EQ(p.files_scanned, 2u);
    EXPECT_EQ(p.files_failed, 0u);
    EXPECT_EQ(p.lines_rejected, 0u);
    EXPECT_DOUBLE_EQ(p.assumed_image_area, 640.0 * 640.0);
}

TEST(ProfileDirectory, IgnoresNonLabelFilesAndBlankLines) {
    TempDir dir;
    write_file(dir / "a.txt", "\n" + line_with_side(16) + "   \n");
    write_file(dir / "notes.md", "not a label file");
    write_file(dir / "image.jpg", "binary");
    const DatasetProfile p =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_EQ(p.files_scanned, 1u);
    EXPECT_EQ(p.total_objects, 1u);
}

TEST(ProfileDirectory, LenientModeSkipsAndCountsMalformedLines) {
    TempDir dir;
    write_file(dir / "a.txt",
               line_with_side(16) + "garbage line\n" + line_with_side(64) +
                   "0 2.0 0.5 0.5 0.5\n");
    const DatasetProfile p =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_EQ(p.total_objects, 2u);
    EXPECT_EQ(p.lines_rejected, 2u);
}

TEST(ProfileDirectory, StrictModeThrowsWithFileAndLineContext) {
    TempDir dir;
    write_file(dir / "a.txt", line_with_side(16) + "garbage line\n");
    try {
        profile_directory(dir.path(), ImageSizePolicy::fixed(),
                          ProfileOptions{true});
        FAIL() << "expected LabelError";
    } catch (const LabelError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("a.txt"), std::string::npos) << what;
        EXPECT_NE(what.find(":2"), std::string::npos) << what;
    }
}

TEST(ProfileDirectory, MissingDirectoryThrows) {
    EXPECT_THROW(profile_directory("/nonexistent/surely-not-here",
                                   ImageSizePolicy::fixed()),
                 DirNotFoundError);
}

TEST(ProfileDirectory, EmptyDirectoryIsAValidEmptyProfile) {
    TempDir dir;
    const DatasetProfile p =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_TRUE(p.empty());
    EXPECT_EQ(p.files_scanned, 0u);
}

TEST(ProfileDirectory, DegenerateBoxesCountAsSmallAndAreTracked) {
    TempDir dir;
    write_file(dir / "a.txt", "0 0.5 0.5 0 0.5\n");
    const DatasetProfile p =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_EQ(p.total_objects, 1u);
    EXPECT_EQ(p.count_small, 1u);
    EXPECT_EQ(p.degenerate_objects, 1u);
}

TEST(ProfileDirectory, DeterministicAcrossRuns) {
    TempDir dir;
    for (int i = 0; i < 8; ++i) {
        write_file(dir / ("f" + std::to_string(i) + ".txt"),
                   line_with_side(16 + i) + line_with_side(100 + i));
    }
    const DatasetProfile a =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    const DatasetProfile b =
        profile_directory(dir.path(), ImageSizePolicy::fixed());
    EXPECT_EQ(a.total_objects, b.total_objects);
    EXPECT_EQ(a.count_small, b.count_small);
    EXPECT_EQ(a.count_medium, b.count_medium);
    EXPECT_EQ(a.count_large, b.count_large);
}

namespace {

std::string png_bytes(int width, int height) {
    unsigned char bytes[24] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A,
                               0, 0, 0, 13, 'I', 'H', 'D', 'R'};
    bytes[16] = static_cast<unsigned char>(width >> 24);
    bytes[17] = static_cast<unsigned char>(width >> 16);
    bytes[18] = static_cast<unsigned char>(width >> 8);
    bytes[19] = static_cast<unsigned char>(width);
    bytes[20] = static_cast<unsigned char>(height >> 24);
    bytes[21] = static_cast<unsigned char>(height >> 16);
    bytes[22] = static_cast<unsigned char>(height >> 8);
    bytes[23] = static_cast<unsigned char>(height);
    return std::string(reinterpret_cast<char*>(bytes), sizeof(bytes));
}

std::string jpeg_bytes(int width, int height) {
    // SOI followed directly by a baseline SOF0 segment.
    unsigned char bytes[] = {0xFF, 0xD8, 0xFF, 0xC0, 0x00, 0x11, 0x08,
                             static_cast<unsigned char>(height >> 8),
                             static_cast<unsigned char>(height),
                             static_cast<unsigned char>(width >> 8),
                             static_cast<unsigned char>(width),
                             0x03};
    return std::string(reinterpret_cast<char*>(bytes), sizeof(bytes));
}

}  // namespace

TEST(ImageDimensions, ReadsPngHeader) {
    TempDir dir;
    write_file(dir / "img.png", png_bytes(1920, 1080));
    const auto dims = read_image_dimensions(dir / "img.png");
    ASSERT_TRUE(dims.has_value());
    EXPECT_EQ(dims->first, 1920);
    EXPECT_EQ(dims->second, 1080);
}

TEST(ImageDimensions, ReadsJpegStartOfFrame) {
    TempDir dir;
    write_file(dir / "img.jpg", jpeg_bytes(800, 600));
    const auto dims = read_image_dimensions(dir / "img.jpg");
    ASSERT_TRUE(dims.has_value());
    EXPECT_EQ(dims->first, 800);
    EXPECT_EQ(dims->second, 600);
}

TEST(ImageDimensions, RejectsUnknownFormats) {
    TempDir dir;
    write_file(dir / "img.png", "GIF89a not really a png");
    EXPECT_FALSE(read_image_dimensions(dir / "img.png").has_value());
    EXPECT_FALSE(read_image_dimensions(dir / "missing.png").has_value());
}

TEST(ProfileDirectory, SidecarPolicyUsesTrueImageSizes) {
    TempDir labels;
    TempDir images;
    // 0.1 x 0.1 box: on a 200x200 image that is 20x20 px = 400 (small);
    // on a 1600x1600 image it is 160x160 px = 25600 (large).
    write_file(labels / "a.txt", "0 0.5 0.5 0.1 0.1\n");
    write_file(labels / "b.txt", "0 0.5 0.5 0.1 0.1\n");
    write_file(images.path() / "a.png", png_bytes(200, 200));
    write_file(images.path() / "b.jpg", jpeg_bytes(1600, 1600));
    const DatasetProfile p = profile_directory(
        labels.path(), ImageSizePolicy::sidecar(images.path()));
    EXPECT_EQ(p.count_small, 1u);
    EXPECT_EQ(p.count_large, 1u);
    EXPECT_DOUBLE_EQ(p.assumed_image_area, 0.0);
}

TEST(ProfileDirectory, SidecarMissLenientSkipsFileStrictThrows) {
    TempDir labels;
    TempDir images;
    write_file(labels / "a.txt", "0 0.5 0.5 0.1 0.1\n");
    const DatasetProfile p = profile_directory(
        labels.path(), ImageSizePolicy::sidecar(images.path()));
    EXPECT_EQ(p.files_failed, 1u);
    EXPECT_TRUE(p.empty());
    EXPECT_THROW(
        profile_directory(labels.path(),
                          ImageSizePolicy::sidecar(images.path()),
                          ProfileOptions{true}),
        LabelError);
}

namespace {

DatasetProfile profile_with(std::uint64_t s, std::uint64_t m,
                            std::uint64_t l) {
    DatasetProfile p;
    p.count_small = s;
    p.count_medium = m;
    p.count_large = l;
    p.total_objects = s + m + l;
    return p;
}

}  // namespace

TEST(Recommend, SignificantClassesUseAnInclusiveThreshold) {
    const DatasetProfile p = profile_with(20, 30, 50);
    const auto at_20 = significant_classes(p, 0.20);
    EXPECT_EQ(at_20.size(), 3u);
    const auto at_21 = significant_classes(p, 0.21);
    EXPECT_EQ(at_21.count(ObjectSizeClass::Small), 0u);
    EXPECT_EQ(at_21.size(), 2u);
}

TEST(Recommend, SignificantSetMapsToTheCoveringVariant) {
    EXPECT_EQ(recommend_variant(profile_with(100, 0, 0)), Variant::Small);
    EXPECT_EQ(recommend_variant(profile_with(0, 100, 0)), Variant::Medium);
    EXPECT_EQ(recommend_variant(profile_with(0, 0, 100)), Variant::Large);
    EXPECT_EQ(recommend_variant(profile_with(50, 50, 0)), Variant::SM);
    EXPECT_EQ(recommend_variant(profile_with(0, 50, 50)), Variant::ML);
    EXPECT_EQ(recommend_variant(profile_with(50, 0, 50)), Variant::SL);
    EXPECT_EQ(recommend_variant(profile_with(34, 33, 33)), Variant::Full);
}

TEST(Recommend, EmptySignificantSetFallsBackToDominantClass) {
    // theta = 1.0 is unreachable for mixed data, forcing the fallback.
    EXPECT_EQ(recommend_variant(profile_with(60, 25, 15), 1.0),
              Variant::Small);
    // Ties resolve toward the larger size class.
    EXPECT_EQ(recommend_variant(profile_with(50, 50, 0), 1.0),
              Variant::Medium);
    EXPECT_EQ(recommend_variant(profile_with(50, 0, 50), 1.0),
              Variant::Large);
}

TEST(Recommend, EmptyProfileThrows) {
    EXPECT_THROW(recommend_variant(DatasetProfile{}), EmptyProfileError);
}
