#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "yoloslim/variant.hpp"

namespace yoloslim {

// Recipe for a synthetic label corpus with exact per-bin object counts.
// The shipped presets mirror object-size distributions measured on six
// public detection datasets, so profiling a generated corpus reproduces
// those counts exactly.
struct CorpusSpec {
    std::string name;
    std::uint64_t small = 0;
    std::uint64_t medium = 0;
    std::uint64_t large = 0;

    std::uint64_t total() const { return small + medium + large; }
};

/// The six bundled presets: weedcrop, bccd, underwater-pipes,
/// aerial-airport, brain-tumor, face.
std::vector<CorpusSpec> builtin_corpora();

/// Preset lookup by name; throws std::invalid_argument on miss.
CorpusSpec corpus_by_name(const std::string& name);

/// Writes YOLO-format label files under dir (created if needed) whose
/// objects, classified at a 640x640 image size, land exactly on the
/// spec's bins. Objects cycle through a few side lengths per bin,
/// including the 32- and 96-pixel boundary sides, and are packed
/// objects_per_file lines per file. Deterministic.
void write_label_corpus(const std::filesystem::path& dir,
                        const CorpusSpec& spec, int objects_per_file = 64);

}  // namespace yoloslim
