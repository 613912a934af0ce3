#include "yoloslim/corpus.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace yoloslim {

std::vector<CorpusSpec> builtin_corpora() {
    // Object-size histograms of six public detection datasets, measured
    // at the family's canonical 640x640 input.
    return {
        {"weedcrop", 15237, 3363, 93},
        {"bccd", 547, 10094, 1139},
        {"underwater-pipes", 4, 551, 11683},
        {"aerial-airport", 9008, 2682, 41},
        {"brain-tumor", 1056, 3484, 16985},
        {"face", 21, 0, 599},
    };
}

CorpusSpec corpus_by_name(const std::string& name) {
    for (const CorpusSpec& spec : builtin_corpora()) {
        if (spec.name == name) return spec;
    }
    throw std::invalid_argument("unknown corpus preset '" + name + "'");
}

void write_label_corpus(const std::filesystem::path& dir,
                        const CorpusSpec& spec, int objects_per_file) {
    // Side lengths in pixels at 640x640; every value is exact in six
    // decimals of normalized units, and each bin includes its upper
    // boundary side (32 and 96) so the classifier edges stay exercised.
    static constexpr std::array<int, 3> small_sides = {16, 24, 32};
    static constexpr std::array<int, 3> medium_sides = {48, 64, 96};
    static constexpr std::array<int, 3> large_sides = {128, 200, 320};
    static constexpr std::array<double, 3> centers = {0.4, 0.5, 0.6};

    std::filesystem::create_directories(dir);

    std::ofstream file;
    int file_index = 0, in_file = 0;
    std::uint64_t object_index = 0;
    auto emit = [&](int side) {
        if (!file.is_open() || in_file == objects_per_file) {
            char name[32];
            std::snprintf(name, sizeof(name), "img_%06d.txt", file_index++);
            file.close();
            file.open(dir / name);
            in_file = 0;
        }
        const double extent = side / 640.0;
        const double cx = centers[object_index % centers.size()];
        const double cy = centers[(object_index / 3) % centers.size()];
        char line[96];
        std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n",
                      static_cast<int>(object_index % 3), cx, cy, extent,
                      extent);
        file << line;
        ++in_file;
        ++object_index;
    };

    for (std::uint64_t i = 0; i < spec.small; ++i) emit(small_sides[i % 3]);
    for (std::uint64_t i = 0; i < spec.medium; ++i) emit(medium_sides[i % 3]);
    for (std::uint64_t i = 0; i < spec.large; ++i) emit(large_sides[i % 3]);
}

}  // namespace yoloslim
