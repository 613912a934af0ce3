// Generates synthetic YOLO label directories with exact object-size
// distributions, either from a named preset or from explicit counts.
// Useful for exercising the profiler without shipping large fixtures.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "yoloslim/corpus.hpp"

using namespace yoloslim;

int main(int argc, char** argv) {
    CLI::App app{"Write a synthetic YOLO label directory"};

    std::string out;
    std::string preset;
    bool list = false;
    std::uint64_t small = 0, medium = 0, large = 0;
    int objects_per_file = 64;

    app.add_option("--out", out, "Output directory (created if missing)");
    app.add_option("--preset", preset, "Named dataset distribution");
    app.add_flag("--list", list, "List available presets and exit");
    app.add_option("--small", small, "Objects with area below 32x32 px");
    app.add_option("--medium", medium, "Objects with area in [32x32, 96x96)");
    app.add_option("--large", large, "Objects with area at or above 96x96 px");
    app.add_option("--objects-per-file", objects_per_file,
                   "Maximum labels per generated file")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const CorpusSpec& spec : builtin_corpora()) {
            std::cout << spec.name << ": small=" << spec.small
                      << " medium=" << spec.medium << " large=" << spec.large
                      << " total=" << spec.total() << "\n";
        }
        return 0;
    }
    if (out.empty()) {
        std::cerr << "error: --out is required\n";
        return 1;
    }

    CorpusSpec spec;
    if (!preset.empty()) {
        try {
            spec = corpus_by_name(preset);
        } catch (const std::invalid_argument&) {
            std::cerr << "error: unknown preset '" << preset
                      << "' (see --list)\n";
            return 1;
        }
    } else {
        spec = CorpusSpec{"custom", small, medium, large};
    }
    if (spec.total() == 0) {
        std::cerr << "error: nothing to generate (all counts are zero)\n";
        return 1;
    }

    try {
        write_label_corpus(out, spec, objects_per_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << spec.total() << " objects to " << out << "\n";
    return 0;
}
