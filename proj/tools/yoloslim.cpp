// Command-line front end: profile a label set, get a variant
// recommendation, build/prune the detection graph, compute costs,
// compare variants, or run the reference executor.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 empty dataset.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "yoloslim/builder.hpp"
#include "yoloslim/corpus.hpp"
#include "yoloslim/cost.hpp"
#include "yoloslim/export.hpp"
#include "yoloslim/interp.hpp"
#include "yoloslim/labels.hpp"
#include "yoloslim/prune.hpp"
#include "yoloslim/shapes.hpp"

namespace {

using namespace yoloslim;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEmpty = 2;

bool log_enabled() {
    const char* env = std::getenv("YOLO_SLIM_LOG");
    return env && *env;
}

void log_info(const std::string& message) {
    if (log_enabled()) std::cerr << "[yoloslim] " << message << "\n";
}

int fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitUsage;
}

Variant parse_variant(const std::string& name) {
    auto v = variant_from_string(name);
    if (!v) {
        throw CLI::ValidationError("--variant", "unknown variant '" + name +
                                                    "' (valid: " +
                                                    std::string(variant_names()) +
                                                    ")");
    }
    return *v;
}

TensorShape input_shape(int size) { return {3, size, size}; }

// Shared flags for the dataset commands.
struct ProfileArgs {
    std::string labels;
    std::string images;
    int img_w = 640;
    int img_h = 640;
    int img_size = 0;
    double theta = 0.20;
    bool strict = false;
    bool interactive = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--labels", labels, "Directory of YOLO label .txt files");
        cmd->add_option("--images", images,
                        "Read true image sizes from this directory instead of "
                        "assuming a fixed size");
        cmd->add_option("--img-w", img_w, "Assumed image width")->check(CLI::PositiveNumber);
        cmd->add_option("--img-h", img_h, "Assumed image height")->check(CLI::PositiveNumber);
        cmd->add_option("--img-size", img_size,
                        "Assumed square image size (sets --img-w and --img-h)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--theta", theta,
                        "Significance threshold for a size class")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_flag("--strict", strict, "Fail on the first malformed line");
        cmd->add_flag("--interactive", interactive,
                      "Prompt for the label directory when --labels is absent");
    }

    ImageSizePolicy policy() const {
        const int w = img_size > 0 ? img_size : img_w;
        const int h = img_size > 0 ? img_size : img_h;
        return images.empty() ? ImageSizePolicy::fixed(w, h)
                              : ImageSizePolicy::sidecar(images);
    }

    // Returns false when no directory could be determined.
    bool resolve_labels() {
        if (!labels.empty()) return true;
        if (!interactive) return false;
        std::cout << "label directory: " << std::flush;
        return static_cast<bool>(std::getline(std::cin, labels)) &&
               !labels.empty();
    }
};

int run_profile(ProfileArgs& args, bool recommend_only, const std::string& format) {
    if (!args.resolve_labels()) {
        return fail("--labels is required (or use --interactive)");
    }
    DatasetProfile profile;
    try {
        log_info("profiling " + args.labels);
        profile = profile_directory(args.labels, args.policy(),
                                    ProfileOptions{args.strict});
    } catch (const LabelError& e) {
        return fail(e.what());
    }
    if (profile.empty()) {
        std::cerr << "no parseable objects in " << args.labels << "\n";
        return kExitEmpty;
    }
    const Variant recommended = recommend_variant(profile, args.theta);
    if (recommend_only && format != "json") {
        std::cout << to_string(recommended) << "\n";
        return kExitOk;
    }
    std::cout << profile_to_json(profile, recommended, args.theta).dump(2)
              << "\n";
    return kExitOk;
}

int run_build(Variant variant, int num_classes, int input,
              const std::string& format) {
    ArchGraph reference = build_yolov11n(num_classes);
    PruneResult result = prune(reference, variant);
    log_info("built " + std::string(to_string(variant)) + " with " +
             std::to_string(result.graph.nodes.size()) + " nodes");
    if (format == "dot") {
        std::cout << graph_to_dot(result.graph, input_shape(input));
        return kExitOk;
    }
    json doc = graph_to_json(result.graph);
    if (variant != Variant::Full) doc["audit"] = prune_result_to_json(result);
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int run_analyze(const std::string& variant_name, const std::string& graph_file,
                int num_classes, int input, int bytes_per_param,
                const std::string& format) {
    ArchGraph graph;
    if (!graph_file.empty()) {
        std::ifstream in(graph_file);
        if (!in) return fail("cannot open " + graph_file);
        json doc;
        try {
            in >> doc;
            graph = graph_from_json(doc);
        } catch (const std::exception& e) {
            return fail(std::string("bad graph file: ") + e.what());
        }
    } else {
        graph = prune(build_yolov11n(num_classes), parse_variant(variant_name))
                    .graph;
    }
    const CostReport report =
        cost_graph(graph, input_shape(input), bytes_per_param);
    if (format == "table") {
        std::cout << compare_table({report});
    } else {
        std::cout << cost_report_to_json(report).dump(2) << "\n";
    }
    return kExitOk;
}

int run_compare(const std::string& variants_csv, int num_classes, int input,
                int bytes_per_param, const std::string& format) {
    std::vector<CostReport> reports;
    ArchGraph reference = build_yolov11n(num_classes);
    std::stringstream stream(variants_csv);
    std::string name;
    while (std::getline(stream, name, ',')) {
        if (name.empty()) continue;
        const Variant v = parse_variant(name);
        reports.push_back(
            cost_graph(prune(reference, v).graph, input_shape(input),
                       bytes_per_param));
    }
    if (reports.empty()) return fail("--variants lists no variant");
    if (format == "json") {
        std::cout << compare_to_json(reports).dump(2) << "\n";
    } else {
        std::cout << compare_table(reports);
    }
    return kExitOk;
}

int run_forward(const std::string& variant_name, int num_classes, int input,
                std::uint64_t seed, const std::string& format) {
    ArchGraph graph =
        prune(build_yolov11n(num_classes), parse_variant(variant_name)).graph;
    log_info("instantiating weights with seed " + std::to_string(seed));
    WeightStore weights = instantiate(graph, seed);
    const auto heads =
        forward(graph, weights, make_test_input(3, input, input));
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(output_checksum(heads)));
    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["variant"] = variant_name;
        doc["seed"] = seed;
        json list = json::array();
        for (const HeadOutput& h : heads) {
            list.push_back({{"source", h.source_node_id},
                            {"stride", h.stride},
                            {"shape", to_string(h.tensor.shape)}});
        }
        doc["heads"] = std::move(list);
        doc["checksum"] = checksum;
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const HeadOutput& h : heads) {
            std::cout << "head b" << h.source_node_id << " stride " << h.stride
                      << " shape " << to_string(h.tensor.shape) << "\n";
        }
        std::cout << "checksum " << checksum << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Size-targeted pruning toolchain for a YOLO-family detector"};
    app.require_subcommand(1);

    // profile / recommend
    ProfileArgs profile_args;
    CLI::App* profile_cmd =
        app.add_subcommand("profile", "Classify every labeled object by size");
    profile_args.attach(profile_cmd);
    ProfileArgs recommend_args;
    CLI::App* recommend_cmd = app.add_subcommand(
        "recommend", "Suggest the variant matching a label set");
    recommend_args.attach(recommend_cmd);
    std::string recommend_format = "text";
    recommend_cmd->add_option("--format", recommend_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    // build / prune
    int classes = 80;
    int input = 640;
    std::string build_format = "json";
    CLI::App* build_cmd =
        app.add_subcommand("build", "Emit the unpruned reference graph");
    build_cmd->add_option("--classes", classes, "Detection classes")
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--input", input, "Input resolution for shape labels");
    build_cmd->add_option("--format", build_format, "json or dot")
        ->check(CLI::IsMember({"json", "dot"}));

    std::string prune_variant;
    CLI::App* prune_cmd =
        app.add_subcommand("prune", "Emit a pruned variant graph");
    prune_cmd->add_option("--variant", prune_variant, "Target variant")
        ->required();
    prune_cmd->add_option("--classes", classes, "Detection classes")
        ->check(CLI::PositiveNumber);
    prune_cmd->add_option("--input", input, "Input resolution for shape labels");
    prune_cmd->add_option("--format", build_format, "json or dot")
        ->check(CLI::IsMember({"json", "dot"}));

    // analyze / compare
    std::string analyze_variant = "full";
    std::string graph_file;
    int bytes_per_param = 4;
    std::string analyze_format = "json";
    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "Static params/FLOPs/size report for one graph");
    analyze_cmd->add_option("--variant", analyze_variant, "Variant to build");
    analyze_cmd->add_option("--graph-file", graph_file,
                            "Cost a previously exported graph document");
    analyze_cmd->add_option("--classes", classes, "Detection classes");
    analyze_cmd->add_option("--input", input, "Input resolution");
    analyze_cmd->add_option("--bytes-per-param", bytes_per_param,
                            "Serialized bytes per parameter")
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--format", analyze_format, "json or table")
        ->check(CLI::IsMember({"json", "table"}));

    std::string compare_variants = "full,small,medium,large,sm,ml,sl";
    std::string compare_format = "table";
    CLI::App* compare_cmd = app.add_subcommand(
        "compare", "Cost several variants against the first as baseline");
    compare_cmd->add_option("--variants", compare_variants,
                            "Comma-separated variant list, first is baseline");
    compare_cmd->add_option("--classes", classes, "Detection classes");
    compare_cmd->add_option("--input", input, "Input resolution");
    compare_cmd->add_option("--bytes-per-param", bytes_per_param,
                            "Serialized bytes per parameter")
        ->check(CLI::PositiveNumber);
    compare_cmd->add_option("--format", compare_format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));

    std::string run_variant = "full";
    std::uint64_t seed = 0;
    std::string run_format = "text";
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Forward pass with seeded weights; prints shapes + checksum");
    run_cmd->add_option("--variant", run_variant, "Variant to execute");
    run_cmd->add_option("--classes", classes, "Detection classes");
    run_cmd->add_option("--input", input, "Input resolution");
    run_cmd->add_option("--seed", seed, "Weight seed");
    run_cmd->add_option("--format", run_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (profile_cmd->parsed()) {
            return run_profile(profile_args, false, "json");
        }
        if (recommend_cmd->parsed()) {
            return run_profile(recommend_args, true, recommend_format);
        }
        if (input % 32 != 0 || input < 32) {
            return fail("--input must be a positive multiple of 32");
        }
        if (build_cmd->parsed()) {
            return run_build(Variant::Full, classes, input, build_format);
        }
        if (prune_cmd->parsed()) {
            return run_build(parse_variant(prune_variant), classes, input,
                             build_format);
        }
        if (analyze_cmd->parsed()) {
            return run_analyze(analyze_variant, graph_file, classes, input,
                               bytes_per_param, analyze_format);
        }
        if (compare_cmd->parsed()) {
            return run_compare(compare_variants, classes, input,
                               bytes_per_param, compare_format);
        }
        if (run_cmd->parsed()) {
            return run_forward(run_variant, classes, input, seed, run_format);
        }
    } catch (const CLI::ValidationError& e) {
        return fail(e.what());
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return kExitUsage;
}
