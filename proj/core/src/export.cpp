#include "yoloslim/export.hpp"

#include <cstdio>
#include <sstream>

#include "yoloslim/shapes.hpp"

namespace yoloslim {

namespace {

using nlohmann::json;

struct KindToJson {
    json& node;

    void operator()(const ConvBlock& b) const {
        node["out_channels"] = b.out_channels;
        node["kernel"] = b.kernel;
        node["stride"] = b.stride;
    }
    void operator()(const C3k2Block& b) const {
        node["out_channels"] = b.out_channels;
        node["repeats"] = b.repeats;
        node["use_c3k"] = b.use_c3k;
        node["expansion"] = b.expansion;
    }
    void operator()(const SppfBlock& b) const {
        node["out_channels"] = b.out_channels;
        node["pool_kernel"] = b.pool_kernel;
    }
    void operator()(const C2psaBlock& b) const {
        node["out_channels"] = b.out_channels;
        node["repeats"] = b.repeats;
    }
    void operator()(const UpsampleBlock& b) const { node["scale"] = b.scale; }
    void operator()(const ConcatBlock&) const {}
    void operator()(const DetectBlock& b) const {
        node["num_classes"] = b.num_classes;
        node["box_width"] = b.box_width;
        node["cls_width"] = b.cls_width;
    }
};

BlockKind kind_from_json(const json& n) {
    const std::string kind = n.at("kind").get<std::string>();
    if (kind == "conv") {
        return ConvBlock{n.at("out_channels").get<int>(),
                         n.at("kernel").get<int>(), n.at("stride").get<int>()};
    }
    if (kind == "c3k2") {
        return C3k2Block{n.at("out_channels").get<int>(),
                         n.at("repeats").get<int>(), n.at("use_c3k").get<bool>(),
                         n.at("expansion").get<double>()};
    }
    if (kind == "sppf") {
        return SppfBlock{n.at("out_channels").get<int>(),
                         n.at("pool_kernel").get<int>()};
    }
    if (kind == "c2psa") {
        return C2psaBlock{n.at("out_channels").get<int>(),
                          n.at("repeats").get<int>()};
    }
    if (kind == "upsample") return UpsampleBlock{n.at("scale").get<int>()};
    if (kind == "concat") return ConcatBlock{};
    if (kind == "detect") {
        return DetectBlock{n.at("num_classes").get<int>(),
                           n.at("box_width").get<int>(),
                           n.at("cls_width").get<int>()};
    }
    throw GraphError(-1, "unknown block kind '" + kind + "'");
}

}  // namespace

json graph_to_json(const ArchGraph& g) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["variant"] = std::string(to_string(g.variant));
    doc["input_channels"] = g.input_channels;
    json nodes = json::array();
    for (const Node& n : g.nodes) {
        json node;
        node["id"] = n.id;
        node["kind"] = std::string(kind_name(n.kind));
        node["inputs"] = n.inputs;
        node["repair"] = n.repair;
        std::visit(KindToJson{node}, n.kind);
        if (std::holds_alternative<DetectBlock>(n.kind)) {
            node["head_input_ids"] = n.inputs;
        }
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);
    return doc;
}

ArchGraph graph_from_json(const json& doc) {
    try {
        ArchGraph g;
        const std::string name = doc.at("variant").get<std::string>();
        const auto variant = variant_from_string(name);
        if (!variant) {
            throw GraphError(-1, "unknown variant '" + name + "'");
        }
        g.variant = *variant;
        g.input_channels = doc.at("input_channels").get<int>();
        for (const json& n : doc.at("nodes")) {
            Node node;
            node.id = n.at("id").get<int>();
            node.kind = kind_from_json(n);
            node.inputs = n.at("inputs").get<std::vector<int>>();
            node.repair = n.value("repair", false);
            g.nodes.push_back(std::move(node));
        }
        return g;
    } catch (const json::exception& e) {
        throw GraphError(-1, std::string("malformed graph document: ") +
                                 e.what());
    }
}

std::string graph_to_dot(const ArchGraph& g, const TensorShape& input) {
    const ShapeMap shapes = propagate_shapes(g, input);
    std::ostringstream out;
    out << "digraph model {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, fontname=\"monospace\"];\n";
    for (const Node& n : g.nodes) {
        out << "  b" << n.id << " [label=\"b" << n.id << " "
            << kind_name(n.kind);
        if (std::holds_alternative<DetectBlock>(n.kind)) {
            out << "\\nstrides";
            for (int s : head_strides(g, shapes, input)) out << " /" << s;
        } else {
            out << "\\n" << to_string(shapes.at(n.id));
        }
        out << "\"";
        if (n.repair) out << ", style=dashed";
        out << "];\n";
    }
    for (const Node& n : g.nodes) {
        for (int in : n.inputs) {
            out << "  b" << in << " -> b" << n.id << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

json prune_result_to_json(const PruneResult& result) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["variant"] = std::string(to_string(result.spec.variant));
    doc["removed_ids"] = result.spec.removed_ids;
    doc["cascade_removed"] = result.cascade_removed;
    json rewires = json::array();
    for (const Rewire& r : result.spec.rewires) {
        rewires.push_back({{"consumer", r.consumer_id},
                           {"old_input", r.old_input_id},
                           {"new_input", r.new_input_id}});
    }
    doc["rewires"] = std::move(rewires);
    json heads = json::array();
    for (PyramidLevel p : result.spec.kept_heads) {
        heads.push_back(std::string(to_string(p)));
    }
    doc["kept_heads"] = std::move(heads);
    json renumbering;
    for (const auto& [from, to] : result.renumbering) {
        renumbering[std::to_string(from)] = to;
    }
    doc["renumbering"] = std::move(renumbering);
    doc["repair_node_ids"] = result.repair_node_ids;
    doc["repaired"] = result.pre_repair_graph.has_value();
    return doc;
}

json profile_to_json(const DatasetProfile& profile, Variant recommended,
                     double theta) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["total_objects"] = profile.total_objects;
    doc["small"] = profile.count_small;
    doc["medium"] = profile.count_medium;
    doc["large"] = profile.count_large;
    doc["files_scanned"] = profile.files_scanned;
    doc["files_failed"] = profile.files_failed;
    doc["lines_rejected"] = profile.lines_rejected;
    doc["degenerate_objects"] = profile.degenerate_objects;
    if (profile.policy.kind == ImageSizePolicy::Kind::FixedSize) {
        doc["assumed_image_size"] = std::to_string(profile.policy.width) + "x" +
                                    std::to_string(profile.policy.height);
    } else {
        doc["assumed_image_size"] = "sidecar";
    }
    doc["recommended_variant"] = std::string(to_string(recommended));
    doc["theta"] = theta;
    return doc;
}

json cost_report_to_json(const CostReport& report) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["variant"] = std::string(to_string(report.variant));
    doc["input"] = {{"channels", report.input.channels},
                    {"height", report.input.height},
                    {"width", report.input.width}};
    doc["bytes_per_param"] = report.bytes_per_param;
    doc["total_params"] = report.total_params;
    doc["total_flops"] = report.total_flops;
    doc["gflops"] = report.gflops();
    doc["model_size_bytes"] = report.model_size_bytes;
    doc["model_size_mb"] = report.size_mb();
    doc["bn_buffer_scalars"] = report.bn_buffer_scalars;
    json per_node = json::array();
    for (const auto& [id, cost] : report.per_node) {
        per_node.push_back(
            {{"id", id}, {"params", cost.params}, {"flops", cost.flops}});
    }
    doc["per_node"] = std::move(per_node);
    return doc;
}

std::string compare_table(const std::vector<CostReport>& reports) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-8s %12s %9s %9s %9s %9s %9s\n",
                  "variant", "params", "GFLOPs", "MB", "params_r", "flops_r",
                  "size_r");
    out << line;
    for (const CostReport& r : reports) {
        const CostDelta d = compare(reports.front(), r);
        std::snprintf(line, sizeof(line),
                      "%-8s %12llu %9.3f %9.3f %9.3f %9.3f %9.3f\n",
                      std::string(to_string(r.variant)).c_str(),
                      static_cast<unsigned long long>(r.total_params),
                      r.gflops(), r.size_mb(), d.params_ratio, d.flops_ratio,
                      d.size_ratio);
        out << line;
    }
    return out.str();
}

json compare_to_json(const std::vector<CostReport>& reports) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    const CostReport& base = reports.front();
    doc["baseline"] = std::string(to_string(base.variant));
    doc["input"] = {{"channels", base.input.channels},
                    {"height", base.input.height},
                    {"width", base.input.width}};
    doc["bytes_per_param"] = base.bytes_per_param;
    json rows = json::array();
    for (const CostReport& r : reports) {
        const CostDelta d = compare(base, r);
        rows.push_back({{"variant", std::string(to_string(r.variant))},
                        {"total_params", r.total_params},
                        {"total_flops", r.total_flops},
                        {"gflops", r.gflops()},
                        {"model_size_bytes", r.model_size_bytes},
                        {"params_ratio", d.params_ratio},
                        {"flops_ratio", d.flops_ratio},
                        {"size_ratio", d.size_ratio},
                        {"strict_reduction", d.strict_reduction}});
    }
    doc["rows"] = std::move(rows);
    return doc;
}

}  // namespace yoloslim
