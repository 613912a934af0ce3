#include "yoloslim/shapes.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace yoloslim {

namespace {

// Same-padded conv output extent (ceil division covers odd extents).
int conv_extent(int in, int stride) { return (in + stride - 1) / stride; }

struct ShapeVisitor {
    const Node& node;
    const std::vector<TensorShape>& in;

    TensorShape operator()(const ConvBlock& b) const {
        return {b.out_channels, conv_extent(in[0].height, b.stride),
                conv_extent(in[0].width, b.stride)};
    }
    TensorShape operator()(const C3k2Block& b) const {
        return {b.out_channels, in[0].height, in[0].width};
    }
    TensorShape operator()(const SppfBlock& b) const {
        return {b.out_channels, in[0].height, in[0].width};
    }
    TensorShape operator()(const C2psaBlock& b) const {
        return {b.out_channels, in[0].height, in[0].width};
    }
    TensorShape operator()(const UpsampleBlock& b) const {
        return {in[0].channels, in[0].height * b.scale, in[0].width * b.scale};
    }
    TensorShape operator()(const ConcatBlock&) const {
        int channels = 0;
        for (const TensorShape& s : in) {
            if (s.height != in[0].height || s.width != in[0].width) {
                std::ostringstream msg;
                msg << "concat b" << node.id << " inputs disagree spatially:";
                for (const TensorShape& t : in) msg << " " << to_string(t);
                throw ShapeMismatchError(node.id, msg.str());
            }
            channels += s.channels;
        }
        return {channels, in[0].height, in[0].width};
    }
    TensorShape operator()(const DetectBlock& b) const {
        // Multi-output head; the map records the first head's raw map.
        return {4 + b.num_classes, in[0].height, in[0].width};
    }
};

}  // namespace

ShapeMap propagate_shapes(const ArchGraph& g, const TensorShape& input) {
    if (input.height % 32 != 0 || input.width % 32 != 0) {
        throw IndivisibleInputError("input " + to_string(input) +
                                    " not divisible by 32");
    }
    ShapeMap shapes;
    for (const Node& node : g.nodes) {
        std::vector<TensorShape> in;
        if (node.inputs.empty()) {
            in.push_back(input);
        } else {
            for (int id : node.inputs) {
                auto it = shapes.find(id);
                if (it == shapes.end()) {
                    throw GraphError(node.id, "b" + std::to_string(node.id) +
                                                  " reads b" + std::to_string(id) +
                                                  " before it is computed");
                }
                in.push_back(it->second);
            }
        }
        shapes[node.id] = std::visit(ShapeVisitor{node, in}, node.kind);
    }
    return shapes;
}

std::vector<TensorShape> detect_output_shapes(const ArchGraph& g,
                                              const ShapeMap& shapes) {
    const Node* det = g.detect();
    if (!det) throw GraphError(-1, "graph has no single Detect node");
    const auto& block = std::get<DetectBlock>(det->kind);
    std::vector<TensorShape> out;
    for (int id : det->inputs) {
        const TensorShape& s = shapes.at(id);
        out.push_back({4 + block.num_classes, s.height, s.width});
    }
    return out;
}

std::vector<int> head_strides(const ArchGraph& g, const ShapeMap& shapes,
                              const TensorShape& input) {
    const Node* det = g.detect();
    if (!det) throw GraphError(-1, "graph has no single Detect node");
    std::vector<int> strides;
    for (int id : det->inputs) {
        strides.push_back(input.height / shapes.at(id).height);
    }
    return strides;
}

bool ValidationReport::has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::to_string() const {
    if (valid()) return "valid";
    std::ostringstream out;
    for (const Violation& v : violations) {
        out << "b" << v.node_id << " [" << v.code << "] " << v.message << "\n";
    }
    return out.str();
}

namespace {

struct StructuralChecker {
    const ArchGraph& g;
    ValidationReport& report;

    void flag(int id, std::string code, std::string message) {
        report.violations.push_back({id, std::move(code), std::move(message)});
    }

    void check_ids() {
        for (std::size_t i = 1; i < g.nodes.size(); ++i) {
            if (g.nodes[i].id <= g.nodes[i - 1].id) {
                flag(g.nodes[i].id, "id-order",
                     "node ids must be unique and ascending");
            }
        }
    }

    void check_node(const Node& n, bool is_source_slot) {
        for (int id : n.inputs) {
            if (!g.has(id)) {
                flag(n.id, "unknown-input",
                     "input b" + std::to_string(id) + " does not exist");
            } else if (id >= n.id) {
                flag(n.id, "forward-reference",
                     "b" + std::to_string(n.id) + " references b" +
                         std::to_string(id));
            }
        }
        if (n.inputs.empty() && !is_source_slot) {
            flag(n.id, "input-arity", "only the first node may be the source");
        }

        struct KindChecker {
            StructuralChecker& c;
            const Node& n;
            std::size_t arity;

            void require_one_input(std::string_view what) {
                if (arity != 1) {
                    c.flag(n.id, "input-arity",
                           std::string(what) + " takes exactly one input");
                }
            }
            void operator()(const ConvBlock& b) {
                if (arity != 0) require_one_input("conv");
                if (b.stride != 1 && b.stride != 2) {
                    c.flag(n.id, "bad-stride", "conv stride must be 1 or 2");
                }
                if (b.kernel < 1 || b.kernel % 2 == 0) {
                    c.flag(n.id, "bad-kernel", "conv kernel must be odd");
                }
                if (b.out_channels < 1) {
                    c.flag(n.id, "bad-channels", "conv needs out_channels >= 1");
                }
            }
            void operator()(const C3k2Block& b) {
                require_one_input("c3k2");
                if (b.out_channels < 1 || b.repeats < 1) {
                    c.flag(n.id, "bad-channels", "c3k2 needs channels and repeats >= 1");
                }
                if (static_cast<int>(b.out_channels * b.expansion) < 1) {
                    c.flag(n.id, "bad-expansion",
                           "c3k2 hidden width collapses to zero");
                }
            }
            void operator()(const SppfBlock& b) {
                require_one_input("sppf");
                if (b.out_channels < 1) {
                    c.flag(n.id, "bad-channels", "sppf needs out_channels >= 1");
                }
                if (b.pool_kernel < 1 || b.pool_kernel % 2 == 0) {
                    c.flag(n.id, "bad-kernel", "sppf pool kernel must be odd");
                }
            }
            void operator()(const C2psaBlock& b) {
                require_one_input("c2psa");
                if (b.out_channels < 1 || b.repeats < 1) {
                    c.flag(n.id, "bad-channels", "c2psa needs channels and repeats >= 1");
                }
            }
            void operator()(const UpsampleBlock& b) {
                require_one_input("upsample");
                if (b.scale != 2) {
                    c.flag(n.id, "bad-scale", "upsample scale must be 2");
                }
            }
            void operator()(const ConcatBlock&) {
                if (arity < 2) {
                    c.flag(n.id, "concat-arity", "concat needs at least 2 inputs");
                }
            }
            void operator()(const DetectBlock& b) {
                if (arity < 1 || arity > 3) {
                    c.flag(n.id, "detect-arity", "detect takes 1 to 3 heads");
                }
                if (b.num_classes < 1) {
                    c.flag(n.id, "bad-classes", "detect needs num_classes >= 1");
                }
            }
        };
        std::visit(KindChecker{*this, n, n.inputs.size()}, n.kind);
    }

    void check_detect_count() {
        int count = 0;
        for (const Node& n : g.nodes) {
            count += std::holds_alternative<DetectBlock>(n.kind) ? 1 : 0;
        }
        if (count == 0) flag(-1, "missing-detect", "graph has no Detect node");
        if (count > 1) flag(-1, "multiple-detect", "graph has several Detect nodes");
    }

    void check_reachability() {
        if (g.nodes.empty()) return;
        // Forward pass from the source.
        std::set<int> from_source = {g.nodes.front().id};
        for (const Node& n : g.nodes) {
            for (int id : n.inputs) {
                if (from_source.count(id)) {
                    from_source.insert(n.id);
                    break;
                }
            }
        }
        // Backward pass from Detect.
        std::set<int> to_detect;
        for (auto it = g.nodes.rbegin(); it != g.nodes.rend(); ++it) {
            if (std::holds_alternative<DetectBlock>(it->kind)) {
                to_detect.insert(it->id);
            }
            if (to_detect.count(it->id)) {
                to_detect.insert(it->inputs.begin(), it->inputs.end());
            }
        }
        for (const Node& n : g.nodes) {
            if (!from_source.count(n.id)) {
                flag(n.id, "unreachable", "not reachable from the source");
            } else if (!to_detect.count(n.id)) {
                flag(n.id, "dead-block", "no path to Detect");
            }
        }
    }
};

}  // namespace

ValidationReport validate(const ArchGraph& g) {
    ValidationReport report;
    if (g.nodes.empty()) {
        report.violations.push_back({-1, "empty-graph", "graph has no nodes"});
        return report;
    }

    StructuralChecker checker{g, report};
    checker.check_ids();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        checker.check_node(g.nodes[i], i == 0);
    }
    checker.check_detect_count();
    checker.check_reachability();
    if (!report.valid()) return report;

    // Shape probe at the canonical resolution.
    const TensorShape probe{g.input_channels, 640, 640};
    ShapeMap shapes;
    try {
        shapes = propagate_shapes(g, probe);
    } catch (const ShapeMismatchError& e) {
        report.violations.push_back({e.node_id(), "shape-mismatch", e.what()});
        return report;
    } catch (const GraphError& e) {
        report.violations.push_back({e.node_id(), "shape-error", e.what()});
        return report;
    }
    for (const auto& [id, shape] : shapes) {
        if (!shape.positive()) {
            report.violations.push_back(
                {id, "nonpositive-shape", to_string(shape)});
        }
    }
    std::vector<int> strides = head_strides(g, shapes, probe);
    for (std::size_t i = 1; i < strides.size(); ++i) {
        if (strides[i] <= strides[i - 1]) {
            report.violations.push_back(
                {g.detect()->id, "head-order",
                 "detect heads must come in strictly increasing stride order"});
            break;
        }
    }
    return report;
}

}  // namespace yoloslim
