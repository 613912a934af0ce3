#include "yoloslim/prune.hpp"

#include <algorithm>
#include <climits>

#include "yoloslim/builder.hpp"
#include "yoloslim/shapes.hpp"

namespace yoloslim {

PruneSpec prune_spec_for(Variant v) {
    using P = PyramidLevel;
    PruneSpec s;
    s.variant = v;
    switch (v) {
        case Variant::Full:
            s.kept_heads = {P::P3, P::P4, P::P5};
            break;
        case Variant::Small:
            s.removed_ids = {17, 18, 19, 20, 21, 22};
            s.kept_heads = {P::P3};
            break;
        case Variant::Medium:
            // Without a donor for b17 the whole P4 path would cascade
            // away, so b17 takes b4 exactly as in the ML pass (the one
            // other pass that removes b14-b16).
            s.removed_ids = {14, 15, 16, 20, 21, 22};
            s.rewires = {{17, 16, 4}};
            s.kept_heads = {P::P4};
            break;
        case Variant::Large:
            // b19 follows by cascade; the surviving P5-path Conv (b20)
            // reads b6, which shares the removed b19's scale and width.
            s.removed_ids = {11, 12, 13, 14, 15, 16, 17, 18};
            s.rewires = {{20, 19, 6}};
            s.kept_heads = {P::P5};
            break;
        case Variant::SM:
            s.removed_ids = {20, 21, 22};
            s.kept_heads = {P::P3, P::P4};
            break;
        case Variant::ML:
            s.removed_ids = {14, 15, 16};
            s.rewires = {{17, 16, 4}};
            s.kept_heads = {P::P4, P::P5};
            break;
        case Variant::SL:
            // b20 now reads a stride-8 map; the resulting Concat
            // mismatch at b21 is bridged by repair_shapes.
            s.removed_ids = {17, 18, 19};
            s.rewires = {{20, 19, 16}};
            s.kept_heads = {P::P3, P::P5};
            break;
    }
    return s;
}

int RenumberMap::at(int old_id) const {
    auto it = old_to_new.find(old_id);
    if (it == old_to_new.end()) {
        throw GraphError(old_id, "id not covered by renumber map");
    }
    return it->second;
}

bool RenumberMap::identity() const {
    return std::all_of(old_to_new.begin(), old_to_new.end(),
                       [](const auto& kv) { return kv.first == kv.second; });
}

RenumberMap RenumberMap::inverse() const {
    RenumberMap inv;
    for (const auto& [o, n] : old_to_new) inv.old_to_new[n] = o;
    return inv;
}

ArchGraph apply_renumber(const ArchGraph& g, const RenumberMap& map) {
    ArchGraph out;
    out.variant = g.variant;
    out.input_channels = g.input_channels;
    out.nodes = g.nodes;
    for (Node& n : out.nodes) {
        n.id = map.at(n.id);
        for (int& in : n.inputs) in = map.at(in);
    }
    std::sort(out.nodes.begin(), out.nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    return out;
}

std::pair<ArchGraph, RenumberMap> renumber(const ArchGraph& g) {
    RenumberMap map;
    int next = 0;
    for (const Node& n : g.nodes) map.old_to_new[n.id] = next++;
    return {apply_renumber(g, map), map};
}

std::set<PyramidLevel> detect_levels(const ArchGraph& g) {
    const TensorShape probe{g.input_channels, 640, 640};
    ShapeMap shapes = propagate_shapes(g, probe);
    std::set<PyramidLevel> levels;
    for (int stride : head_strides(g, shapes, probe)) {
        switch (stride) {
            case 8: levels.insert(PyramidLevel::P3); break;
            case 16: levels.insert(PyramidLevel::P4); break;
            case 32: levels.insert(PyramidLevel::P5); break;
            default:
                throw GraphError(g.detect()->id,
                                 "head stride " + std::to_string(stride) +
                                     " is not a pyramid level");
        }
    }
    return levels;
}

namespace {

bool power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

// Inserts one stride-2, channel-preserving repair Conv between producer
// and one input slot of consumer. The new node takes producer_id + 1;
// ids at or above it shift up so ids stay ascending.
ArchGraph insert_repair_conv(const ArchGraph& g, int producer_id,
                             int consumer_id, std::size_t slot, int channels) {
    const int new_id = producer_id + 1;
    ArchGraph out;
    out.variant = g.variant;
    out.input_channels = g.input_channels;
    for (const Node& n : g.nodes) {
        Node moved = n;
        if (moved.id >= new_id) moved.id += 1;
        for (int& in : moved.inputs) {
            if (in >= new_id) in += 1;
        }
        if (n.id == consumer_id) moved.inputs[slot] = new_id;
        if (n.id == producer_id) {
            out.nodes.push_back(moved);
            out.nodes.push_back(Node{new_id, ConvBlock{channels, 3, 2},
                                     {producer_id}, true});
            continue;
        }
        out.nodes.push_back(moved);
    }
    return out;
}

}  // namespace

ArchGraph repair_shapes(const ArchGraph& g) {
    ArchGraph cur = g;
    const TensorShape probe{cur.input_channels, 640, 640};
    // Each pass bridges one halving; pyramid gaps need at most a few.
    for (int pass = 0; pass < 16; ++pass) {
        int concat_id = -1;
        try {
            propagate_shapes(cur, probe);
            return cur;
        } catch (const ShapeMismatchError& e) {
            concat_id = e.node_id();
        }

        // Shapes of everything upstream of the failing Concat.
        ArchGraph prefix;
        prefix.variant = cur.variant;
        prefix.input_channels = cur.input_channels;
        for (const Node& n : cur.nodes) {
            if (n.id == concat_id) break;
            prefix.nodes.push_back(n);
        }
        const ShapeMap shapes = propagate_shapes(prefix, probe);

        const Node& concat = cur.at(concat_id);
        int target_h = INT_MAX, target_w = INT_MAX;
        for (int id : concat.inputs) {
            target_h = std::min(target_h, shapes.at(id).height);
            target_w = std::min(target_w, shapes.at(id).width);
        }
        bool inserted = false;
        for (std::size_t slot = 0; slot < concat.inputs.size(); ++slot) {
            const int producer = concat.inputs[slot];
            const TensorShape& s = shapes.at(producer);
            if (s.height == target_h && s.width == target_w) continue;
            const bool bridgeable = s.height % target_h == 0 &&
                                    s.width % target_w == 0 &&
                                    power_of_two(s.height / target_h) &&
                                    s.height / target_h == s.width / target_w &&
                                    s.height / target_h > 1;
            if (!bridgeable) {
                throw UnrepairableError(
                    concat_id, "concat b" + std::to_string(concat_id) +
                                   " gap " + to_string(s) + " vs " +
                                   std::to_string(target_h) + "x" +
                                   std::to_string(target_w) +
                                   " is not a power-of-two spatial ratio");
            }
            cur = insert_repair_conv(cur, producer, concat_id, slot, s.channels);
            inserted = true;
            break;
        }
        if (!inserted) {
            throw UnrepairableError(concat_id,
                                    "concat mismatch with no oversized branch");
        }
    }
    throw UnrepairableError(-1, "shape repair did not converge");
}

PruneResult prune(const ArchGraph& g, Variant v) {
    const Node* det = g.detect();
    if (!det) throw InvalidBaseError("graph has no single Detect node");
    const int num_classes = std::get<DetectBlock>(det->kind).num_classes;
    if (!(g == build_yolov11n(num_classes))) {
        throw InvalidBaseError("graph is not the unpruned reference topology");
    }

    PruneResult result;
    result.spec = prune_spec_for(v);
    if (v == Variant::Full) {
        result.graph = g;
        for (const Node& n : g.nodes) result.renumbering[n.id] = n.id;
        return result;
    }

    std::set<int> removed = result.spec.removed_ids;
    ArchGraph pruned;
    pruned.variant = v;
    pruned.input_channels = g.input_channels;
    for (const Node& node : g.nodes) {
        if (removed.count(node.id)) continue;
        Node kept = node;
        for (int& in : kept.inputs) {
            for (const Rewire& r : result.spec.rewires) {
                if (r.consumer_id == kept.id && in == r.old_input_id) {
                    in = r.new_input_id;
                }
            }
        }
        const bool dangling = std::any_of(
            kept.inputs.begin(), kept.inputs.end(),
            [&](int in) { return removed.count(in) != 0; });
        if (dangling) {
            if (std::holds_alternative<DetectBlock>(kept.kind)) {
                // A removed head input drops that head, not the node.
                std::erase_if(kept.inputs,
                              [&](int in) { return removed.count(in) != 0; });
            } else {
                removed.insert(kept.id);
                result.cascade_removed.insert(kept.id);
                continue;
            }
        }
        pruned.nodes.push_back(std::move(kept));
    }

    ArchGraph repaired = pruned;
    try {
        propagate_shapes(pruned, {pruned.input_channels, 640, 640});
    } catch (const ShapeMismatchError&) {
        result.pre_repair_graph = pruned;
        repaired = repair_shapes(pruned);
    }

    auto [final_graph, map] = renumber(repaired);
    result.graph = std::move(final_graph);

    // Survivors keep their relative order through repair and renumber,
    // so the original-id audit map falls out of one parallel walk.
    std::size_t cursor = 0;
    for (const Node& n : result.graph.nodes) {
        if (n.repair) {
            result.repair_node_ids.push_back(n.id);
            continue;
        }
        result.renumbering[pruned.nodes[cursor++].id] = n.id;
    }

    ValidationReport report = validate(result.graph);
    if (!report.valid()) {
        throw GraphError(-1, "pruned graph failed validation:\n" +
                                 report.to_string());
    }
    if (detect_levels(result.graph) != result.spec.kept_heads) {
        throw GraphError(-1, "pruned graph heads disagree with the rule");
    }
    return result;
}

}  // namespace yoloslim
