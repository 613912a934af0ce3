#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "yoloslim/graph.hpp"

namespace yoloslim {

enum class PyramidLevel { P3, P4, P5 };

constexpr std::string_view to_string(PyramidLevel p) {
    switch (p) {
        case PyramidLevel::P3: return "P3";
        case PyramidLevel::P4: return "P4";
        case PyramidLevel::P5: return "P5";
    }
    return "?";
}

constexpr int stride_of(PyramidLevel p) {
    switch (p) {
        case PyramidLevel::P3: return 8;
        case PyramidLevel::P4: return 16;
        case PyramidLevel::P5: return 32;
    }
    return 0;
}

struct Rewire {
    int consumer_id = 0;
    int old_input_id = 0;
    int new_input_id = 0;
    bool operator==(const Rewire&) const = default;
};

// Declarative description of one pruning pass, in reference-graph ids.
// removed_ids never touches b0-b10: the backbone survives every pass.
struct PruneSpec {
    Variant variant = Variant::Full;
    std::set<int> removed_ids;
    std::vector<Rewire> rewires;
    std::set<PyramidLevel> kept_heads;
};

/// The per-variant rule table. Full yields an empty spec with all three
/// heads kept.
PruneSpec prune_spec_for(Variant v);

// Order-preserving bijection old id -> new id with new ids contiguous
// from zero.
struct RenumberMap {
    std::map<int, int> old_to_new;

    int at(int old_id) const;  // throws GraphError when unmapped
    bool identity() const;
    RenumberMap inverse() const;
};

/// Input graph was expected to be the unpruned reference topology.
class InvalidBaseError : public GraphError {
  public:
    explicit InvalidBaseError(const std::string& message)
        : GraphError(-1, message) {}
};

/// A Concat mismatch whose spatial ratio is not a power of two cannot be
/// bridged by stride-2 insertions.
class UnrepairableError : public GraphError {
    using GraphError::GraphError;
};

struct PruneResult {
    // Final graph: pruned, shape-repaired when needed, renumbered.
    ArchGraph graph;
    PruneSpec spec;
    // Nodes removed beyond spec.removed_ids because an input vanished
    // without a rewire (reference ids).
    std::set<int> cascade_removed;
    // Reference id -> final id for every surviving builder node.
    std::map<int, int> renumbering;
    // Final ids of Conv blocks inserted by shape repair.
    std::vector<int> repair_node_ids;
    // The pruned graph in reference ids as it stood before repair;
    // populated only when repair was needed. Its validation failure is
    // the documented spatial mismatch the repair bridges.
    std::optional<ArchGraph> pre_repair_graph;
};

/// Applies the variant's rule to the reference graph: removals, cascade
/// of consumers left with a dangling input (Detect instead drops the
/// dangling head), rewires, shape repair, renumbering. The result
/// validates and its Detect strides equal the spec's kept heads.
/// Full returns the input unchanged. Pure: g is not modified.
PruneResult prune(const ArchGraph& g, Variant v);

/// Repairs spatial Concat mismatches by inserting the minimal chain of
/// channel-preserving kernel-3 stride-2 Conv blocks on the branch with
/// the larger feature map. Inserted nodes are flagged repair:true; ids
/// at and above the insertion point shift up to keep ids ascending.
/// A graph whose shapes already propagate is returned unchanged.
ArchGraph repair_shapes(const ArchGraph& g);

/// Compacts ids to 0..n-1 preserving order and remaps every input
/// reference. Identity on already-contiguous graphs.
std::pair<ArchGraph, RenumberMap> renumber(const ArchGraph& g);

/// Rewrites ids through an explicit map (it must cover every node).
/// apply_renumber(apply_renumber(g, m).first..., m.inverse()) restores g.
ArchGraph apply_renumber(const ArchGraph& g, const RenumberMap& map);

/// Pyramid levels of the Detect inputs, derived from propagated strides
/// at a 640 probe.
std::set<PyramidLevel> detect_levels(const ArchGraph& g);

}  // namespace yoloslim
