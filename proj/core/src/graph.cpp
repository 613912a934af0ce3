#include "yoloslim/graph.hpp"

#include <string>

namespace yoloslim {

std::string to_string(const TensorShape& s) {
    return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
           std::to_string(s.width);
}

std::string_view kind_name(const BlockKind& kind) {
    struct Namer {
        std::string_view operator()(const ConvBlock&) const { return "conv"; }
        std::string_view operator()(const C3k2Block&) const { return "c3k2"; }
        std::string_view operator()(const SppfBlock&) const { return "sppf"; }
        std::string_view operator()(const C2psaBlock&) const { return "c2psa"; }
        std::string_view operator()(const UpsampleBlock&) const { return "upsample"; }
        std::string_view operator()(const ConcatBlock&) const { return "concat"; }
        std::string_view operator()(const DetectBlock&) const { return "detect"; }
    };
    return std::visit(Namer{}, kind);
}

const Node* ArchGraph::find(int id) const {
    for (const Node& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const Node& ArchGraph::at(int id) const {
    const Node* n = find(id);
    if (!n) throw GraphError(id, "no node with id " + std::to_string(id));
    return *n;
}

const Node* ArchGraph::detect() const {
    const Node* found = nullptr;
    for (const Node& n : nodes) {
        if (std::holds_alternative<DetectBlock>(n.kind)) {
            if (found) return nullptr;
            found = &n;
        }
    }
    return found;
}

}  // namespace yoloslim
