#include "yoloslim/variant.hpp"

namespace yoloslim {

std::optional<Variant> variant_from_string(std::string_view name) {
    for (Variant v : kAllVariants) {
        if (to_string(v) == name) return v;
    }
    return std::nullopt;
}

std::string_view variant_names() {
    return "small, medium, large, sm, ml, sl, full";
}

}  // namespace yoloslim
