#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace yoloslim {

/// The seven architecture variants. Full is the unmodified reference
/// network; the other six keep only the detection heads (and feeding
/// paths) for the named object-size classes.
enum class Variant { Small, Medium, Large, SM, ML, SL, Full };

inline constexpr std::array<Variant, 7> kAllVariants = {
    Variant::Small, Variant::Medium, Variant::Large, Variant::SM,
    Variant::ML,    Variant::SL,     Variant::Full};

constexpr std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Small:  return "small";
        case Variant::Medium: return "medium";
        case Variant::Large:  return "large";
        case Variant::SM:     return "sm";
        case Variant::ML:     return "ml";
        case Variant::SL:     return "sl";
        case Variant::Full:   return "full";
    }
    return "?";
}

std::optional<Variant> variant_from_string(std::string_view name);

/// "small, medium, large, sm, ml, sl, full" — for CLI error messages.
std::string_view variant_names();

}  // namespace yoloslim
