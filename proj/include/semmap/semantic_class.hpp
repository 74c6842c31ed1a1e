#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace semmap {

/// Semantic class index used for image pixels and mesh faces.
enum class ClassId : std::uint8_t {
    Stone = 0,
    Glass = 1,
    Metal = 2,
    Banner = 3,
    Pedestrian = 4,
    Chair = 5,
    Sky = 6,
    Foliage = 7,
    Others = 8,
};

inline constexpr int kNumClasses = 9;

enum class ClassCategory { Material, Dynamic, NonUpdatable };

constexpr ClassCategory category_of(ClassId c) {
    const auto i = static_cast<int>(c);
    if (i <= 3) return ClassCategory::Material;
    if (i <= 5) return ClassCategory::Dynamic;
    return ClassCategory::NonUpdatable;
}

constexpr bool is_material(ClassId c) { return category_of(c) == ClassCategory::Material; }
constexpr bool is_dynamic(ClassId c) { return category_of(c) == ClassCategory::Dynamic; }

constexpr int index_of(ClassId c) { return static_cast<int>(c); }

/// Throws ContractError for indices outside [0, 8].
ClassId class_from_index(int index);

std::string_view class_name(ClassId c);

/// Parse "class_<n>" as used in mesh files.
std::optional<ClassId> parse_class_token(std::string_view token);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Visualization palette, indexed by class.
inline constexpr std::array<Rgb, kNumClasses> kPalette = {{
    {0, 0, 255},      // Stone
    {0, 255, 0},      // Glass
    {255, 165, 0},    // Metal
    {150, 75, 0},     // Banner
    {255, 0, 0},      // Pedestrian
    {255, 192, 203},  // Chair
    {0, 0, 0},        // Sky
    {255, 255, 0},    // Foliage
    {173, 216, 230},  // Others
}};

}  // namespace semmap
