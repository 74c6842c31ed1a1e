#include "semmap/semantic_class.hpp"

#include "semmap/errors.hpp"
#include "semmap/text_io.hpp"

namespace semmap {

namespace {
constexpr std::array<std::string_view, kNumClasses> kNames = {
    "Stone", "Glass", "Metal", "Banner", "Pedestrian", "Chair", "Sky", "Foliage", "Others"};
}

ClassId class_from_index(int index) {
    if (index < 0 || index >= kNumClasses) {
        throw ContractError("class index " + std::to_string(index) + " outside [0, 8]");
    }
    return static_cast<ClassId>(index);
}

std::string_view class_name(ClassId c) { return kNames[index_of(c)]; }

std::optional<ClassId> parse_class_token(std::string_view token) {
    constexpr std::string_view prefix = "class_";
    if (!token.starts_with(prefix)) return std::nullopt;
    long long n = -1;
    if (!parse_int(token.substr(prefix.size()), n) || n < 0 || n >= kNumClasses) {
        return std::nullopt;
    }
    return static_cast<ClassId>(n);
}

}  // namespace semmap
