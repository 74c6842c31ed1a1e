#pragma once

#include "semmap/geometry.hpp"
#include "semmap/mesh.hpp"
#include "semmap/semantic_class.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace semmap {

using DescriptorId = std::uint64_t;

/// Orientation of a planar descriptor: unit plane normal plus the angle
/// (radians) of the width axis measured inside the plane from its
/// horizontal reference axis.
struct PlaneRotation {
    Vec3 normal = Vec3::UnitZ();
    double angle = 0.0;

    bool operator==(const PlaneRotation&) const = default;
};

/// Rectangular patch of a material class lying on a surface.
struct MaterialDescriptor {
    DescriptorId id = 0;
    ClassId cls = ClassId::Banner;
    double width = 0.0;
    double height = 0.0;
    GridPoint position;  ///< quad centroid
    PlaneRotation rotation;

    /// Throws ContractError on a non-material class, non-positive extent or a
    /// non-unit normal.
    void validate() const;

    bool operator==(const MaterialDescriptor&) const = default;
};

/// Axis-aligned box of a dynamic class standing on the ground.
struct DynamicDescriptor {
    DescriptorId id = 0;
    ClassId cls = ClassId::Chair;
    double width = 0.0;   ///< along east
    double depth = 0.0;   ///< along north
    double height = 0.0;  ///< along up
    GridPoint position;   ///< ground-contact point (bottom-face center)

    void validate() const;

    bool operator==(const DynamicDescriptor&) const = default;
};

using Descriptor = std::variant<MaterialDescriptor, DynamicDescriptor>;

DescriptorId descriptor_id(const Descriptor& d);

/// Ordered descriptor collection with a monotonically increasing id counter.
/// Single writer: mutations must not overlap with reads.
class DescriptorStore {
public:
    static constexpr int kVersion = 1;

    [[nodiscard]] const std::vector<Descriptor>& items() const { return items_; }
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] bool empty() const { return items_.empty(); }

    /// Id the next inserted descriptor will receive.
    [[nodiscard]] DescriptorId next_id() const { return next_id_; }

    /// Store `d` under a fresh id and return that id.
    DescriptorId add(Descriptor d);

    /// Erase by id; returns false when absent.
    bool erase(DescriptorId id);

    [[nodiscard]] const Descriptor* find(DescriptorId id) const;

    bool operator==(const DescriptorStore&) const = default;

private:
    friend DescriptorStore parse_store(std::string_view, const std::string&);

    std::vector<Descriptor> items_;
    DescriptorId next_id_ = 1;
};

/// Text form. Header lines "semmap-store <version>" and "next_id <n>",
/// then one record per line:
///   <id> material <class> <width> <height> <px> <py> <pz> <nx> <ny> <nz> <angle>
///   <id> dynamic  <class> <width> <depth> <height> <px> <py> <pz>
std::string format_store(const DescriptorStore& store);
DescriptorStore parse_store(std::string_view text, const std::string& source = "<store>");

void save_store(const DescriptorStore& store, const std::filesystem::path& path);
DescriptorStore load_store(const std::filesystem::path& path);

}  // namespace semmap
