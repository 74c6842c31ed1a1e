// Map mutations: materializing descriptors as mesh geometry and removing
// dynamic objects.
#pragma once

#include "semmap/descriptors.hpp"

#include <array>

namespace semmap {

/// Offset of an inserted material quad along its normal, so the new class
/// renders in front of the surface it overlays.
inline constexpr double kMaterialOverlayOffset = 0.01;

/// Predefined box extents (width, depth, height) for the dynamic classes.
struct DynamicDimensions {
    std::array<double, 3> pedestrian{0.5, 0.5, 1.7};
    std::array<double, 3> chair{0.5, 0.5, 0.9};

    [[nodiscard]] const std::array<double, 3>& of(ClassId cls) const;
};

/// Horizontal in-plane reference axis and the matching in-plane "up" axis
/// for a plane normal (h, v, n form a right-handed basis).
std::pair<Vec3, Vec3> plane_basis(const Vec3& normal);

/// World-space corners of a material quad (a, b, c, d: top-left, top-right,
/// bottom-right, bottom-left as seen from the normal side), without the
/// overlay offset.
std::array<Vec3, 4> material_corners(const MaterialDescriptor& d);

/// Add `d` to the store under a fresh id and add its two-triangle quad to the
/// mesh. Returns the stored descriptor.
MaterialDescriptor insert_material(DescriptorStore& store, SemanticMesh& mesh,
                                   MaterialDescriptor d);

/// Add `d` to the store under a fresh id and add its 12-face box to the
/// mesh. Returns the stored descriptor.
DynamicDescriptor insert_dynamic(DescriptorStore& store, SemanticMesh& mesh, DynamicDescriptor d);

/// Remove the descriptor of class `cls` closest to `e` (ties: smallest id)
/// together with its box faces. Throws NotFoundError when the store holds no
/// descriptor of that class.
DescriptorId remove_nearest_dynamic(DescriptorStore& store, SemanticMesh& mesh, const Vec3& e,
                                    ClassId cls);

}  // namespace semmap
