// Turning change regions into map edits: corner detection and the material
// update gates, descriptor estimation for materials and dynamic objects, and
// removal of dynamic objects.
#pragma once

#include "semmap/change_detection.hpp"
#include "semmap/descriptors.hpp"
#include "semmap/map_edit.hpp"

#include <optional>
#include <string>

namespace semmap {

/// Corners a, b, c, d clockwise from the top-left of a region, in pixels and
/// as world points.
struct CornerQuad {
    std::array<PixelCoord, 4> px;
    std::array<Vec3, 4> world;
};

enum class Gate { NotFullyCaptured, Beyond50m, NonCoplanar, NonRectangular, InvalidCloud };

std::string_view gate_name(Gate g);

struct UpdateDecision {
    bool update = false;
    std::optional<Gate> failed;  ///< set exactly when update is false

    static UpdateDecision pass() { return {true, std::nullopt}; }
    static UpdateDecision skip(Gate g) { return {false, g}; }
};

struct Tolerances {
    double coplanarity = 0.05;     ///< normalized triple product
    double rectangularity = 0.10;  ///< relative mismatch of opposite edges
    double perpendicularity = 0.10;  ///< |cosine| between adjacent edges
    double max_distance = 50.0;    ///< corner range from the VPS position, meters
};

/// Region pixels extremizing u+v and u-v: a = min(u+v), b = max(u-v),
/// c = max(u+v), d = min(u-v); the first such pixel in raster order wins a
/// tie. Throws InvalidCloudError when a corner pixel has no cloud point.
CornerQuad detect_corners(const ChangeRegion& region, const PointCloudImage& world_cloud);

/// Rectangle gates in order: full capture, range, coplanarity,
/// rectangularity. The first failing gate is reported.
UpdateDecision check_update_requirements(const ChangeRegion& region, const CornerQuad& quad,
                                         const GridPoint& vps_position, const ChangeMask& mask,
                                         const Tolerances& tol = {});

/// Area of triangles abc and acd.
double quad_area(const CornerQuad& quad);
double quad_area(const std::array<Vec3, 4>& corners);

/// Centroid, mean opposite-edge extents and orientation of the quad. The
/// normal faces the VPS position. The id is the store's next id.
MaterialDescriptor estimate_material_descriptor(const ChangeRegion& region, const CornerQuad& quad,
                                                const GridPoint& vps_position,
                                                const DescriptorStore& store);

/// Pixel under the bottom-center of a region: the region column nearest the
/// centroid column (lower column on a tie) at the region's lowest row.
PixelCoord bottom_center_anchor(const ChangeRegion& region);

/// World point of the valid cloud pixel in the region nearest the anchor.
/// Throws InvalidCloudError when the region has no valid cloud pixel.
Vec3 anchor_point(const ChangeRegion& region, const PointCloudImage& world_cloud);

DynamicDescriptor estimate_dynamic_descriptor(const ChangeRegion& region,
                                              const PointCloudImage& world_cloud,
                                              const DescriptorStore& store,
                                              const DynamicDimensions& dims = {});

/// Removes the nearest stored descriptor of the region's render-side class.
DescriptorId resolve_removal(const ChangeRegion& region, const PointCloudImage& world_cloud,
                             DescriptorStore& store, SemanticMesh& mesh);

}  // namespace semmap
