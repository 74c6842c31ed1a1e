#include "semmap/descriptor_estimation.hpp"

#include "semmap/errors.hpp"

#include <cmath>
#include <limits>

namespace semmap {

std::string_view gate_name(Gate g) {
    switch (g) {
        case Gate::NotFullyCaptured: return "not-fully-captured";
        case Gate::Beyond50m: return "beyond-50m";
        case Gate::NonCoplanar: return "non-coplanar";
        case Gate::NonRectangular: return "non-rectangular";
        case Gate::InvalidCloud: return "invalid-cloud";
    }
    return "unknown";
}

CornerQuad detect_corners(const ChangeRegion& region, const PointCloudImage& world_cloud) {
    if (region.pixels.empty()) throw ContractError("detect_corners: empty region");
    if (world_cloud.frame() != Frame::World) throw ContractError("detect_corners: cloud not in world frame");
    std::array<PixelCoord, 4> best;
    best.fill(region.pixels.front());
    for (const PixelCoord& p : region.pixels) {
        const int s = p.u + p.v;
        const int d = p.u - p.v;
        if (s < best[0].u + best[0].v) best[0] = p;
        if (d > best[1].u - best[1].v) best[1] = p;
        if (s > best[2].u + best[2].v) best[2] = p;
        if (d < best[3].u - best[3].v) best[3] = p;
    }
    CornerQuad q;
    q.px = best;
    for (int i = 0; i < 4; ++i) {
        const auto& p = best[i];
        if (p.u < 0 || p.v < 0 || p.u >= world_cloud.width() || p.v >= world_cloud.height() ||
            !world_cloud.valid(p.u, p.v)) {
            throw InvalidCloudError("corner pixel (" + std::to_string(p.u) + ", " +
                                    std::to_string(p.v) + ") has no cloud point");
        }
        q.world[i] = world_cloud.point(p.u, p.v);
    }
    return q;
}

UpdateDecision check_update_requirements(const ChangeRegion& region, const CornerQuad& quad,
                                         const GridPoint& vps_position, const ChangeMask& mask,
                                         const Tolerances& tol) {
    const int w = mask.width();
    const int h = mask.height();
    for (const PixelCoord& p : region.pixels) {
        if (p.u == 0 || p.v == 0 || p.u == w - 1 || p.v == h - 1) {
            return UpdateDecision::skip(Gate::NotFullyCaptured);
        }
    }

    const Vec3 vps = vps_position.vec();
    for (const Vec3& c : quad.world) {
        if (!((c - vps).norm() <= tol.max_distance)) return UpdateDecision::skip(Gate::Beyond50m);
    }

    const Vec3& a = quad.world[0];
    const Vec3& b = quad.world[1];
    const Vec3& c = quad.world[2];
    const Vec3& d = quad.world[3];
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ad = d - a;
    const Vec3 dc = c - d;
    // Coincident corners are trivially coplanar; the rectangle test rejects them.
    const double denom = ab.norm() * ac.norm() * ad.norm();
    if (denom > 0.0 && std::abs(ab.dot(ac.cross(ad))) / denom > tol.coplanarity) {
        return UpdateDecision::skip(Gate::NonCoplanar);
    }

    const double lab = ab.norm();
    const double ldc = dc.norm();
    const double lad = ad.norm();
    if (lab == 0.0 || ldc == 0.0 || lad == 0.0) return UpdateDecision::skip(Gate::NonRectangular);
    if ((ab - dc).norm() > tol.rectangularity * std::max(lab, ldc)) {
        return UpdateDecision::skip(Gate::NonRectangular);
    }
    if (std::abs(ad.dot(ab)) / (lad * lab) > tol.perpendicularity) {
        return UpdateDecision::skip(Gate::NonRectangular);
    }
    return UpdateDecision::pass();
}

namespace {

double triangle_area(const Vec3& u, const Vec3& v) {
    const double uu = u.squaredNorm();
    const double vv = v.squaredNorm();
    const double uv = u.dot(v);
    return 0.5 * std::sqrt(std::max(0.0, uu * vv - uv * uv));
}

}  // namespace

double quad_area(const std::array<Vec3, 4>& p) {
    const Vec3 ab = p[1] - p[0];
    const Vec3 ac = p[2] - p[0];
    const Vec3 ad = p[3] - p[0];
    return triangle_area(ab, ac) + triangle_area(ac, ad);
}

double quad_area(const CornerQuad& quad) { return quad_area(quad.world); }

MaterialDescriptor estimate_material_descriptor(const ChangeRegion& region, const CornerQuad& quad,
                                                const GridPoint& vps_position,
                                                const DescriptorStore& store) {
    if (region.direction != ChangeDirection::Added) {
        throw ContractError("material estimate requires an added region");
    }
    if (!is_material(region.cam_class)) {
        throw ContractError("material estimate requires a material class");
    }
    const auto& [a, b, c, d] = quad.world;
    const Vec3 ab = b - a;
    const Vec3 ad = d - a;
    Vec3 n = ab.cross(ad);
    if (!(n.norm() > 0.0)) throw ContractError("material estimate: degenerate quad");
    n.normalize();
    const Vec3 centroid = 0.25 * (a + b + c + d);
    if (n.dot(vps_position.vec() - centroid) < 0.0) n = -n;
    const auto [h, v] = plane_basis(n);

    MaterialDescriptor out;
    out.id = store.next_id();
    out.cls = region.cam_class;
    out.width = 0.5 * (ab.norm() + (c - d).norm());
    out.height = 0.5 * (ad.norm() + (c - b).norm());
    out.position = GridPoint::from(centroid);
    out.rotation.normal = n;
    out.rotation.angle = std::atan2(ab.dot(v), ab.dot(h));
    out.validate();
    return out;
}

PixelCoord bottom_center_anchor(const ChangeRegion& region) {
    if (region.pixels.empty()) throw ContractError("anchor of an empty region");
    double sum = 0.0;
    int v_max = region.pixels.front().v;
    for (const auto& p : region.pixels) {
        sum += p.u;
        v_max = std::max(v_max, p.v);
    }
    const double mean_u = sum / static_cast<double>(region.pixels.size());
    int best_u = region.pixels.front().u;
    for (const auto& p : region.pixels) {
        const double dp = std::abs(p.u - mean_u);
        const double db = std::abs(best_u - mean_u);
        if (dp < db || (dp == db && p.u < best_u)) best_u = p.u;
    }
    return {best_u, v_max};
}

Vec3 anchor_point(const ChangeRegion& region, const PointCloudImage& world_cloud) {
    if (world_cloud.frame() != Frame::World) throw ContractError("anchor_point: cloud not in world frame");
    const PixelCoord anchor = bottom_center_anchor(region);
    long best = std::numeric_limits<long>::max();
    const PixelCoord* pick = nullptr;
    for (const auto& p : region.pixels) {
        if (p.u >= world_cloud.width() || p.v >= world_cloud.height() || !world_cloud.valid(p.u, p.v)) {
            continue;
        }
        const long du = p.u - anchor.u;
        const long dv = p.v - anchor.v;
        const long d2 = du * du + dv * dv;
        if (d2 < best) {
            best = d2;
            pick = &p;
        }
    }
    if (pick == nullptr) throw InvalidCloudError("region has no valid cloud pixel");
    return world_cloud.point(pick->u, pick->v);
}

DynamicDescriptor estimate_dynamic_descriptor(const ChangeRegion& region,
                                              const PointCloudImage& world_cloud,
                                              const DescriptorStore& store,
                                              const DynamicDimensions& dims) {
    if (region.direction != ChangeDirection::Added) {
        throw ContractError("dynamic estimate requires an added region");
    }
    if (!is_dynamic(region.cam_class)) throw ContractError("dynamic estimate requires a dynamic class");
    const auto& size = dims.of(region.cam_class);
    DynamicDescriptor out;
    out.id = store.next_id();
    out.cls = region.cam_class;
    out.width = size[0];
    out.depth = size[1];
    out.height = size[2];
    out.position = GridPoint::from(anchor_point(region, world_cloud));
    out.validate();
    return out;
}

DescriptorId resolve_removal(const ChangeRegion& region, const PointCloudImage& world_cloud,
                             DescriptorStore& store, SemanticMesh& mesh) {
    if (region.direction != ChangeDirection::Removed) {
        throw ContractError("removal requires a removed region");
    }
    return remove_nearest_dynamic(store, mesh, anchor_point(region, world_cloud), region.render_class);
}

}  // namespace semmap
