// Reference renderer: every pixel ray is tested against every face.
#pragma once

#include "semmap/image.hpp"
#include "semmap/mesh.hpp"
#include "semmap/renderer.hpp"

#include <limits>

namespace oracle {

struct BruteHit {
    int face = -1;
    double t = 0.0;
};

inline bool moller_trumbore(const semmap::Vec3& o, const semmap::Vec3& d, const semmap::Vec3& a,
                            const semmap::Vec3& b, const semmap::Vec3& c, double& t) {
    const semmap::Vec3 e1 = b - a;
    const semmap::Vec3 e2 = c - a;
    const semmap::Vec3 p = d.cross(e2);
    const double det = e1.dot(p);
    const double eps = 1e-12 * e1.norm() * e2.norm();
    if (!(std::abs(det) > eps)) return false;
    const double inv = 1.0 / det;
    const semmap::Vec3 s = o - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const semmap::Vec3 q = s.cross(e1);
    const double v = d.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    t = e2.dot(q) * inv;
    return true;
}

inline std::vector<BruteHit> brute_cast(const semmap::SemanticMesh& mesh, const semmap::PoseState& x,
                                        const semmap::DatumSpec& datum,
                                        double z_near = semmap::kDefaultZNear) {
    const semmap::RigidTransform T = semmap::pose_to_transform(x.pose, datum);
    const auto& k = x.intrinsics;
    const auto& verts = mesh.vertices();
    std::vector<BruteHit> out(static_cast<std::size_t>(k.width) * k.height);
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            const semmap::Ray ray = semmap::camera_ray(T, k, u, v);
            BruteHit best{-1, std::numeric_limits<double>::infinity()};
            for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
                const auto& face = mesh.faces()[f];
                double t;
                if (!moller_trumbore(ray.origin, ray.dir, verts[face.v[0]], verts[face.v[1]],
                                     verts[face.v[2]], t)) {
                    continue;
                }
                if (t > z_near && t < best.t) best = {static_cast<int>(f), t};
            }
            out[static_cast<std::size_t>(v) * k.width + u] = best;
        }
    }
    return out;
}

inline semmap::SegmentedImage brute_class_image(const semmap::SemanticMesh& mesh,
                                                const semmap::PoseState& x,
                                                const semmap::DatumSpec& datum) {
    const auto hits = brute_cast(mesh, x, datum);
    semmap::SegmentedImage img(x.intrinsics.width, x.intrinsics.height, semmap::ClassId::Sky);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i].face >= 0) img.data()[i] = mesh.faces()[static_cast<std::size_t>(hits[i].face)].cls;
    }
    return img;
}

}  // namespace oracle
