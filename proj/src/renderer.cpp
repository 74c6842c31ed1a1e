#include "semmap/renderer.hpp"

#include "semmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace semmap {

namespace {

constexpr int kTile = 8;

// Both the public camera_ray and the tiled caster go through these two
// helpers so every call site evaluates identical arithmetic.
inline void local_direction(const CameraIntrinsics& k, int u, int v, double& x, double& y) {
    x = ((u + 0.5) - k.cx) / k.focal_px;
    y = ((v + 0.5) - k.cy) / k.focal_px;
}

inline Vec3 rotate_direction(const Mat3& r, double x, double y) {
    return {r(0, 0) * x + r(0, 1) * y + r(0, 2),
            r(1, 0) * x + r(1, 1) * y + r(1, 2),
            r(2, 0) * x + r(2, 1) * y + r(2, 2)};
}

inline double norm3(const Vec3& a) { return std::sqrt(a.x() * a.x() + a.y() * a.y() + a.z() * a.z()); }

// A face as seen from one camera: conservative pixel-center bounds and a
// lower bound on the ray parameter of any hit with it.
struct BinnedFace {
    double t_lower;
    std::int32_t face;
    std::int32_t u0, u1, v0, v1;
};

int pick_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

Ray camera_ray(const RigidTransform& cam_to_world, const CameraIntrinsics& k, int u, int v) {
    double x, y;
    local_direction(k, u, v, x, y);
    return {cam_to_world.translation(), rotate_direction(cam_to_world.rotation(), x, y)};
}

double triangle_det_eps(const Vec3& e1, const Vec3& e2) { return 1e-12 * norm3(e1) * norm3(e2); }

bool intersect_triangle(const Vec3& o, const Vec3& d, const Vec3& v0, const Vec3& e1,
                        const Vec3& e2, double det_eps, double& t) {
    const double px = d.y() * e2.z() - d.z() * e2.y();
    const double py = d.z() * e2.x() - d.x() * e2.z();
    const double pz = d.x() * e2.y() - d.y() * e2.x();
    const double det = e1.x() * px + e1.y() * py + e1.z() * pz;
    if (!(std::abs(det) > det_eps)) return false;
    const double inv = 1.0 / det;
    const double tx = o.x() - v0.x();
    const double ty = o.y() - v0.y();
    const double tz = o.z() - v0.z();
    const double bu = (tx * px + ty * py + tz * pz) * inv;
    if (bu < 0.0 || bu > 1.0) return false;
    const double qx = ty * e1.z() - tz * e1.y();
    const double qy = tz * e1.x() - tx * e1.z();
    const double qz = tx * e1.y() - ty * e1.x();
    const double bv = (d.x() * qx + d.y() * qy + d.z() * qz) * inv;
    if (bv < 0.0 || bu + bv > 1.0) return false;
    t = (e2.x() * qx + e2.y() * qy + e2.z() * qz) * inv;
    return true;
}

SceneRenderer::SceneRenderer(const SemanticMesh& mesh) : vertices_(mesh.vertices()) {
    const auto n = mesh.faces().size();
    faces_.reserve(n);
    classes_.reserve(n);
    v0_.reserve(n);
    e1_.reserve(n);
    e2_.reserve(n);
    det_eps_.reserve(n);
    for (const Face& f : mesh.faces()) {
        faces_.push_back(f.v);
        classes_.push_back(f.cls);
        const Vec3& a = vertices_[f.v[0]];
        const Vec3 e1 = vertices_[f.v[1]] - a;
        const Vec3 e2 = vertices_[f.v[2]] - a;
        v0_.push_back(a);
        e1_.push_back(e1);
        e2_.push_back(e2);
        det_eps_.push_back(triangle_det_eps(e1, e2));
    }
}

std::vector<RayHit> SceneRenderer::cast(const RigidTransform& cam_to_world,
                                        const CameraIntrinsics& k, const RenderOptions& opts) const {
    k.validate();
    const int w = k.width;
    const int h = k.height;
    const double z_near = opts.z_near;
    const double z_clip = 0.5 * z_near;
    const Mat3 r = cam_to_world.rotation();
    const Vec3 origin = cam_to_world.translation();
    const Mat3 rt = r.transpose();

    std::vector<Vec3> local(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) local[i] = rt * (vertices_[i] - origin);

    // Bin every face that can be hit by some pixel-center ray.
    std::vector<BinnedFace> binned;
    binned.reserve(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        std::array<Vec3, 4> poly;
        int np = 0;
        for (int e = 0; e < 3; ++e) {
            const Vec3& a = local[faces_[f][e]];
            const Vec3& b = local[faces_[f][(e + 1) % 3]];
            const bool ina = a.z() >= z_clip;
            const bool inb = b.z() >= z_clip;
            if (ina) poly[np++] = a;
            if (ina != inb) {
                const double s = (z_clip - a.z()) / (b.z() - a.z());
                Vec3 p = a + s * (b - a);
                p.z() = z_clip;
                poly[np++] = p;
            }
        }
        if (np == 0) continue;
        double umin = std::numeric_limits<double>::infinity(), umax = -umin;
        double vmin = umin, vmax = -umin;
        double zmin = umin;
        for (int i = 0; i < np; ++i) {
            const double z = std::max(poly[i].z(), z_clip);
            const double pu = k.focal_px * poly[i].x() / z + k.cx;
            const double pv = k.focal_px * poly[i].y() / z + k.cy;
            umin = std::min(umin, pu);
            umax = std::max(umax, pu);
            vmin = std::min(vmin, pv);
            vmax = std::max(vmax, pv);
            zmin = std::min(zmin, z);
        }
        const auto pad = [](double x) { return 1e-3 + 1e-7 * std::abs(x); };
        umin -= pad(umin);
        umax += pad(umax);
        vmin -= pad(vmin);
        vmax += pad(vmax);
        // Pixel i is covered when its center i + 0.5 lies inside [min, max].
        const double fu0 = std::ceil(umin - 0.5), fu1 = std::floor(umax - 0.5);
        const double fv0 = std::ceil(vmin - 0.5), fv1 = std::floor(vmax - 0.5);
        if (fu1 < 0.0 || fv1 < 0.0 || fu0 > w - 1 || fv0 > h - 1 || fu0 > fu1 || fv0 > fv1) continue;
        BinnedFace bf;
        bf.face = static_cast<std::int32_t>(f);
        bf.u0 = static_cast<std::int32_t>(std::max(0.0, fu0));
        bf.u1 = static_cast<std::int32_t>(std::min<double>(w - 1, fu1));
        bf.v0 = static_cast<std::int32_t>(std::max(0.0, fv0));
        bf.v1 = static_cast<std::int32_t>(std::min<double>(h - 1, fv1));
        bf.t_lower = zmin * (1.0 - 1e-9) - 1e-12;
        binned.push_back(bf);
    }
    std::sort(binned.begin(), binned.end(), [](const BinnedFace& a, const BinnedFace& b) {
        return a.t_lower < b.t_lower || (a.t_lower == b.t_lower && a.face < b.face);
    });

    const int tiles_x = (w + kTile - 1) / kTile;
    const int tiles_y = (h + kTile - 1) / kTile;
    const int n_tiles = tiles_x * tiles_y;
    std::vector<std::uint32_t> offsets(static_cast<std::size_t>(n_tiles) + 1, 0);
    for (const auto& bf : binned) {
        for (int ty = bf.v0 / kTile; ty <= bf.v1 / kTile; ++ty) {
            for (int tx = bf.u0 / kTile; tx <= bf.u1 / kTile; ++tx) ++offsets[ty * tiles_x + tx + 1];
        }
    }
    for (int i = 0; i < n_tiles; ++i) offsets[i + 1] += offsets[i];
    std::vector<BinnedFace> entries(offsets.back());
    {
        std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
        for (const auto& bf : binned) {
            for (int ty = bf.v0 / kTile; ty <= bf.v1 / kTile; ++ty) {
                for (int tx = bf.u0 / kTile; tx <= bf.u1 / kTile; ++tx) {
                    entries[cursor[ty * tiles_x + tx]++] = bf;
                }
            }
        }
    }

    std::vector<RayHit> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    auto work = [&](int tile_begin, int tile_end) {
        for (int tile = tile_begin; tile < tile_end; ++tile) {
            const int tx = tile % tiles_x;
            const int ty = tile / tiles_x;
            const BinnedFace* first = entries.data() + offsets[tile];
            const BinnedFace* last = entries.data() + offsets[tile + 1];
            const int ue = std::min(w, (tx + 1) * kTile);
            const int ve = std::min(h, (ty + 1) * kTile);
            for (int v = ty * kTile; v < ve; ++v) {
                for (int u = tx * kTile; u < ue; ++u) {
                    double lx, ly;
                    local_direction(k, u, v, lx, ly);
                    const Vec3 dir = rotate_direction(r, lx, ly);
                    RayHit best{-1, std::numeric_limits<double>::infinity()};
                    for (const BinnedFace* bf = first; bf != last; ++bf) {
                        if (bf->t_lower > best.t) break;
                        if (u < bf->u0 || u > bf->u1 || v < bf->v0 || v > bf->v1) continue;
                        const auto f = static_cast<std::size_t>(bf->face);
                        double t;
                        if (!intersect_triangle(origin, dir, v0_[f], e1_[f], e2_[f], det_eps_[f], t)) {
                            continue;
                        }
                        if (!(t > z_near)) continue;
                        if (t < best.t || (t == best.t && bf->face < best.face)) {
                            best.t = t;
                            best.face = bf->face;
                        }
                    }
                    if (best.face < 0) best.t = 0.0;
                    out[static_cast<std::size_t>(v) * w + u] = best;
                }
            }
        }
    };

    const int threads = std::min(pick_threads(opts.threads), n_tiles);
    if (threads <= 1) {
        work(0, n_tiles);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(work, n_tiles * i / threads, n_tiles * (i + 1) / threads);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

SegmentedImage SceneRenderer::classes(const std::vector<RayHit>& hits,
                                      const CameraIntrinsics& k) const {
    SegmentedImage img(k.width, k.height, ClassId::Sky);
    auto& data = img.data();
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i].face >= 0) data[i] = classes_[static_cast<std::size_t>(hits[i].face)];
    }
    return img;
}

RenderedViews render_views(const SemanticMesh& mesh, const PoseState& x, const DatumSpec& datum,
                           const RenderOptions& opts) {
    const SceneRenderer renderer(mesh);
    const RigidTransform cam = pose_to_transform(x.pose, datum);
    const auto& k = x.intrinsics;
    const auto hits = renderer.cast(cam, k, opts);
    RenderedViews views{renderer.classes(hits, k), PointCloudImage(k.width, k.height, Frame::Local)};
    const double q = opts.lidar_resolution;
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            const RayHit& hit = hits[static_cast<std::size_t>(v) * k.width + u];
            if (hit.face < 0) continue;
            double lx, ly;
            local_direction(k, u, v, lx, ly);
            Vec3 p(hit.t * lx, hit.t * ly, hit.t);
            if (q > 0.0) {
                for (int i = 0; i < 3; ++i) p[i] = q * std::round(p[i] / q);
            }
            views.cloud.set(u, v, p);
        }
    }
    return views;
}

SegmentedImage render_class_image(const SemanticMesh& mesh, const PoseState& x,
                                  const DatumSpec& datum, const RenderOptions& opts) {
    const SceneRenderer renderer(mesh);
    const auto hits = renderer.cast(pose_to_transform(x.pose, datum), x.intrinsics, opts);
    return renderer.classes(hits, x.intrinsics);
}

PointCloudImage render_point_cloud(const SemanticMesh& mesh, const PoseState& x,
                                   const DatumSpec& datum, const RenderOptions& opts) {
    return render_views(mesh, x, datum, opts).cloud;
}

PointCloudImage pointcloud_to_world(const PointCloudImage& cloud, const PoseState& x,
                                    const DatumSpec& datum) {
    if (cloud.frame() != Frame::Local) {
        throw ContractError("pointcloud_to_world expects a local-frame cloud");
    }
    const RigidTransform t = pose_to_transform(x.pose, datum);
    PointCloudImage out(cloud.width(), cloud.height(), Frame::World);
    for (int v = 0; v < cloud.height(); ++v) {
        for (int u = 0; u < cloud.width(); ++u) {
            if (cloud.valid(u, v)) out.set(u, v, transform_point(t, cloud.point(u, v)));
        }
    }
    return out;
}

PointCloudImage project_cloud_to_image(std::span<const Vec3> points, const CameraIntrinsics& k,
                                       double z_near) {
    PointCloudImage out(k.width, k.height, Frame::Local);
    for (const Vec3& p : points) {
        const auto px = project_point(p, k, z_near);
        if (!px) continue;
        const int u = std::min(k.width - 1, static_cast<int>(std::floor(px->u)));
        const int v = std::min(k.height - 1, static_cast<int>(std::floor(px->v)));
        if (!out.valid(u, v) || p.z() < out.point(u, v).z()) out.set(u, v, p);
    }
    return out;
}

}  // namespace semmap
