// Virtual camera and virtual LIDAR: one ray per pixel center cast into the
// semantic mesh.
#pragma once

#include "semmap/image.hpp"
#include "semmap/mesh.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace semmap {

struct Ray {
    Vec3 origin;
    Vec3 dir;  ///< not normalized; its camera-frame z component is 1
};

/// Ray through the center of pixel (u, v). The ray parameter of a hit equals
/// the hit's camera-frame depth.
Ray camera_ray(const RigidTransform& cam_to_world, const CameraIntrinsics& k, int u, int v);

/// Moller-Trumbore ray/triangle test (two-sided). `e1 = v1 - v0`,
/// `e2 = v2 - v0`, `det_eps` the parallel-ray rejection threshold. On a hit
/// stores the ray parameter in `t`.
bool intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& v0, const Vec3& e1,
                        const Vec3& e2, double det_eps, double& t);

/// Parallel-ray threshold used for a triangle with edges e1, e2.
double triangle_det_eps(const Vec3& e1, const Vec3& e2);

struct RayHit {
    std::int32_t face = -1;  ///< -1: no hit
    double t = 0.0;
};

struct RenderOptions {
    double z_near = kDefaultZNear;
    /// Coordinate quantization step of returned LIDAR points (meters); 0
    /// returns exact intersections.
    double lidar_resolution = 0.1;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;
};

/// Prepared, immutable view of a mesh for repeated rendering. The nearest hit
/// per pixel is the smallest ray parameter above z_near, lowest face index on
/// ties, identical to testing every face.
class SceneRenderer {
public:
    explicit SceneRenderer(const SemanticMesh& mesh);

    /// Per-pixel nearest hits, row-major.
    [[nodiscard]] std::vector<RayHit> cast(const RigidTransform& cam_to_world,
                                           const CameraIntrinsics& k,
                                           const RenderOptions& opts = {}) const;

    /// Class image from hits; misses become Sky.
    [[nodiscard]] SegmentedImage classes(const std::vector<RayHit>& hits,
                                         const CameraIntrinsics& k) const;

    [[nodiscard]] std::size_t face_count() const { return classes_.size(); }

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<std::uint32_t, 3>> faces_;
    std::vector<ClassId> classes_;
    std::vector<Vec3> v0_, e1_, e2_;
    std::vector<double> det_eps_;
};

/// Virtual camera: class image at the pose.
SegmentedImage render_class_image(const SemanticMesh& mesh, const PoseState& x,
                                  const DatumSpec& datum, const RenderOptions& opts = {});

/// Virtual LIDAR: camera-frame hit point per pixel, quantized to
/// `opts.lidar_resolution`.
PointCloudImage render_point_cloud(const SemanticMesh& mesh, const PoseState& x,
                                   const DatumSpec& datum, const RenderOptions& opts = {});

struct RenderedViews {
    SegmentedImage classes;
    PointCloudImage cloud;  ///< local frame
};

/// Class image and point cloud from a single ray cast, pixel-aligned.
RenderedViews render_views(const SemanticMesh& mesh, const PoseState& x, const DatumSpec& datum,
                           const RenderOptions& opts = {});

/// Map every valid local point into the world frame. Throws ContractError
/// unless the cloud is in the local frame.
PointCloudImage pointcloud_to_world(const PointCloudImage& cloud, const PoseState& x,
                                    const DatumSpec& datum);

/// Scatter camera-frame points into an image grid: each point in front of the
/// near plane lands on the pixel containing its projection; the smallest
/// depth wins a contested pixel.
PointCloudImage project_cloud_to_image(std::span<const Vec3> points, const CameraIntrinsics& k,
                                       double z_near = kDefaultZNear);

}  // namespace semmap
