// Coordinate frames, geodetic <-> grid conversion, rigid transforms and the
// pinhole camera model shared by every other part of the library.
//
// Frames:
//   world / grid  X east, Y north, Z up (meters)
//   camera local  X right, Y down, Z forward along the optic axis (meters)
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>

namespace semmap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Closest allowed depth for a camera-frame point or ray hit.
inline constexpr double kDefaultZNear = 0.01;

/// Geodetic position and orientation of a camera. Angles in degrees.
/// Yaw is the heading, clockwise from grid north.
struct GeoPose {
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0;
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;

    /// Copy with yaw wrapped to [0, 360) and roll wrapped to (-180, 180].
    [[nodiscard]] GeoPose normalized() const;

    bool operator==(const GeoPose&) const = default;
};

/// Pinhole intrinsics with a single focal length (square pixels).
struct CameraIntrinsics {
    double focal_px = 1.0;
    double cx = 0.0;  ///< principal point u0
    double cy = 0.0;  ///< principal point v0
    int width = 1;
    int height = 1;

    /// Intrinsics whose diagonal field of view is `diag_fov_deg`, principal
    /// point at the image center.
    static CameraIntrinsics from_diagonal_fov(int width, int height, double diag_fov_deg);

    /// Same optics resampled to a different pixel grid. Pixel centers of the
    /// new grid map onto the same viewing rays.
    [[nodiscard]] CameraIntrinsics resized(int new_width, int new_height) const;

    /// Throws ContractError unless focal_px > 0 and the principal point lies
    /// inside the image.
    void validate() const;

    bool operator==(const CameraIntrinsics&) const = default;
};

struct PoseState {
    GeoPose pose;
    CameraIntrinsics intrinsics;
};

/// Cartesian grid coordinate in meters.
struct GridPoint {
    double easting = 0.0;
    double northing = 0.0;
    double up = 0.0;

    [[nodiscard]] Vec3 vec() const { return {easting, northing, up}; }
    static GridPoint from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

    bool operator==(const GridPoint&) const = default;
};

enum class DatumMode { TransverseMercator, IdentityLocal };

/// Projection parameters. In identity-local mode lon/lat/alt are read as
/// easting/northing/up meters and the ellipsoid fields are ignored.
struct DatumSpec {
    double semi_major = 6378137.0;
    double flattening = 1.0 / 298.257223563;
    double central_meridian = 0.0;
    double latitude_of_origin = 0.0;
    double scale_factor = 1.0;
    double false_easting = 0.0;
    double false_northing = 0.0;
    DatumMode mode = DatumMode::IdentityLocal;

    static DatumSpec identity_local() { return {}; }
    static DatumSpec transverse_mercator(double central_meridian, double latitude_of_origin,
                                         double scale_factor, double false_easting,
                                         double false_northing);

    void validate() const;
};

/// Throws ContractError if the pose violates its range invariants. Latitude
/// and longitude ranges are only enforced for the geodetic datum mode.
void validate_pose(const GeoPose& pose, const DatumSpec& datum);

GridPoint geodetic_to_grid(const GeoPose& pose, const DatumSpec& datum);

/// Inverse of geodetic_to_grid. Only lat, lon and alt are populated.
GeoPose grid_to_geodetic(const GridPoint& point, const DatumSpec& datum);

/// 4x4 homogeneous rigid transform. The rotation block is kept orthonormal
/// with determinant +1 and the last row fixed at (0, 0, 0, 1).
class RigidTransform {
public:
    RigidTransform() : m_(Mat4::Identity()) {}

    /// Throws ContractError if `m` is not a proper rigid transform.
    explicit RigidTransform(const Mat4& m);
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform translation(const Vec3& t) { return {Mat3::Identity(), t}; }

    [[nodiscard]] const Mat4& matrix() const { return m_; }
    [[nodiscard]] Mat3 rotation() const { return m_.topLeftCorner<3, 3>(); }
    [[nodiscard]] Vec3 translation() const { return m_.topRightCorner<3, 1>(); }

    [[nodiscard]] RigidTransform inverse() const;
    [[nodiscard]] RigidTransform operator*(const RigidTransform& rhs) const;

private:
    Mat4 m_;
};

/// Rotation taking camera-local axes to world axes for the given angles
/// (degrees). Yaw turns about world up (clockwise seen from above), then
/// pitch about the camera right axis (positive raises the optic axis), then
/// roll about the optic axis (positive lowers the right side).
Mat3 camera_rotation(double yaw_deg, double pitch_deg, double roll_deg);

/// Camera-local -> world transform for a pose.
RigidTransform pose_to_transform(const GeoPose& pose, const DatumSpec& datum);

/// Homogeneous multiply followed by dehomogenization.
Vec3 transform_point(const RigidTransform& t, const Vec3& p);

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

/// Project a camera-local point. Returns nothing when the point is not in
/// front of the near plane or falls outside [0,width) x [0,height).
std::optional<Pixel> project_point(const Vec3& p_local, const CameraIntrinsics& k,
                                   double z_near = kDefaultZNear);

/// Camera-local point at depth `depth_z` on the ray through `px`. Throws
/// DomainError for non-positive depth.
Vec3 backproject_pixel(const Pixel& px, double depth_z, const CameraIntrinsics& k);

}  // namespace semmap
