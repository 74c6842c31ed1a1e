#include "semmap/geometry.hpp"

#include "semmap/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace semmap {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kPoleGuardDeg = 0.1;

// sin/cos of an angle in degrees, reduced to [-45, 45] first so that
// multiples of 90 give exact zeros and ones.
void sincosd(double deg, double& s, double& c) {
    double r = std::remainder(deg, 360.0);
    const double q = std::round(r / 90.0);
    r -= 90.0 * q;
    const double rad = r * kDeg;
    const double sr = std::sin(rad);
    const double cr = std::cos(rad);
    switch ((static_cast<int>(q) % 4 + 4) % 4) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
    s += 0.0;  // turn -0 into +0
    c += 0.0;
}

double wrap180(double deg) {
    double r = std::remainder(deg, 360.0);
    if (r == -180.0) r = 180.0;
    return r;
}

// Krueger series coefficients for the transverse Mercator projection, sixth
// order in the third flattening n.
struct KruegerSeries {
    double e = 0.0;
    double rectifying_radius = 0.0;   // A
    std::array<double, 6> alpha{};    // forward
    std::array<double, 6> beta{};     // inverse
};

KruegerSeries make_series(const DatumSpec& d) {
    KruegerSeries s;
    const double f = d.flattening;
    const double n = f / (2.0 - f);
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    s.e = std::sqrt(f * (2.0 - f));
    s.rectifying_radius = d.semi_major / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    s.alpha = {
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    };
    s.beta = {
        n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
        n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
        17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
        4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
        4583 * n5 / 161280 - 108847 * n6 / 3991680,
        20648693 * n6 / 638668800,
    };
    return s;
}

// tan of the conformal latitude from tan of the geodetic latitude.
double conformal_tan(double tau, double e) {
    const double tau1 = std::hypot(1.0, tau);
    const double sig = std::sinh(e * std::atanh(e * tau / tau1));
    return std::hypot(1.0, sig) * tau - sig * tau1;
}

// Newton inversion of conformal_tan.
double geodetic_tan(double taup, double e) {
    const double e2m = 1.0 - e * e;
    double tau = taup / e2m;
    const double stol = 1e-14 * std::max(1.0, std::abs(taup));
    for (int i = 0; i < 8; ++i) {
        const double taupa = conformal_tan(tau, e);
        const double dtau = (taup - taupa) * (1.0 + e2m * tau * tau) /
                            (e2m * std::hypot(1.0, tau) * std::hypot(1.0, taupa));
        tau += dtau;
        if (std::abs(dtau) < stol) break;
    }
    return tau;
}

double rectifying_origin(const KruegerSeries& s, double lat0_deg) {
    const double chi = std::atan(conformal_tan(std::tan(lat0_deg * kDeg), s.e));
    double xi = chi;
    for (int j = 1; j <= 6; ++j) xi += s.alpha[j - 1] * std::sin(2.0 * j * chi);
    return xi;
}

}  // namespace

GeoPose GeoPose::normalized() const {
    GeoPose p = *this;
    p.yaw = std::fmod(p.yaw, 360.0);
    if (p.yaw < 0.0) p.yaw += 360.0;
    if (p.yaw >= 360.0) p.yaw -= 360.0;
    p.roll = wrap180(p.roll);
    return p;
}

CameraIntrinsics CameraIntrinsics::from_diagonal_fov(int width, int height, double diag_fov_deg) {
    const double half_diag = 0.5 * std::hypot(width, height);
    CameraIntrinsics k;
    k.focal_px = half_diag / std::tan(0.5 * diag_fov_deg * kDeg);
    k.cx = 0.5 * width;
    k.cy = 0.5 * height;
    k.width = width;
    k.height = height;
    return k;
}

CameraIntrinsics CameraIntrinsics::resized(int new_width, int new_height) const {
    if (new_width == width && new_height == height) return *this;
    const double sx = static_cast<double>(new_width) / width;
    const double sy = static_cast<double>(new_height) / height;
    if (std::abs(sx - sy) > 1e-12 * std::max(sx, sy)) {
        throw ContractError("resized intrinsics must keep the aspect ratio");
    }
    CameraIntrinsics k = *this;
    k.focal_px = focal_px * sx;
    k.cx = cx * sx;
    k.cy = cy * sy;
    k.width = new_width;
    k.height = new_height;
    return k;
}

void CameraIntrinsics::validate() const {
    if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
        throw ContractError("camera focal length must be positive");
    }
    if (width <= 0 || height <= 0) throw ContractError("camera image must be non-empty");
    if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
        throw ContractError("principal point must lie inside the image");
    }
}

DatumSpec DatumSpec::transverse_mercator(double central_meridian, double latitude_of_origin,
                                         double scale_factor, double false_easting,
                                         double false_northing) {
    DatumSpec d;
    d.mode = DatumMode::TransverseMercator;
    d.central_meridian = central_meridian;
    d.latitude_of_origin = latitude_of_origin;
    d.scale_factor = scale_factor;
    d.false_easting = false_easting;
    d.false_northing = false_northing;
    return d;
}

void DatumSpec::validate() const {
    if (!(semi_major > 0.0)) throw ContractError("datum semi-major axis must be positive");
    if (!(flattening > 0.0 && flattening < 1.0)) {
        throw ContractError("datum flattening must lie in (0, 1)");
    }
    if (!(scale_factor > 0.0)) throw ContractError("datum scale factor must be positive");
}

void validate_pose(const GeoPose& pose, const DatumSpec& datum) {
    for (double v : {pose.lat, pose.lon, pose.alt, pose.yaw, pose.pitch, pose.roll}) {
        if (!std::isfinite(v)) throw ContractError("pose fields must be finite");
    }
    if (datum.mode == DatumMode::TransverseMercator) {
        if (pose.lat < -90.0 || pose.lat > 90.0) throw ContractError("latitude out of range");
        if (pose.lon < -180.0 || pose.lon > 180.0) throw ContractError("longitude out of range");
    }
    if (pose.pitch < -90.0 || pose.pitch > 90.0) throw ContractError("pitch out of range");
}

GridPoint geodetic_to_grid(const GeoPose& pose, const DatumSpec& datum) {
    if (datum.mode == DatumMode::IdentityLocal) return {pose.lon, pose.lat, pose.alt};
    datum.validate();
    if (std::abs(pose.lat) > 90.0 - kPoleGuardDeg) {
        throw DomainError("latitude too close to a pole for transverse Mercator");
    }
    const KruegerSeries s = make_series(datum);
    const double lam = wrap180(pose.lon - datum.central_meridian) * kDeg;
    const double taup = conformal_tan(std::tan(pose.lat * kDeg), s.e);
    const double xip = std::atan2(taup, std::cos(lam));
    const double etap = std::asinh(std::sin(lam) / std::hypot(taup, std::cos(lam)));
    double xi = xip;
    double eta = etap;
    for (int j = 1; j <= 6; ++j) {
        const double a = s.alpha[j - 1];
        xi += a * std::sin(2.0 * j * xip) * std::cosh(2.0 * j * etap);
        eta += a * std::cos(2.0 * j * xip) * std::sinh(2.0 * j * etap);
    }
    const double k0a = datum.scale_factor * s.rectifying_radius;
    const double xi0 = rectifying_origin(s, datum.latitude_of_origin);
    return {datum.false_easting + k0a * eta, datum.false_northing + k0a * (xi - xi0), pose.alt};
}

GeoPose grid_to_geodetic(const GridPoint& point, const DatumSpec& datum) {
    GeoPose out;
    if (datum.mode == DatumMode::IdentityLocal) {
        out.lat = point.northing;
        out.lon = point.easting;
        out.alt = point.up;
        return out;
    }
    datum.validate();
    const KruegerSeries s = make_series(datum);
    const double k0a = datum.scale_factor * s.rectifying_radius;
    const double xi = (point.northing - datum.false_northing) / k0a +
                      rectifying_origin(s, datum.latitude_of_origin);
    const double eta = (point.easting - datum.false_easting) / k0a;
    double xip = xi;
    double etap = eta;
    for (int j = 1; j <= 6; ++j) {
        const double b = s.beta[j - 1];
        xip -= b * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
        etap -= b * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
    }
    const double sh = std::sinh(etap);
    const double c = std::cos(xip);
    const double taup = std::sin(xip) / std::hypot(sh, c);
    const double lam = std::atan2(sh, c);
    const double lat = std::atan(geodetic_tan(taup, s.e)) / kDeg;
    if (std::abs(lat) > 90.0 - kPoleGuardDeg) {
        throw DomainError("grid point maps too close to a pole for transverse Mercator");
    }
    out.lat = lat;
    out.lon = wrap180(datum.central_meridian + lam / kDeg);
    out.alt = point.up;
    return out;
}

RigidTransform::RigidTransform(const Mat4& m) : m_(m) {
    const Mat3 r = m.topLeftCorner<3, 3>();
    if (!((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9)) {
        throw ContractError("rigid transform rotation block is not orthonormal");
    }
    if (!(std::abs(r.determinant() - 1.0) <= 1e-9)) {
        throw ContractError("rigid transform rotation must have determinant +1");
    }
    if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
        throw ContractError("rigid transform last row must be (0, 0, 0, 1)");
    }
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation) {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    *this = RigidTransform(m);
}

RigidTransform RigidTransform::inverse() const {
    const Mat3 rt = rotation().transpose();
    RigidTransform out;
    out.m_.topLeftCorner<3, 3>() = rt;
    out.m_.topRightCorner<3, 1>() = -(rt * translation());
    return out;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
    RigidTransform out;
    out.m_ = m_ * rhs.m_;
    out.m_.row(3) << 0.0, 0.0, 0.0, 1.0;
    return out;
}

Mat3 camera_rotation(double yaw_deg, double pitch_deg, double roll_deg) {
    double sy, cy, sp, cp, sr, cr;
    sincosd(yaw_deg, sy, cy);
    sincosd(pitch_deg, sp, cp);
    sincosd(roll_deg, sr, cr);
    Mat3 yaw;
    yaw << cy, sy, 0.0,
          -sy, cy, 0.0,
           0.0, 0.0, 1.0;
    Mat3 pitch;
    pitch << 1.0, 0.0, 0.0,
             0.0, cp, -sp,
             0.0, sp, cp;
    Mat3 roll;
    roll << cr, 0.0, sr,
            0.0, 1.0, 0.0,
           -sr, 0.0, cr;
    // Camera axes at zero rotation: right -> east, down -> -up, forward -> north.
    Mat3 base;
    base << 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0,
            0.0, -1.0, 0.0;
    return yaw * pitch * roll * base;
}

RigidTransform pose_to_transform(const GeoPose& pose, const DatumSpec& datum) {
    const GridPoint origin = geodetic_to_grid(pose, datum);
    return {camera_rotation(pose.yaw, pose.pitch, pose.roll), origin.vec()};
}

Vec3 transform_point(const RigidTransform& t, const Vec3& p) {
    const Eigen::Vector4d h = t.matrix() * p.homogeneous();
    return h.head<3>() / h.w();
}

std::optional<Pixel> project_point(const Vec3& p_local, const CameraIntrinsics& k, double z_near) {
    const double z = p_local.z();
    if (!(z > z_near)) return std::nullopt;
    const Pixel px{k.focal_px * p_local.x() / z + k.cx, k.focal_px * p_local.y() / z + k.cy};
    if (!(px.u >= 0.0 && px.u < k.width && px.v >= 0.0 && px.v < k.height)) return std::nullopt;
    return px;
}

Vec3 backproject_pixel(const Pixel& px, double depth_z, const CameraIntrinsics& k) {
    if (!(depth_z > 0.0)) throw DomainError("backprojection depth must be positive");
    return {(px.u - k.cx) * depth_z / k.focal_px, (px.v - k.cy) * depth_z / k.focal_px, depth_z};
}

}  // namespace semmap
