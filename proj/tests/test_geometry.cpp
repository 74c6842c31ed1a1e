#include "oracles/tm_series.hpp"
#include "semmap/errors.hpp"
#include "semmap/geometry.hpp"
#include "semmap/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace semmap;

namespace {

DatumSpec hk_like() { return DatumSpec::transverse_mercator(114.178555, 22.312133, 1.0, 836694.05, 819069.80); }

RigidTransform random_transform(SeededRng& rng) {
    GeoPose p{rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-50, 50),
              rng.uniform(0, 360),    rng.uniform(-90, 90),   rng.uniform(-179.9, 180)};
    return pose_to_transform(p, DatumSpec::identity_local());
}

Vec3 random_vec(SeededRng& rng, double s) { return {rng.uniform(-s, s), rng.uniform(-s, s), rng.uniform(-s, s)}; }

}  // namespace

TEST_CASE("identity-local passthrough") {
    const GridPoint g = geodetic_to_grid(GeoPose{5, 3, 2, 0, 0, 0}, DatumSpec::identity_local());
    CHECK(g == GridPoint{3, 5, 2});
    const GeoPose back = grid_to_geodetic(g, DatumSpec::identity_local());
    CHECK(back.lat == 5);
    CHECK(back.lon == 3);
    CHECK(back.alt == 2);
}

TEST_CASE("projection origin maps to false easting and northing") {
    const DatumSpec d = hk_like();
    const GridPoint g = geodetic_to_grid(GeoPose{d.latitude_of_origin, d.central_meridian, 7.0}, d);
    CHECK(g.easting == doctest::Approx(d.false_easting).epsilon(1e-12));
    CHECK(g.northing == doctest::Approx(d.false_northing).epsilon(1e-12));
    CHECK(g.up == 7.0);
    const GeoPose p = grid_to_geodetic({d.false_easting, d.false_northing, 0.0}, d);
    CHECK(std::abs(p.lat - d.latitude_of_origin) < 1e-12);
    CHECK(std::abs(p.lon - d.central_meridian) < 1e-12);
}

TEST_CASE("forward projection agrees with the classical series") {
    SeededRng rng(11);
    for (const DatumSpec& d : {hk_like(), DatumSpec::transverse_mercator(-3.0, 49.0, 0.9996012717, 400000, -100000),
                               DatumSpec::transverse_mercator(9.0, 0.0, 0.9996, 500000, 0)}) {
        for (int i = 0; i < 500; ++i) {
            const double lat = rng.uniform(-60, 60);
            const double lon = d.central_meridian + rng.uniform(-1.5, 1.5);
            const GridPoint g = geodetic_to_grid(GeoPose{lat, lon, 1.0}, d);
            const GridPoint o = oracle::tm_forward(lat, lon, 1.0, d);
            REQUIRE(std::abs(g.easting - o.easting) <= 1e-3);
            REQUIRE(std::abs(g.northing - o.northing) <= 1e-3);
        }
    }
}

TEST_CASE("inverse projection inverts the oracle forward projection") {
    SeededRng rng(12);
    const DatumSpec d = hk_like();
    for (int i = 0; i < 500; ++i) {
        const double lat = rng.uniform(-60, 60);
        const double lon = d.central_meridian + rng.uniform(-1.0, 1.0);
        const GeoPose p = grid_to_geodetic(oracle::tm_forward(lat, lon, 0.0, d), d);
        REQUIRE(std::abs(p.lat - lat) <= 1e-8);
        REQUIRE(std::abs(p.lon - lon) <= 1e-8);
    }
}

TEST_CASE("geodetic round trip over 1000 random points") {
    SeededRng rng(13);
    const DatumSpec d = hk_like();
    for (int i = 0; i < 1000; ++i) {
        const GeoPose p{rng.uniform(-80, 80), d.central_meridian + rng.uniform(-10, 10), rng.uniform(-100, 1000)};
        const GeoPose q = grid_to_geodetic(geodetic_to_grid(p, d), d);
        REQUIRE(std::abs(q.lat - p.lat) <= 1e-9);
        REQUIRE(std::abs(q.lon - p.lon) <= 1e-9);
        REQUIRE(std::abs(q.alt - p.alt) <= 1e-6);
    }
}

TEST_CASE("latitude near a pole is a domain error") {
    CHECK_THROWS_AS(geodetic_to_grid(GeoPose{89.95, 0, 0}, hk_like()), DomainError);
    CHECK_THROWS_AS(geodetic_to_grid(GeoPose{-89.91, 0, 0}, hk_like()), DomainError);
    CHECK_NOTHROW(geodetic_to_grid(GeoPose{89.8, 114.0, 0}, hk_like()));
}

TEST_CASE("datum and pose validation") {
    DatumSpec d = hk_like();
    d.flattening = 1.5;
    CHECK_THROWS_AS(d.validate(), ContractError);
    d = hk_like();
    d.scale_factor = 0.0;
    CHECK_THROWS_AS(d.validate(), ContractError);
    CHECK_THROWS_AS(validate_pose(GeoPose{91, 0, 0}, hk_like()), ContractError);
    CHECK_NOTHROW(validate_pose(GeoPose{500, 300, 0}, DatumSpec::identity_local()));
    CHECK_THROWS_AS(validate_pose(GeoPose{0, 0, 0, 0, 95, 0}, DatumSpec::identity_local()), ContractError);
}

TEST_CASE("pose normalization") {
    const GeoPose p = GeoPose{0, 0, 0, -90, 0, 190}.normalized();
    CHECK(p.yaw == 270);
    CHECK(p.roll == -170);
    CHECK(GeoPose{0, 0, 0, 360, 0, -180}.normalized().yaw == 0);
    CHECK(GeoPose{0, 0, 0, 360, 0, -180}.normalized().roll == 180);
}

TEST_CASE("camera convention anchors") {
    const DatumSpec id = DatumSpec::identity_local();
    const RigidTransform t0 = pose_to_transform(GeoPose{}, id);
    CHECK(transform_point(t0, {0, 0, 1}) == Vec3(0, 1, 0));
    CHECK(transform_point(t0, {0, 1, 0}) == Vec3(0, 0, -1));
    CHECK(transform_point(t0, {1, 0, 0}) == Vec3(1, 0, 0));
    const RigidTransform t90 = pose_to_transform(GeoPose{0, 0, 0, 90, 0, 0}, id);
    CHECK((transform_point(t90, {0, 0, 1}) - Vec3(1, 0, 0)).norm() < 1e-15);
    const RigidTransform up = pose_to_transform(GeoPose{0, 0, 0, 0, 30, 0}, id);
    CHECK(transform_point(up, {0, 0, 1}).z() > 0.0);
    const RigidTransform roll = pose_to_transform(GeoPose{0, 0, 0, 0, 0, 30}, id);
    CHECK(transform_point(roll, {1, 0, 0}).z() < 0.0);
    const RigidTransform moved = pose_to_transform(GeoPose{20, 10, 3}, id);
    CHECK(transform_point(moved, {0, 0, 0}) == Vec3(10, 20, 3));
}

TEST_CASE("transform_point basics") {
    const Vec3 p(1.5, -2, 3);
    CHECK(transform_point(RigidTransform::identity(), p) == p);
    CHECK(transform_point(RigidTransform::translation({1, 2, 3}), Vec3::Zero()) == Vec3(1, 2, 3));
    SeededRng rng(14);
    for (int i = 0; i < 1000; ++i) {
        const RigidTransform t = random_transform(rng);
        const Vec3 q = random_vec(rng, 100);
        const Vec3 ref = t.rotation() * q + t.translation();
        REQUIRE((transform_point(t, q) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("rigid transform contract") {
    Mat4 m = Mat4::Identity();
    m(0, 0) = 2.0;
    CHECK_THROWS_AS(RigidTransform{m}, ContractError);
    m = Mat4::Identity();
    m(0, 0) = -1.0;
    CHECK_THROWS_AS(RigidTransform{m}, ContractError);
    m = Mat4::Identity();
    m(3, 0) = 1.0;
    CHECK_THROWS_AS(RigidTransform{m}, ContractError);
}

TEST_CASE("isometry and inverse composition properties") {
    SeededRng rng(15);
    for (int i = 0; i < 2000; ++i) {
        const RigidTransform t = random_transform(rng);
        const Vec3 p = random_vec(rng, 200);
        const Vec3 q = random_vec(rng, 200);
        const double d0 = (p - q).norm();
        const double d1 = (transform_point(t, p) - transform_point(t, q)).norm();
        REQUIRE(std::abs(d1 - d0) <= 1e-9 * std::max(1.0, d0));
        const Mat4 e = (t.inverse() * t).matrix() - Mat4::Identity();
        REQUIRE(e.cwiseAbs().maxCoeff() <= 1e-9);
        const Mat3 r = t.rotation();
        REQUIRE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
        REQUIRE(std::abs(r.determinant() - 1.0) <= 1e-9);
    }
}

TEST_CASE("pinhole projection examples") {
    const CameraIntrinsics k{346.41, 480, 360, 960, 720};
    const auto a = project_point({0, 0, 5}, k);
    REQUIRE(a);
    CHECK(a->u == 480);
    CHECK(a->v == 360);
    const auto b = project_point({1, 0, 10}, k);
    REQUIRE(b);
    CHECK(b->u == doctest::Approx(514.641).epsilon(1e-9));
    CHECK(b->v == 360.0);
    CHECK_FALSE(project_point({0, 0, -1}, k));
    CHECK_FALSE(project_point({0, 0, 0.005}, k));
    CHECK_FALSE(project_point({100, 0, 1}, k));

    const Vec3 o = backproject_pixel({480, 360}, 7, k);
    CHECK(o == Vec3(0, 0, 7));
    const Vec3 p = backproject_pixel({514.641, 360}, 10, k);
    CHECK(p.x() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.y() == 0.0);
    CHECK_THROWS_AS(backproject_pixel({1, 1}, 0.0, k), DomainError);

    const CameraIntrinsics f = CameraIntrinsics::from_diagonal_fov(960, 720, 120.0);
    CHECK(f.focal_px == doctest::Approx(600.0 / std::tan(M_PI / 3)).epsilon(1e-12));
    CHECK(f.focal_px == doctest::Approx(346.41).epsilon(1e-5));
}

TEST_CASE("intrinsics validation") {
    CHECK_THROWS_AS((CameraIntrinsics{0.0, 1, 1, 4, 4}.validate()), ContractError);
    CHECK_THROWS_AS((CameraIntrinsics{1.0, 4, 1, 4, 4}.validate()), ContractError);
    CHECK_NOTHROW((CameraIntrinsics{1.0, 0, 3.9, 4, 4}.validate()));
}

TEST_CASE("project after backproject is the identity") {
    SeededRng rng(16);
    const CameraIntrinsics k = CameraIntrinsics::from_diagonal_fov(640, 480, 90.0);
    for (int i = 0; i < 1000; ++i) {
        const Pixel px{rng.uniform(0, 640), rng.uniform(0, 480)};
        const double z = rng.uniform(0.05, 500);
        const auto back = project_point(backproject_pixel(px, z, k), k);
        REQUIRE(back);
        REQUIRE(std::abs(back->u - px.u) <= 1e-9);
        REQUIRE(std::abs(back->v - px.v) <= 1e-9);
    }
}
