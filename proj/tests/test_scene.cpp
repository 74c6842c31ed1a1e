#include "semmap/descriptors.hpp"
#include "semmap/errors.hpp"
#include "semmap/map_edit.hpp"
#include "semmap/mesh.hpp"
#include "semmap/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <limits>

using namespace semmap;

namespace {

const char* kUnitQuad =
    "# unit quad\n"
    "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
    "\n"
    "f 1 2 3 class_0\n"
    "f 1 3 4 class_0\n";

DynamicDescriptor chair_at(double x, double y) {
    DynamicDescriptor d;
    d.cls = ClassId::Chair;
    d.width = 0.5;
    d.depth = 0.5;
    d.height = 0.9;
    d.position = {x, y, 0.0};
    return d;
}

std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "semmap_scene_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("class categories and names") {
    CHECK(category_of(ClassId::Banner) == ClassCategory::Material);
    CHECK(category_of(ClassId::Chair) == ClassCategory::Dynamic);
    CHECK(category_of(ClassId::Sky) == ClassCategory::NonUpdatable);
    CHECK(category_of(ClassId::Others) == ClassCategory::NonUpdatable);
    for (int i = 0; i < kNumClasses; ++i) CHECK(index_of(class_from_index(i)) == i);
    CHECK_THROWS_AS(class_from_index(9), ContractError);
    CHECK(parse_class_token("class_7") == ClassId::Foliage);
    CHECK_FALSE(parse_class_token("class_9"));
    CHECK_FALSE(parse_class_token("stone"));
    CHECK(kPalette[index_of(ClassId::Metal)].r == 255);
    CHECK(kPalette[index_of(ClassId::Metal)].g == 165);
}

TEST_CASE("mesh parsing") {
    const SemanticMesh m = parse_mesh(kUnitQuad);
    CHECK(m.face_count() == 2);
    for (const auto& f : m.faces()) CHECK(f.cls == ClassId::Stone);
    CHECK(m.bounds().contains({0.5, 0.5, 0}));
    CHECK(m.face_area(0) == doctest::Approx(0.5));

    SUBCASE("index out of range carries the line") {
        try {
            parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 999 class_0\n", "bad.mesh");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("unknown class") { CHECK_THROWS_AS(parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3 class_12\n"), ParseError); }
    SUBCASE("degenerate face") {
        try {
            parse_mesh("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3 class_1\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("garbage") { CHECK_THROWS_AS(parse_mesh("v 0 0\n"), ParseError); }
}

TEST_CASE("mesh file round trip") {
    const auto s = make_scenario("street", 3);
    const auto p = temp_path("street.mesh");
    save_mesh(s.map, p);
    const SemanticMesh back = load_mesh(p);
    CHECK(back == s.map);
    CHECK(back.face_count() == s.map.face_count());
    CHECK_THROWS_AS(load_mesh(temp_path("missing.mesh")), IoError);
}

TEST_CASE("insert material quad") {
    DescriptorStore store;
    SemanticMesh mesh;
    MaterialDescriptor d;
    d.cls = ClassId::Banner;
    d.width = 2.0;
    d.height = 3.0;
    d.rotation.normal = {0, -1, 0};
    const auto placed = insert_material(store, mesh, d);
    CHECK(placed.id == 1);
    CHECK(store.size() == 1);
    CHECK(mesh.face_count() == 2);
    CHECK(mesh.face_area(0) + mesh.face_area(1) == doctest::Approx(6.0).epsilon(1e-12));
    const auto c = material_corners(placed);
    CHECK((c[0] - Vec3(-1, 0, 1.5)).norm() < 1e-12);
    CHECK((c[2] - Vec3(1, 0, -1.5)).norm() < 1e-12);
    for (const auto& v : mesh.vertices()) CHECK(v.y() == doctest::Approx(-kMaterialOverlayOffset));
    insert_material(store, mesh, d);
    CHECK(store.size() == 2);
    CHECK(store.next_id() == 3);

    MaterialDescriptor bad = d;
    bad.cls = ClassId::Chair;
    CHECK_THROWS_AS(insert_material(store, mesh, bad), ContractError);
    bad = d;
    bad.rotation.normal = {0, -2, 0};
    CHECK_THROWS_AS(insert_material(store, mesh, bad), ContractError);
}

TEST_CASE("insert and remove dynamic boxes") {
    DescriptorStore store;
    SemanticMesh mesh = parse_mesh(kUnitQuad);
    const SemanticMesh before = mesh;
    const auto d = insert_dynamic(store, mesh, chair_at(3, 0));
    CHECK(mesh.face_count() == 14);
    CHECK(store.size() == 1);
    mesh.validate();
    const auto far = insert_dynamic(store, mesh, chair_at(5, 0));
    CHECK(remove_nearest_dynamic(store, mesh, {0, 0, 0}, ClassId::Chair) == d.id);
    CHECK(store.size() == 1);
    CHECK(remove_nearest_dynamic(store, mesh, {0, 0, 0}, ClassId::Chair) == far.id);
    CHECK(mesh == before);
    CHECK(store.empty());
    CHECK_THROWS_AS(remove_nearest_dynamic(store, mesh, {0, 0, 0}, ClassId::Chair), NotFoundError);
    CHECK_THROWS_AS(remove_nearest_dynamic(store, mesh, {0, 0, 0}, ClassId::Stone), ContractError);
}

TEST_CASE("removal ignores other classes and breaks ties by id") {
    DescriptorStore store;
    SemanticMesh mesh;
    DynamicDescriptor ped = chair_at(0.1, 0);
    ped.cls = ClassId::Pedestrian;
    ped.height = 1.7;
    insert_dynamic(store, mesh, ped);
    const auto a = insert_dynamic(store, mesh, chair_at(-2, 0));
    insert_dynamic(store, mesh, chair_at(2, 0));
    CHECK(remove_nearest_dynamic(store, mesh, {0, 0, 0}, ClassId::Chair) == a.id);
    mesh.validate();
    CHECK(mesh.face_count() == 24);
}

TEST_CASE("nearest removal matches a brute-force scan") {
    SeededRng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        DescriptorStore store;
        SemanticMesh mesh;
        for (int i = 0; i < 50; ++i) {
            DynamicDescriptor d = chair_at(rng.uniform(-30, 30), rng.uniform(-30, 30));
            if (rng.unit() < 0.3) d.cls = ClassId::Pedestrian;
            insert_dynamic(store, mesh, d);
        }
        const Vec3 e(rng.uniform(-30, 30), rng.uniform(-30, 30), 0);
        DescriptorId expect = 0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& item : store.items()) {
            const auto& d = std::get<DynamicDescriptor>(item);
            if (d.cls != ClassId::Chair) continue;
            const double dist = (d.position.vec() - e).norm();
            if (dist < best) {
                best = dist;
                expect = d.id;
            }
        }
        const auto faces = mesh.face_count();
        REQUIRE(remove_nearest_dynamic(store, mesh, e, ClassId::Chair) == expect);
        REQUIRE(mesh.face_count() == faces - 12);
        REQUIRE(store.find(expect) == nullptr);
        mesh.validate();
    }
}

TEST_CASE("store persistence") {
    const auto p = temp_path("a.store");
    SUBCASE("empty") {
        DescriptorStore s;
        save_store(s, p);
        CHECK(load_store(p) == s);
    }
    SUBCASE("random descriptors, byte stable") {
        SeededRng rng(22);
        DescriptorStore s;
        for (int i = 0; i < 100; ++i) {
            if (rng.unit() < 0.5) {
                MaterialDescriptor m;
                m.cls = static_cast<ClassId>(rng.integer(0, 3));
                m.width = rng.uniform(0.1, 10);
                m.height = rng.uniform(0.1, 10);
                m.position = {rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), rng.uniform(0, 50)};
                m.rotation.normal = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
                m.rotation.angle = rng.uniform(-3, 3);
                s.add(m);
            } else {
                DynamicDescriptor d = chair_at(rng.uniform(-100, 100), rng.uniform(-100, 100));
                s.add(d);
            }
        }
        s.erase(7);
        save_store(s, p);
        const DescriptorStore back = load_store(p);
        CHECK(back == s);
        CHECK(format_store(back) == format_store(s));
        CHECK(back.next_id() == 101);
    }
    SUBCASE("version mismatch") {
        CHECK_THROWS_AS(parse_store("semmap-store 2\nnext_id 1\n"), IncompatibleVersionError);
        CHECK_THROWS_AS(parse_store("semmap-store 1\nnext_id 1\n1 material 3 1 1 0 0 0 0 0 3 0\n"), ParseError);
    }
}
