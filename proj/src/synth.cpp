#include "semmap/synth.hpp"

#include "semmap/errors.hpp"
#include "semmap/image_io.hpp"
#include "semmap/json_io.hpp"
#include "semmap/map_edit.hpp"
#include "semmap/renderer.hpp"
#include "semmap/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace semmap {

void add_box(SemanticMesh& mesh, const Vec3& lo, const Vec3& hi, ClassId cls) {
    std::array<std::uint32_t, 8> idx{};
    for (int i = 0; i < 8; ++i) {
        idx[i] = mesh.add_vertex({i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z()});
    }
    static constexpr std::array<std::array<int, 3>, 12> tris = {{
        {0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
        {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5},
    }};
    for (const auto& t : tris) mesh.add_face(idx[t[0]], idx[t[1]], idx[t[2]], cls);
}

void add_quad(SemanticMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
              ClassId cls) {
    const auto ia = mesh.add_vertex(a);
    const auto ib = mesh.add_vertex(b);
    const auto ic = mesh.add_vertex(c);
    const auto id = mesh.add_vertex(d);
    mesh.add_face(ia, ib, ic, cls);
    mesh.add_face(ia, ic, id, cls);
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"street", "banner", "banner-partial", "chair-add",
                                                   "chair-remove"};
    return names;
}

namespace {

constexpr std::array<ClassId, 3> kFacade = {ClassId::Stone, ClassId::Glass, ClassId::Metal};

GeoPose pose_at(const Vec3& e, double yaw, double pitch = 0.0) {
    // Identity-local datum: latitude carries northing, longitude easting.
    return GeoPose{e.y(), e.x(), e.z(), yaw, pitch, 0.0}.normalized();
}

void ground(SemanticMesh& mesh, double half) {
    add_quad(mesh, {-half, -half, 0.0}, {half, -half, 0.0}, {half, half, 0.0}, {-half, half, 0.0},
             ClassId::Others);
}

// Street canyon running north-south between two rows of buildings.
void build_street(SyntheticScenario& s, SeededRng& rng) {
    SemanticMesh& m = s.map;
    ground(m, 400.0);
    for (const double side : {-1.0, 1.0}) {
        double y = -90.0;
        while (y < 90.0) {
            const double len = std::min(rng.uniform(6.0, 12.0), 90.0 - y);
            const double inner = 6.0 + rng.uniform(0.0, 1.5);
            const double height = rng.uniform(6.0, 25.0);
            const ClassId cls = kFacade[static_cast<std::size_t>(rng.integer(0, 2))];
            const double x0 = side * inner;
            const double x1 = side * (inner + 10.0);
            add_box(m, {std::min(x0, x1), y, 0.0}, {std::max(x0, x1), y + len, height}, cls);
            if (rng.unit() < 0.7 && len > 2.0) {
                const double z0 = rng.uniform(2.5, std::max(2.6, height - 3.0));
                const double z1 = std::min(height - 0.5, z0 + 1.5);
                const ClassId band = kFacade[(static_cast<std::size_t>(index_of(cls)) + 1 +
                                              static_cast<std::size_t>(rng.integer(0, 1))) % 3];
                const double xf = x0 - side * 0.05;
                if (z1 > z0 + 0.2) {
                    add_quad(m, {xf, y + 0.5, z1}, {xf, y + len - 0.5, z1}, {xf, y + len - 0.5, z0},
                             {xf, y + 0.5, z0}, band);
                }
            }
            y += len;
        }
    }
    for (int t = 0; t < 6; ++t) {
        const double side = t % 2 == 0 ? -1.0 : 1.0;
        const double x = side * 4.5;
        const double y = rng.uniform(-70.0, 70.0);
        add_box(m, {x - 0.8, y - 0.8, 2.2}, {x + 0.8, y + 0.8, 5.0}, ClassId::Foliage);
    }
    add_box(m, {-25.0, 95.0, 0.0}, {25.0, 105.0, 15.0}, ClassId::Stone);
    add_box(m, {-25.0, -105.0, 0.0}, {25.0, -95.0, 18.0}, ClassId::Glass);
    s.world = s.map;

    const Vec3 cam(rng.uniform(-2.0, 2.0), rng.uniform(-20.0, 20.0), 1.5);
    s.truth.pose = pose_at(cam, rng.uniform(-30.0, 30.0));
    s.truth.intrinsics = CameraIntrinsics::from_diagonal_fov(64, 48, 120.0);
    const double r = rng.uniform(0.0, 10.0);
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    const Vec3 off(r * std::cos(theta), r * std::sin(theta), 0.0);
    // Whole-degree heading error keeps the true yaw on the candidate yaw set.
    s.initial.pose = pose_at(cam + off, s.truth.pose.yaw + rng.integer(-10, 10));
    s.initial.intrinsics = s.truth.intrinsics;

    s.config.grid = CandidateGrid{20.0, 1.0, 40.0, 1.0};
    s.config.camera_width = 64;
    s.config.camera_height = 48;
}

// A long stone wall facing south with an open field to its west.
void build_wall(SyntheticScenario& s, SeededRng& rng, bool partial) {
    SemanticMesh& m = s.map;
    ground(m, 2000.0);
    add_box(m, {0.0, 4.0, 0.0}, {30.0, 6.0, 10.0}, ClassId::Stone);
    add_box(m, {-30.0, 20.0, 0.0}, {-8.0, 24.0, 15.0}, ClassId::Glass);
    s.world = s.map;

    MaterialDescriptor banner;
    banner.cls = ClassId::Banner;
    banner.rotation.normal = -Vec3::UnitY();
    banner.rotation.angle = 0.0;
    if (partial) {
        banner.width = 4.0;
        banner.height = 4.0;
        banner.position = {6.0, 4.0, 2.5};
    } else {
        banner.width = 2.0;
        banner.height = 3.0;
        banner.position = {0.1 * rng.integer(38, 42), 4.0, 2.5};
    }
    DescriptorStore scratch;
    insert_material(scratch, s.world, banner);
    s.changes.push_back({true, banner});

    s.truth.pose = pose_at({0.0, 0.0, 1.5}, 0.0);
    s.truth.intrinsics = CameraIntrinsics::from_diagonal_fov(320, 240, 120.0);
    s.initial = s.truth;
    s.config.grid = CandidateGrid{2.0, 1.0, 4.0, 1.0};
    s.config.camera_width = 320;
    s.config.camera_height = 240;
    s.config.vps.match_width = 80;
    s.config.vps.match_height = 60;
    s.sweep_direction = -Vec3::UnitY();
}

// A room with chairs in three slots in front of the camera.
void build_chairs(SyntheticScenario& s, SeededRng& rng, bool remove) {
    SemanticMesh& m = s.map;
    ground(m, 50.0);
    add_box(m, {-6.0, 4.5, 0.0}, {6.0, 5.0, 3.0}, ClassId::Stone);
    add_box(m, {-3.5, -2.0, 0.0}, {-3.0, 4.5, 3.0}, ClassId::Stone);
    add_box(m, {3.0, -2.0, 0.0}, {3.5, 4.5, 3.0}, ClassId::Stone);
    add_quad(m, {-2.5, 4.49, 2.4}, {-0.5, 4.49, 2.4}, {-0.5, 4.49, 1.2}, {-2.5, 4.49, 1.2}, ClassId::Glass);
    add_quad(m, {1.0, 4.49, 2.1}, {2.0, 4.49, 2.1}, {2.0, 4.49, 0.0}, {1.0, 4.49, 0.0}, ClassId::Metal);

    // Chair centers sit 2 cm past a 0.1 m lattice line so the half-depth
    // offset of the anchor point never lands on a quantization boundary.
    std::array<Vec3, 3> slots;
    for (int i = 0; i < 3; ++i) {
        const double x = static_cast<double>(i - 1) + 0.1 * rng.integer(-1, 1);
        const double y = 2.02 + 0.1 * rng.integer(0, 2);
        slots[static_cast<std::size_t>(i)] = {x, y, 0.0};
    }
    const int special = rng.integer(0, 2);
    const auto& size = s.config.dims.chair;
    auto chair_at = [&](const Vec3& p) {
        DynamicDescriptor d;
        d.cls = ClassId::Chair;
        d.width = size[0];
        d.depth = size[1];
        d.height = size[2];
        d.position = GridPoint::from(p);
        return d;
    };
    for (int i = 0; i < 3; ++i) {
        if (!remove && i == special) continue;
        insert_dynamic(s.store, m, chair_at(slots[static_cast<std::size_t>(i)]));
    }
    s.world = m;
    if (remove) {
        DescriptorStore scratch = s.store;
        const auto& target = slots[static_cast<std::size_t>(special)];
        const DescriptorId id = remove_nearest_dynamic(scratch, s.world, target, ClassId::Chair);
        s.removed_id = id;
        s.changes.push_back({false, std::get<DynamicDescriptor>(*s.store.find(id))});
    } else {
        DescriptorStore scratch;
        DynamicDescriptor d = chair_at(slots[static_cast<std::size_t>(special)]);
        insert_dynamic(scratch, s.world, d);
        s.changes.push_back({true, d});
    }

    s.truth.pose = pose_at({0.0, 0.0, 1.0}, 0.0);
    s.truth.intrinsics = CameraIntrinsics::from_diagonal_fov(320, 240, 90.0);
    s.initial = s.truth;
    s.config.camera_diag_fov = 90.0;
    s.config.grid = CandidateGrid{2.0, 1.0, 4.0, 1.0};
    s.config.camera_width = 320;
    s.config.camera_height = 240;
    s.config.vps.match_width = 80;
    s.config.vps.match_height = 60;
}

}  // namespace

SyntheticScenario make_scenario(std::string_view name, std::uint64_t seed) {
    SyntheticScenario s;
    s.name = std::string(name);
    s.seed = seed;
    SeededRng rng(seed);
    if (name == "street") {
        build_street(s, rng);
    } else if (name == "banner") {
        build_wall(s, rng, false);
    } else if (name == "banner-partial") {
        build_wall(s, rng, true);
    } else if (name == "chair-add") {
        build_chairs(s, rng, false);
    } else if (name == "chair-remove") {
        build_chairs(s, rng, true);
    } else {
        throw ContractError("unknown scenario '" + std::string(name) + "'");
    }
    s.map.validate();
    s.world.validate();
    RenderOptions opts;
    opts.z_near = s.config.render.z_near;
    s.camera = render_class_image(s.world, s.truth, s.config.datum, opts);
    return s;
}

void write_scenario(const SyntheticScenario& s, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_mesh(s.map, dir / "map.mesh");
    save_store(s.store, dir / "map.store");
    save_mesh(s.world, dir / "world.mesh");
    write_class_png(s.camera, dir / "camera.png");
    write_palette_png(s.camera, dir / "camera_palette.png");
    write_file_atomic(dir / "scenario.cfg", format_config(s.config));

    Json changes = Json::array();
    for (const auto& c : s.changes) {
        changes.push_back(Json{{"change", c.added ? "added" : "removed"}, {"descriptor", descriptor_to_json(c.truth)}});
    }
    Json j{{"scenario", s.name},
           {"seed", s.seed},
           {"map_faces", s.map.face_count()},
           {"world_faces", s.world.face_count()},
           {"store_size", s.store.size()},
           {"truth_pose", pose_to_json(s.truth.pose)},
           {"initial_pose", pose_to_json(s.initial.pose)},
           {"intrinsics", intrinsics_to_json(s.truth.intrinsics)},
           {"changes", changes},
           {"removed_id", s.removed_id ? Json(*s.removed_id) : Json(nullptr)},
           {"sweep_direction", Json::array({s.sweep_direction.x(), s.sweep_direction.y(), s.sweep_direction.z()})}};
    write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

SyntheticScenario load_scenario(const std::filesystem::path& dir) {
    SyntheticScenario s;
    Json j;
    try {
        j = Json::parse(read_file(dir / "manifest.json"));
        s.name = j.at("scenario").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.truth.pose = pose_from_json(j.at("truth_pose"));
        s.initial.pose = pose_from_json(j.at("initial_pose"));
        s.truth.intrinsics = intrinsics_from_json(j.at("intrinsics"));
        s.initial.intrinsics = s.truth.intrinsics;
        for (const auto& c : j.at("changes")) {
            s.changes.push_back({c.at("change").get<std::string>() == "added", descriptor_from_json(c.at("descriptor"))});
        }
        if (!j.at("removed_id").is_null()) s.removed_id = j.at("removed_id").get<DescriptorId>();
        const auto& d = j.at("sweep_direction");
        s.sweep_direction = {d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError((dir / "manifest.json").string() + ": " + e.what());
    }
    s.map = load_mesh(dir / "map.mesh");
    s.store = load_store(dir / "map.store");
    s.world = load_mesh(dir / "world.mesh");
    s.camera = read_class_png(dir / "camera.png");
    s.config = load_config(dir / "scenario.cfg");
    return s;
}

}  // namespace semmap
