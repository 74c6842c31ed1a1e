#include "semmap/pipeline.hpp"

#include "semmap/descriptor_estimation.hpp"
#include "semmap/errors.hpp"
#include "semmap/image_io.hpp"
#include "semmap/json_io.hpp"
#include "semmap/map_edit.hpp"
#include "semmap/renderer.hpp"
#include "semmap/text_io.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace semmap {

namespace {

// Runs one named stage, turning any failure into a StageError. The
// configured debug stage fails on entry.
template <class F>
auto run_stage(const PipelineConfig& cfg, const char* name, F&& body) {
    try {
        if (cfg.fail_stage == name) throw StageError(name, "injected failure");
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

AuditRecord record_for(std::size_t i, const ChangeRegion& r) {
    AuditRecord a;
    a.region = i;
    a.direction = r.direction;
    a.cam_class = r.cam_class;
    a.render_class = r.render_class;
    a.pixels = r.pixels.size();
    a.touches_border = r.touches_border;
    return a;
}

AuditRecord process_region(const PipelineConfig& cfg, std::size_t i, const ChangeRegion& r,
                           const ChangeMask& mask, const PointCloudImage& world_cloud,
                           const GridPoint& vps_position, DescriptorStore& store, SemanticMesh& mesh) {
    AuditRecord a = record_for(i, r);
    auto skip = [&](std::string_view why) {
        a.verdict = "skip";
        a.reason = std::string(why);
        return a;
    };
    if (r.direction == ChangeDirection::Removed) {
        try {
            a.removed_id = resolve_removal(r, world_cloud, store, mesh);
        } catch (const NotFoundError&) {
            return skip("no-descriptor-to-remove");
        } catch (const InvalidCloudError&) {
            return skip(gate_name(Gate::InvalidCloud));
        }
        a.verdict = "removal";
        return a;
    }
    if (is_material(r.cam_class)) {
        CornerQuad quad;
        try {
            quad = detect_corners(r, world_cloud);
        } catch (const InvalidCloudError&) {
            return skip(gate_name(Gate::InvalidCloud));
        }
        const UpdateDecision d = check_update_requirements(r, quad, vps_position, mask, cfg.tolerances);
        if (!d.update) return skip(gate_name(*d.failed));
        const MaterialDescriptor est = estimate_material_descriptor(r, quad, vps_position, store);
        a.descriptor = insert_material(store, mesh, est);
        a.verdict = "update";
        return a;
    }
    if (is_dynamic(r.cam_class)) {
        DynamicDescriptor est;
        try {
            est = estimate_dynamic_descriptor(r, world_cloud, store, cfg.dims);
        } catch (const InvalidCloudError&) {
            return skip(gate_name(Gate::InvalidCloud));
        }
        a.descriptor = insert_dynamic(store, mesh, est);
        a.verdict = "update";
        return a;
    }
    return skip("non-updatable-class");
}

void check_camera(const SegmentedImage& cam, const CameraIntrinsics& k) {
    if (cam.width() != k.width || cam.height() != k.height) {
        throw ContractError("camera image is " + std::to_string(cam.width()) + "x" +
                            std::to_string(cam.height()) + " but the camera model is " +
                            std::to_string(k.width) + "x" + std::to_string(k.height));
    }
}

PoseState initial_state(const PipelineConfig& cfg, const GeoPose& pose, int w, int h) {
    cfg.validate();
    validate_pose(pose, cfg.datum);
    return {pose.normalized(), cfg.intrinsics(w, h)};
}

void log_pose(std::ostream& log, const char* label, const GeoPose& p) {
    log << label << ' ' << format_pose(p) << '\n';
}

}  // namespace

std::string format_audit(const std::vector<AuditRecord>& records) {
    std::string s;
    for (const auto& a : records) {
        Json j{{"region", a.region},
               {"direction", direction_name(a.direction)},
               {"cam_class", class_name(a.cam_class)},
               {"render_class", class_name(a.render_class)},
               {"pixels", a.pixels},
               {"touches_border", a.touches_border},
               {"verdict", a.verdict},
               {"reason", a.reason.empty() ? Json(nullptr) : Json(a.reason)},
               {"descriptor", a.descriptor ? descriptor_to_json(*a.descriptor) : Json(nullptr)},
               {"removed_id", a.removed_id ? Json(*a.removed_id) : Json(nullptr)}};
        s += j.dump();
        s += '\n';
    }
    return s;
}

UpdateResult update_map(const PipelineConfig& cfg, const SemanticMesh& mesh,
                        const DescriptorStore& store, const SegmentedImage& cam,
                        const PoseState& initial, bool localize) {
    check_camera(cam, initial.intrinsics);
    UpdateResult out;
    out.pose = initial;
    out.mesh = mesh;
    out.store = store;

    if (localize) {
        run_stage(cfg, "localize", [&] {
            VpsOptions v = cfg.vps;
            v.z_near = cfg.render.z_near;
            VpsResult r = estimate_pose(cam, mesh, initial, cfg.grid, cfg.datum, v);
            out.pose = r.pose;
            out.heatmap = std::move(r.heatmap);
            return 0;
        });
    }

    const auto [rendered, world_cloud] = run_stage(cfg, "render", [&] {
        RenderedViews views = render_views(mesh, out.pose, cfg.datum, cfg.render);
        PointCloudImage world = pointcloud_to_world(views.cloud, out.pose, cfg.datum);
        return std::pair{std::move(views.classes), std::move(world)};
    });

    run_stage(cfg, "detect", [&] {
        out.mask = filter_regions(detect_changes(cam, rendered), cfg.min_fraction);
        out.regions = extract_regions(out.mask, cam, rendered);
        return 0;
    });

    run_stage(cfg, "estimate", [&] {
        const GridPoint vps = geodetic_to_grid(out.pose.pose, cfg.datum);
        for (std::size_t i = 0; i < out.regions.size(); ++i) {
            out.audit.push_back(
                process_region(cfg, i, out.regions[i], out.mask, world_cloud, vps, out.store, out.mesh));
        }
        out.mesh.validate();
        return 0;
    });
    return out;
}

void cmd_render(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                const GeoPose& pose, const std::filesystem::path& out_dir) {
    const SemanticMesh mesh = load_mesh(mesh_path);
    const PoseState x = initial_state(cfg, pose, 0, 0);
    const RenderedViews views = run_stage(cfg, "render", [&] { return render_views(mesh, x, cfg.datum, cfg.render); });
    std::filesystem::create_directories(out_dir);
    write_class_png(views.classes, out_dir / "render.png");
    write_palette_png(views.classes, out_dir / "render_palette.png");
    write_point_cloud(views.cloud, out_dir / "cloud.txt");
}

PoseState cmd_localize(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                       const std::filesystem::path& image_path, const GeoPose& pose,
                       const std::filesystem::path& out_dir, std::ostream& log) {
    const SemanticMesh mesh = load_mesh(mesh_path);
    const SegmentedImage cam = read_class_png(image_path);
    const PoseState x0 = initial_state(cfg, pose, cam.width(), cam.height());
    check_camera(cam, x0.intrinsics);
    VpsOptions v = cfg.vps;
    v.z_near = cfg.render.z_near;
    const VpsResult r = run_stage(cfg, "localize", [&] {
        return estimate_pose(cam, mesh, x0, cfg.grid, cfg.datum, v);
    });
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "pose.txt", format_pose(r.pose.pose) + "\n");
    emit_heatmap(r.heatmap, out_dir / "heatmap");
    const GridPoint a = geodetic_to_grid(x0.pose, cfg.datum);
    const GridPoint b = geodetic_to_grid(r.pose.pose, cfg.datum);
    log_pose(log, "initial", x0.pose);
    log_pose(log, "refined", r.pose.pose);
    log << "shift " << format_double(std::hypot(b.easting - a.easting, b.northing - a.northing))
        << " m, yaw " << format_double(r.heatmap.records[r.heatmap.best].k * cfg.grid.yaw_step) << " deg\n";
    return r.pose;
}

UpdateResult cmd_update(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                        const std::filesystem::path& store_path,
                        const std::filesystem::path& image_path, const GeoPose& pose,
                        const std::filesystem::path& out_dir, std::ostream& log) {
    const SemanticMesh mesh = load_mesh(mesh_path);
    const DescriptorStore store = load_store(store_path);
    const SegmentedImage cam = read_class_png(image_path);
    const PoseState x0 = initial_state(cfg, pose, cam.width(), cam.height());
    check_camera(cam, x0.intrinsics);

    UpdateResult r = update_map(cfg, mesh, store, cam, x0, true);

    run_stage(cfg, "persist", [&] {
        std::filesystem::create_directories(out_dir);
        write_file_atomic(out_dir / "pose.txt", format_pose(r.pose.pose) + "\n");
        if (r.heatmap) emit_heatmap(*r.heatmap, out_dir / "heatmap");
        write_mask_png(r.mask, out_dir / "mask.png");
        write_file_atomic(out_dir / "regions.txt", format_regions(r.regions));
        write_file_atomic(out_dir / "audit.jsonl", format_audit(r.audit));

        // Both map files are staged before either is replaced.
        auto staged = [](const std::filesystem::path& p) {
            auto s = p;
            s += ".new";
            return s;
        };
        write_file_atomic(staged(store_path), format_store(r.store));
        write_file_atomic(staged(mesh_path), format_mesh(r.mesh));
        if (cfg.fail_stage == "commit") {
            std::filesystem::remove(staged(store_path));
            std::filesystem::remove(staged(mesh_path));
            throw StageError("persist", "injected failure before commit");
        }
        std::filesystem::rename(staged(store_path), store_path);
        std::filesystem::rename(staged(mesh_path), mesh_path);
        return 0;
    });

    log_pose(log, "pose", r.pose.pose);
    std::size_t updates = 0, removals = 0, skips = 0;
    for (const auto& a : r.audit) {
        if (a.verdict == "update") ++updates;
        else if (a.verdict == "removal") ++removals;
        else ++skips;
    }
    log << r.regions.size() << " regions: " << updates << " updated, " << removals << " removed, "
        << skips << " skipped\n";
    return r;
}

std::vector<SweepRow> eval_sweep(const SyntheticScenario& s, const PipelineConfig& cfg,
                                 const std::vector<double>& errors) {
    std::vector<SweepRow> rows;
    const CameraIntrinsics k = cfg.intrinsics(s.camera.width(), s.camera.height());
    const GridPoint base = geodetic_to_grid(s.truth.pose, cfg.datum);
    const Vec3 dir = s.sweep_direction.normalized();
    for (const double e : errors) {
        PoseState x{s.truth.pose, k};
        const Vec3 shifted = base.vec() + e * dir;
        const GeoPose geo = grid_to_geodetic(GridPoint::from(shifted), cfg.datum);
        x.pose.lat = geo.lat;
        x.pose.lon = geo.lon;
        x.pose.alt = geo.alt;
        const UpdateResult r = update_map(cfg, s.map, s.store, s.camera, x, false);

        SweepRow row;
        row.injected = e;
        double pos_sum = 0.0, area_sum = 0.0;
        std::size_t n_area = 0;
        for (const auto& change : s.changes) {
            if (!change.added) continue;
            const Vec3 truth_pos = std::visit([](const auto& d) { return d.position.vec(); }, change.truth);
            const ClassId truth_cls = std::visit([](const auto& d) { return d.cls; }, change.truth);
            const Descriptor* best = nullptr;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& a : r.audit) {
                if (!a.descriptor) continue;
                const auto& d = *a.descriptor;
                if (std::visit([](const auto& x) { return x.cls; }, d) != truth_cls) continue;
                const Vec3 p = std::visit([](const auto& x) { return x.position.vec(); }, d);
                const double dist = std::hypot(p.x() - truth_pos.x(), p.y() - truth_pos.y());
                if (dist < best_d) {
                    best_d = dist;
                    best = &d;
                }
            }
            if (best == nullptr) continue;
            ++row.matched;
            pos_sum += best_d;
            if (const auto* tm = std::get_if<MaterialDescriptor>(&change.truth)) {
                const auto& em = std::get<MaterialDescriptor>(*best);
                const double ta = quad_area(material_corners(*tm));
                area_sum += 100.0 * std::abs(quad_area(material_corners(em)) - ta) / ta;
                ++n_area;
            }
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.position_error = row.matched > 0 ? pos_sum / static_cast<double>(row.matched) : nan;
        row.area_error_pct = n_area > 0 ? area_sum / static_cast<double>(n_area) : nan;
        rows.push_back(row);
    }
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "vps_error,position_error,area_error_pct\n";
    for (const auto& r : rows) {
        s += format_double(r.injected) + "," + format_double(r.position_error) + "," +
             format_double(r.area_error_pct) + "\n";
    }
    return s;
}

std::vector<SweepRow> cmd_eval_sweep(const PipelineConfig& cfg, const std::filesystem::path& scenario_dir,
                                     const std::vector<double>& errors,
                                     const std::filesystem::path& out_dir, std::ostream& log) {
    cfg.validate();
    const SyntheticScenario s = load_scenario(scenario_dir);
    const auto rows = eval_sweep(s, cfg, errors);
    std::filesystem::create_directories(out_dir);
    const std::string csv = format_sweep_csv(rows);
    write_file_atomic(out_dir / "sweep.csv", csv);
    log << csv;
    return rows;
}

SyntheticScenario cmd_synth(std::string_view scenario, std::uint64_t seed,
                            const std::filesystem::path& out_dir, std::ostream& log) {
    SyntheticScenario s = make_scenario(scenario, seed);
    write_scenario(s, out_dir);
    log << "scenario " << s.name << " seed " << seed << ": " << s.map.face_count() << " map faces, "
        << s.world.face_count() << " world faces, " << s.store.size() << " descriptors, "
        << s.changes.size() << " changes\n";
    log_pose(log, "truth", s.truth.pose);
    log_pose(log, "initial", s.initial.pose);
    return s;
}

}  // namespace semmap
