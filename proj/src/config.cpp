#include "semmap/config.hpp"

#include "semmap/errors.hpp"
#include "semmap/text_io.hpp"

#include <functional>

namespace semmap {

namespace {

double to_double(std::string_view key, std::string_view v) {
    double d;
    if (!parse_double(trim(v), d)) {
        throw ContractError("bad number for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return d;
}

int to_int(std::string_view key, std::string_view v) {
    long long i;
    if (!parse_int(trim(v), i)) {
        throw ContractError("bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return static_cast<int>(i);
}

std::array<double, 3> to_triple(std::string_view key, std::string_view v) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) throw ContractError(std::string(key) + " expects three comma-separated values");
    return {to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])};
}

std::string triple_str(const std::array<double, 3>& t) {
    return format_double(t[0]) + "," + format_double(t[1]) + "," + format_double(t[2]);
}

struct Entry {
    const char* key;
    const char* comment;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, std::string_view)> put;
};

#define SEMMAP_DOUBLE(K, C, F)                                                        \
    Entry{K, C, [](const PipelineConfig& c) { return format_double(c.F); },          \
          [](PipelineConfig& c, std::string_view v) { c.F = to_double(K, v); }}
#define SEMMAP_INT(K, C, F)                                                           \
    Entry{K, C, [](const PipelineConfig& c) { return std::to_string(c.F); },         \
          [](PipelineConfig& c, std::string_view v) { c.F = to_int(K, v); }}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        Entry{"datum.mode", "identity-local or transverse-mercator",
              [](const PipelineConfig& c) {
                  return std::string(c.datum.mode == DatumMode::IdentityLocal ? "identity-local"
                                                                              : "transverse-mercator");
              },
              [](PipelineConfig& c, std::string_view v) {
                  v = trim(v);
                  if (v == "identity-local") {
                      c.datum.mode = DatumMode::IdentityLocal;
                  } else if (v == "transverse-mercator") {
                      c.datum.mode = DatumMode::TransverseMercator;
                  } else {
                      throw ContractError("datum.mode must be identity-local or transverse-mercator");
                  }
              }},
        SEMMAP_DOUBLE("datum.semi_major", nullptr, datum.semi_major),
        SEMMAP_DOUBLE("datum.flattening", nullptr, datum.flattening),
        SEMMAP_DOUBLE("datum.central_meridian", nullptr, datum.central_meridian),
        SEMMAP_DOUBLE("datum.latitude_of_origin", nullptr, datum.latitude_of_origin),
        SEMMAP_DOUBLE("datum.scale_factor", nullptr, datum.scale_factor),
        SEMMAP_DOUBLE("datum.false_easting", nullptr, datum.false_easting),
        SEMMAP_DOUBLE("datum.false_northing", nullptr, datum.false_northing),
        SEMMAP_INT("camera.width", "0: size of the input image", camera_width),
        SEMMAP_INT("camera.height", nullptr, camera_height),
        SEMMAP_DOUBLE("camera.focal_px", "0: derived from camera.diag_fov", camera_focal_px),
        SEMMAP_DOUBLE("camera.cx", "negative: image center", camera_cx),
        SEMMAP_DOUBLE("camera.cy", nullptr, camera_cy),
        SEMMAP_DOUBLE("camera.diag_fov", "degrees", camera_diag_fov),
        SEMMAP_DOUBLE("vps.radius", "search radius, 40 m", grid.radius),
        SEMMAP_DOUBLE("vps.step", "lattice resolution, 1 m", grid.step),
        SEMMAP_DOUBLE("vps.yaw_span", "total yaw range, 40 deg", grid.yaw_span),
        SEMMAP_DOUBLE("vps.yaw_step", "yaw separation, 1 deg", grid.yaw_step),
        SEMMAP_DOUBLE("vps.weight_agreement", nullptr, vps.agreement_weight),
        SEMMAP_DOUBLE("vps.weight_iou", nullptr, vps.iou_weight),
        SEMMAP_INT("vps.match_width", "0: camera resolution", vps.match_width),
        SEMMAP_INT("vps.match_height", nullptr, vps.match_height),
        SEMMAP_INT("vps.threads", "0: all cores", vps.threads),
        SEMMAP_DOUBLE("render.z_near", "meters", render.z_near),
        SEMMAP_DOUBLE("render.lidar_resolution", "virtual LIDAR resolution, 0.1 m", render.lidar_resolution),
        SEMMAP_INT("render.threads", "0: all cores", render.threads),
        SEMMAP_DOUBLE("change.min_fraction", "regions under 5% of the image are dropped", min_fraction),
        SEMMAP_DOUBLE("update.coplanarity", nullptr, tolerances.coplanarity),
        SEMMAP_DOUBLE("update.rectangularity", nullptr, tolerances.rectangularity),
        SEMMAP_DOUBLE("update.perpendicularity", nullptr, tolerances.perpendicularity),
        SEMMAP_DOUBLE("update.max_distance", "point cloud accuracy drops beyond 50 m", tolerances.max_distance),
        Entry{"dynamic.pedestrian", "width,depth,height in meters",
              [](const PipelineConfig& c) { return triple_str(c.dims.pedestrian); },
              [](PipelineConfig& c, std::string_view v) { c.dims.pedestrian = to_triple("dynamic.pedestrian", v); }},
        Entry{"dynamic.chair", nullptr,
              [](const PipelineConfig& c) { return triple_str(c.dims.chair); },
              [](PipelineConfig& c, std::string_view v) { c.dims.chair = to_triple("dynamic.chair", v); }},
        Entry{"output.dir", nullptr, [](const PipelineConfig& c) { return c.output_dir; },
              [](PipelineConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); }},
        Entry{"debug.fail_stage", "empty: never fail",
              [](const PipelineConfig& c) { return c.fail_stage; },
              [](PipelineConfig& c, std::string_view v) { c.fail_stage = std::string(trim(v)); }},
    };
    return table;
}

#undef SEMMAP_DOUBLE
#undef SEMMAP_INT

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    for (const auto& e : entries()) {
        if (key == e.key) {
            e.put(*this, value);
            return;
        }
    }
    throw ContractError("unknown config key '" + std::string(key) + "'");
}

CameraIntrinsics PipelineConfig::intrinsics(int image_width, int image_height) const {
    const int w = camera_width > 0 ? camera_width : image_width;
    const int h = camera_height > 0 ? camera_height : image_height;
    if (w <= 0 || h <= 0) throw ContractError("camera size unknown: set camera.width and camera.height");
    CameraIntrinsics k = CameraIntrinsics::from_diagonal_fov(w, h, camera_diag_fov);
    if (camera_focal_px > 0.0) k.focal_px = camera_focal_px;
    if (camera_cx >= 0.0) k.cx = camera_cx;
    if (camera_cy >= 0.0) k.cy = camera_cy;
    k.validate();
    return k;
}

void PipelineConfig::validate() const {
    datum.validate();
    grid.validate();
    if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) throw ContractError("change.min_fraction must be in [0, 1]");
    if (!(render.z_near > 0.0)) throw ContractError("render.z_near must be > 0");
    if (!(render.lidar_resolution >= 0.0)) throw ContractError("render.lidar_resolution must be >= 0");
    if (!(camera_diag_fov > 0.0 && camera_diag_fov < 180.0)) {
        throw ContractError("camera.diag_fov must be in (0, 180)");
    }
    for (const auto& d : {dims.pedestrian, dims.chair}) {
        if (!(d[0] > 0.0 && d[1] > 0.0 && d[2] > 0.0)) throw ContractError("dynamic dimensions must be > 0");
    }
    if ((vps.match_width > 0) != (vps.match_height > 0)) {
        throw ContractError("set both vps.match_width and vps.match_height or neither");
    }
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.emplace_back(e.key);
    return out;
}

PipelineConfig parse_config(std::string_view text, const std::string& source) {
    PipelineConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
        try {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ContractError& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path), path.string());
}

std::string format_config(const PipelineConfig& cfg) {
    std::string s;
    for (const auto& e : entries()) {
        if (e.comment != nullptr) s += std::string("# ") + e.comment + "\n";
        s += std::string(e.key) + " = " + e.get(cfg) + "\n";
    }
    return s;
}

GeoPose parse_pose(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 6) throw ContractError("pose must be lat,lon,alt,yaw,pitch,roll");
    std::array<double, 6> v{};
    for (int i = 0; i < 6; ++i) v[i] = to_double("pose", parts[i]);
    return GeoPose{v[0], v[1], v[2], v[3], v[4], v[5]};
}

std::string format_pose(const GeoPose& p) {
    return format_double(p.lat) + "," + format_double(p.lon) + "," + format_double(p.alt) + "," +
           format_double(p.yaw) + "," + format_double(p.pitch) + "," + format_double(p.roll);
}

}  // namespace semmap
