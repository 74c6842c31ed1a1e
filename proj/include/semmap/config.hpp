// Flat key=value pipeline configuration.
#pragma once

#include "semmap/descriptor_estimation.hpp"
#include "semmap/renderer.hpp"
#include "semmap/vps.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace semmap {

struct PipelineConfig {
    DatumSpec datum;

    // Camera model. A zero width/height takes the size of the input image;
    // a zero focal length derives it from the diagonal field of view; a
    // negative principal point coordinate means the image center.
    int camera_width = 0;
    int camera_height = 0;
    double camera_focal_px = 0.0;
    double camera_cx = -1.0;
    double camera_cy = -1.0;
    double camera_diag_fov = 120.0;

    CandidateGrid grid;
    VpsOptions vps;
    RenderOptions render;
    double min_fraction = 0.05;
    Tolerances tolerances;
    DynamicDimensions dims;
    std::string output_dir = "out";

    /// Name of a pipeline stage that should fail on purpose (testing aid).
    std::string fail_stage;

    /// Apply one "key=value" setting. Throws ContractError for an unknown key
    /// or a malformed value.
    void set(std::string_view key, std::string_view value);

    /// Intrinsics for an image of the given size (used when the configured
    /// size is zero).
    [[nodiscard]] CameraIntrinsics intrinsics(int image_width = 0, int image_height = 0) const;

    void validate() const;
};

/// Every recognized key in file order, for documentation and round trips.
std::vector<std::string> config_keys();

/// Lines "key = value", '#' starts a comment. Throws ParseError with the
/// line number for unknown keys or bad values.
PipelineConfig parse_config(std::string_view text, const std::string& source = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& cfg);

/// Parse "lat,lon,alt,yaw,pitch,roll".
GeoPose parse_pose(std::string_view text);
std::string format_pose(const GeoPose& p);

}  // namespace semmap
