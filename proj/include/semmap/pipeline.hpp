// End-to-end commands: render, localize, update and the pose-error sweep.
#pragma once

#include "semmap/change_detection.hpp"
#include "semmap/config.hpp"
#include "semmap/descriptors.hpp"
#include "semmap/synth.hpp"
#include "semmap/vps.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace semmap {

/// One record per filtered change region.
struct AuditRecord {
    std::size_t region = 0;
    ChangeDirection direction = ChangeDirection::Added;
    ClassId cam_class = ClassId::Sky;
    ClassId render_class = ClassId::Sky;
    std::size_t pixels = 0;
    bool touches_border = false;
    std::string verdict;  ///< update, removal or skip
    std::string reason;   ///< failed gate or skip cause; empty otherwise
    std::optional<Descriptor> descriptor;
    std::optional<DescriptorId> removed_id;
};

/// JSON lines, one record per line.
std::string format_audit(const std::vector<AuditRecord>& records);

struct UpdateResult {
    PoseState pose;  ///< pose used for rendering and estimation
    std::optional<Heatmap> heatmap;
    ChangeMask mask;
    std::vector<ChangeRegion> regions;
    std::vector<AuditRecord> audit;
    SemanticMesh mesh;
    DescriptorStore store;
};

/// The update pipeline on in-memory data. With `localize` false the initial
/// pose is used as is. Stage failures raise StageError naming the stage.
UpdateResult update_map(const PipelineConfig& cfg, const SemanticMesh& mesh,
                        const DescriptorStore& store, const SegmentedImage& cam,
                        const PoseState& initial, bool localize = true);

/// Writes render.png, render_palette.png and cloud.txt to the output dir.
void cmd_render(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                const GeoPose& pose, const std::filesystem::path& out_dir);

/// Writes pose.txt and heatmap.csv / heatmap.png; prints the chosen pose.
PoseState cmd_localize(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                       const std::filesystem::path& image_path, const GeoPose& pose,
                       const std::filesystem::path& out_dir, std::ostream& log);

/// Updates the mesh and store files in place (write-then-rename, only after
/// every stage succeeded) and writes pose.txt, heatmap, mask.png,
/// regions.txt and audit.jsonl to the output dir.
UpdateResult cmd_update(const PipelineConfig& cfg, const std::filesystem::path& mesh_path,
                        const std::filesystem::path& store_path,
                        const std::filesystem::path& image_path, const GeoPose& pose,
                        const std::filesystem::path& out_dir, std::ostream& log);

struct SweepRow {
    double injected = 0.0;
    double position_error = 0.0;  ///< mean 2D distance over matched added descriptors
    double area_error_pct = 0.0;  ///< mean over matched material descriptors
    std::size_t matched = 0;
};

/// Runs the update at the true pose shifted by each error along the
/// scenario's sweep direction, skipping localization.
std::vector<SweepRow> eval_sweep(const SyntheticScenario& s, const PipelineConfig& cfg,
                                 const std::vector<double>& errors);

/// CSV "vps_error,position_error,area_error_pct".
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

std::vector<SweepRow> cmd_eval_sweep(const PipelineConfig& cfg, const std::filesystem::path& scenario_dir,
                                     const std::vector<double>& errors,
                                     const std::filesystem::path& out_dir, std::ostream& log);

/// Generates a scenario into the output dir and returns it.
SyntheticScenario cmd_synth(std::string_view scenario, std::uint64_t seed,
                            const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace semmap
