// Semantic visual positioning: grid search over hypothesized poses, scoring
// each candidate render against the segmented camera image.
#pragma once

#include "semmap/image.hpp"
#include "semmap/mesh.hpp"
#include "semmap/renderer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace semmap {

/// Search grid around the initial pose. Positions form a square lattice of
/// `step` spacing clipped to a disc of `radius`; yaw takes every multiple of
/// `yaw_step` within +-yaw_span/2 of the initial yaw.
struct CandidateGrid {
    double radius = 40.0;
    double step = 1.0;
    double yaw_span = 40.0;
    double yaw_step = 1.0;

    void validate() const;

    /// Largest lattice index along either axis.
    [[nodiscard]] int half_extent() const;
    [[nodiscard]] int yaw_half_count() const;
};

/// One hypothesized pose with its lattice coordinates.
struct Candidate {
    GeoPose pose;
    GridPoint position;
    int i = 0;  ///< easting offset in steps
    int j = 0;  ///< northing offset in steps
    int k = 0;  ///< yaw offset in steps
};

/// Candidates in deterministic order: northing offset ascending, then
/// easting offset ascending, then yaw ascending. Pitch, roll and altitude
/// are copied from the initial pose.
std::vector<Candidate> candidate_set(const GeoPose& initial, const CandidateGrid& grid,
                                     const DatumSpec& datum);

std::vector<GeoPose> generate_candidates(const PoseState& initial, const CandidateGrid& grid,
                                         const DatumSpec& datum);

struct MatchScore {
    double agreement = 0.0;
    double mean_iou = 0.0;
};

/// Pixel agreement and mean IoU over the classes present in either image.
/// Throws ContractError on a size mismatch.
MatchScore score_candidate(const SegmentedImage& cam, const SegmentedImage& cand);

struct CandidateScore {
    GeoPose pose;
    GridPoint position;
    int i = 0, j = 0, k = 0;
    double agreement = 0.0;
    double mean_iou = 0.0;
    double raw = 0.0;
    double likelihood = 0.0;
};

struct Heatmap {
    std::vector<CandidateScore> records;
    std::size_t best = 0;
    int half_extent = 0;  ///< lattice spans [-half_extent, half_extent] on both axes
};

struct VpsOptions {
    double agreement_weight = 0.5;
    double iou_weight = 0.5;
    /// Matching resolution; 0 keeps the camera resolution.
    int match_width = 0;
    int match_height = 0;
    double z_near = kDefaultZNear;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;
};

struct VpsResult {
    PoseState pose;
    Heatmap heatmap;
};

/// Best candidate by weighted score. Ties go to the candidate nearest the
/// initial position, then the smallest yaw change, then candidate order.
/// The camera image must match the initial intrinsics' size.
VpsResult estimate_pose(const SegmentedImage& cam, const SemanticMesh& mesh,
                        const PoseState& initial, const CandidateGrid& grid,
                        const DatumSpec& datum, const VpsOptions& opts = {});

/// CSV "easting,northing,yaw,likelihood", one row per candidate in order.
std::string format_heatmap_csv(const Heatmap& h);

/// Likelihood image, max over yaw per lattice position, north up. One pixel
/// per lattice node; nodes outside the disc are black and the best position
/// is white.
void write_heatmap_png(const Heatmap& h, const std::filesystem::path& path);

/// Writes `<stem>.csv` and `<stem>.png`.
void emit_heatmap(const Heatmap& h, const std::filesystem::path& stem);

}  // namespace semmap
