#include "semmap/vps.hpp"

#include "semmap/errors.hpp"
#include "semmap/image_io.hpp"
#include "semmap/text_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

namespace semmap {

void CandidateGrid::validate() const {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw ContractError("grid radius must be >= 0");
    if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("grid step must be > 0");
    if (!(yaw_span >= 0.0) || !(yaw_span <= 360.0)) {
        throw ContractError("grid yaw span must be in [0, 360]");
    }
    if (!(yaw_step > 0.0) || !std::isfinite(yaw_step)) throw ContractError("grid yaw step must be > 0");
}

int CandidateGrid::half_extent() const { return static_cast<int>(std::floor(radius / step + 1e-9)); }

int CandidateGrid::yaw_half_count() const {
    return static_cast<int>(std::floor(0.5 * yaw_span / yaw_step + 1e-9));
}

std::vector<Candidate> candidate_set(const GeoPose& initial, const CandidateGrid& grid,
                                     const DatumSpec& datum) {
    grid.validate();
    const GridPoint base = geodetic_to_grid(initial, datum);
    const int n = grid.half_extent();
    const int m = grid.yaw_half_count();
    const double r2 = (grid.radius / grid.step) * (grid.radius / grid.step) + 1e-9;
    std::vector<Candidate> out;
    for (int j = -n; j <= n; ++j) {
        for (int i = -n; i <= n; ++i) {
            if (static_cast<double>(i * i + j * j) > r2) continue;
            GridPoint g{base.easting + i * grid.step, base.northing + j * grid.step, base.up};
            if (i == 0 && j == 0) g = base;
            GeoPose p = initial;
            if (i != 0 || j != 0) {
                const GeoPose geo = grid_to_geodetic(g, datum);
                p.lat = geo.lat;
                p.lon = geo.lon;
                p.alt = geo.alt;
            }
            for (int k = -m; k <= m; ++k) {
                GeoPose q = p;
                q.yaw = initial.yaw + k * grid.yaw_step;
                q = q.normalized();
                out.push_back({q, g, i, j, k});
            }
        }
    }
    return out;
}

std::vector<GeoPose> generate_candidates(const PoseState& initial, const CandidateGrid& grid,
                                         const DatumSpec& datum) {
    std::vector<GeoPose> out;
    for (const auto& c : candidate_set(initial.pose, grid, datum)) out.push_back(c.pose);
    return out;
}

namespace {

struct ClassCounts {
    std::array<std::uint32_t, kNumClasses> n{};
};

ClassCounts count_classes(const SegmentedImage& img) {
    ClassCounts c;
    for (ClassId v : img.data()) ++c.n[index_of(v)];
    return c;
}

MatchScore score_with_counts(const SegmentedImage& cam, const ClassCounts& cam_counts,
                             const SegmentedImage& cand) {
    std::array<std::uint32_t, kNumClasses> both{};
    std::array<std::uint32_t, kNumClasses> cand_n{};
    const auto& a = cam.data();
    const auto& b = cand.data();
    std::uint32_t equal = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const auto cb = index_of(b[p]);
        ++cand_n[cb];
        if (a[p] == b[p]) {
            ++equal;
            ++both[cb];
        }
    }
    MatchScore s;
    if (a.empty()) return s;
    s.agreement = static_cast<double>(equal) / static_cast<double>(a.size());
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const std::uint32_t uni = cam_counts.n[c] + cand_n[c] - both[c];
        if (uni == 0) continue;
        ++present;
        sum += static_cast<double>(both[c]) / static_cast<double>(uni);
    }
    s.mean_iou = present == 0 ? 0.0 : sum / present;
    return s;
}

int pick_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// True when a should be preferred over b at equal raw score.
bool closer_to_initial(const CandidateScore& a, const CandidateScore& b) {
    const int da = a.i * a.i + a.j * a.j;
    const int db = b.i * b.i + b.j * b.j;
    if (da != db) return da < db;
    return std::abs(a.k) < std::abs(b.k);
}

}  // namespace

MatchScore score_candidate(const SegmentedImage& cam, const SegmentedImage& cand) {
    if (!cam.same_shape(cand)) throw ContractError("score_candidate: image sizes differ");
    return score_with_counts(cam, count_classes(cam), cand);
}

VpsResult estimate_pose(const SegmentedImage& cam, const SemanticMesh& mesh,
                        const PoseState& initial, const CandidateGrid& grid,
                        const DatumSpec& datum, const VpsOptions& opts) {
    const CameraIntrinsics& k_full = initial.intrinsics;
    k_full.validate();
    if (cam.width() != k_full.width || cam.height() != k_full.height) {
        throw ContractError("camera image is " + std::to_string(cam.width()) + "x" +
                            std::to_string(cam.height()) + " but intrinsics are " +
                            std::to_string(k_full.width) + "x" + std::to_string(k_full.height));
    }
    if (opts.agreement_weight < 0.0 || opts.iou_weight < 0.0 ||
        !(opts.agreement_weight + opts.iou_weight > 0.0)) {
        throw ContractError("metric weights must be non-negative with a positive sum");
    }

    CameraIntrinsics k = k_full;
    SegmentedImage cam_match = cam;
    if (opts.match_width > 0 && opts.match_height > 0 &&
        (opts.match_width != k_full.width || opts.match_height != k_full.height)) {
        k = k_full.resized(opts.match_width, opts.match_height);
        cam_match = resample_nearest(cam, opts.match_width, opts.match_height);
    }

    const auto cands = candidate_set(initial.pose, grid, datum);
    if (cands.empty()) throw ContractError("empty candidate set");

    const SceneRenderer renderer(mesh);
    const ClassCounts cam_counts = count_classes(cam_match);
    RenderOptions ropts;
    ropts.z_near = opts.z_near;
    ropts.threads = 1;

    Heatmap h;
    h.half_extent = grid.half_extent();
    h.records.resize(cands.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const Candidate& cand = cands[c];
            const auto hits = renderer.cast(pose_to_transform(cand.pose, datum), k, ropts);
            const MatchScore s = score_with_counts(cam_match, cam_counts, renderer.classes(hits, k));
            CandidateScore& r = h.records[c];
            r.pose = cand.pose;
            r.position = cand.position;
            r.i = cand.i;
            r.j = cand.j;
            r.k = cand.k;
            r.agreement = s.agreement;
            r.mean_iou = s.mean_iou;
            r.raw = opts.agreement_weight * s.agreement + opts.iou_weight * s.mean_iou;
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(pick_threads(opts.threads)), cands.size());
    if (threads <= 1) {
        work(0, cands.size());
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(work, cands.size() * t / threads, cands.size() * (t + 1) / threads);
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction keeps the result independent of scheduling.
    double total = 0.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < h.records.size(); ++c) {
        const auto& r = h.records[c];
        total += r.raw;
        const auto& b = h.records[best];
        if (r.raw > b.raw || (r.raw == b.raw && closer_to_initial(r, b))) best = c;
    }
    for (auto& r : h.records) {
        r.likelihood = total > 0.0 ? r.raw / total : 1.0 / static_cast<double>(h.records.size());
    }
    h.best = best;

    VpsResult out;
    out.pose.pose = h.records[best].pose;
    out.pose.intrinsics = k_full;
    out.heatmap = std::move(h);
    return out;
}

std::string format_heatmap_csv(const Heatmap& h) {
    std::string s = "easting,northing,yaw,likelihood\n";
    for (const auto& r : h.records) {
        s += format_double(r.position.easting);
        s += ',';
        s += format_double(r.position.northing);
        s += ',';
        s += format_double(r.pose.yaw);
        s += ',';
        s += format_double(r.likelihood);
        s += '\n';
    }
    return s;
}

void write_heatmap_png(const Heatmap& h, const std::filesystem::path& path) {
    const int n = h.half_extent;
    const int side = 2 * n + 1;
    std::vector<double> peak(static_cast<std::size_t>(side) * side, -1.0);
    double top = 0.0;
    for (const auto& r : h.records) {
        const auto idx = static_cast<std::size_t>(n - r.j) * side + static_cast<std::size_t>(r.i + n);
        peak[idx] = std::max(peak[idx], r.likelihood);
        top = std::max(top, r.likelihood);
    }
    RgbImage img{side, side, std::vector<std::uint8_t>(static_cast<std::size_t>(side) * side * 3, 0)};
    for (std::size_t p = 0; p < peak.size(); ++p) {
        if (peak[p] < 0.0) continue;
        // Blue for the least likely nodes, red for the most likely.
        const double s = top > 0.0 ? peak[p] / top : 0.0;
        img.data[3 * p + 0] = static_cast<std::uint8_t>(std::lround(255.0 * s));
        img.data[3 * p + 1] = 0;
        img.data[3 * p + 2] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - s)));
    }
    if (!h.records.empty()) {
        const auto& b = h.records[h.best];
        const auto p = static_cast<std::size_t>(n - b.j) * side + static_cast<std::size_t>(b.i + n);
        img.data[3 * p + 0] = img.data[3 * p + 1] = img.data[3 * p + 2] = 255;
    }
    write_rgb_png(img, path);
}

void emit_heatmap(const Heatmap& h, const std::filesystem::path& stem) {
    auto csv = stem;
    csv += ".csv";
    auto png = stem;
    png += ".png";
    write_file_atomic(csv, format_heatmap_csv(h));
    write_heatmap_png(h, png);
}

}  // namespace semmap
