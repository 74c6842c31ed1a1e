#include "semmap/change_detection.hpp"

#include "semmap/errors.hpp"
#include "semmap/image_io.hpp"
#include "semmap/text_io.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace semmap {

std::size_t ChangeMask::count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ChangeMask detect_changes(const SegmentedImage& cam, const SegmentedImage& rendered) {
    if (!cam.same_shape(rendered)) throw ContractError("detect_changes: image sizes differ");
    ChangeMask m(cam.width(), cam.height());
    auto& out = m.data();
    const auto& a = cam.data();
    const auto& b = rendered.data();
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] != b[i] ? 1 : 0;
    return m;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

ClassId mode_class(const std::array<int, kNumClasses>& counts) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<ClassId>(best);
}

}  // namespace

int label_components(const ChangeMask& mask, std::vector<int>& labels) {
    const int w = mask.width();
    const int h = mask.height();
    const auto& d = mask.data();
    labels.assign(d.size(), 0);
    // Two-pass union-find; provisional labels are assigned in raster order,
    // and each set's root is its smallest label, so renumbering roots in
    // first-seen order gives labels in first-pixel order.
    std::vector<int> parent{0};
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * w + u;
            if (d[i] == 0) continue;
            const int left = u > 0 && d[i - 1] ? labels[i - 1] : 0;
            const int up = v > 0 && d[i - w] ? labels[i - w] : 0;
            if (left == 0 && up == 0) {
                const int l = static_cast<int>(parent.size());
                parent.push_back(l);
                labels[i] = l;
            } else if (left != 0 && up != 0) {
                const int a = find_root(parent, left);
                const int b = find_root(parent, up);
                const int lo = std::min(a, b);
                parent[a] = lo;
                parent[b] = lo;
                labels[i] = lo;
            } else {
                labels[i] = find_root(parent, left != 0 ? left : up);
            }
        }
    }
    std::vector<int> final_label(parent.size(), 0);
    int n = 0;
    for (std::size_t l = 1; l < parent.size(); ++l) {
        const int r = find_root(parent, static_cast<int>(l));
        if (r == static_cast<int>(l)) final_label[l] = ++n;
    }
    for (auto& l : labels) {
        if (l != 0) l = final_label[find_root(parent, l)];
    }
    return n;
}

ChangeMask filter_regions(const ChangeMask& mask, double min_fraction) {
    if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
        throw ContractError("min_fraction must be in [0, 1]");
    }
    std::vector<int> labels;
    const int n = label_components(mask, labels);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(n) + 1, 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    const double threshold =
        min_fraction * static_cast<double>(mask.width()) * static_cast<double>(mask.height());
    ChangeMask out = mask;
    auto& d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (labels[i] != 0 && static_cast<double>(sizes[static_cast<std::size_t>(labels[i])]) < threshold) {
            d[i] = 0;
        }
    }
    return out;
}

std::vector<ChangeRegion> extract_regions(const ChangeMask& mask, const SegmentedImage& cam,
                                          const SegmentedImage& rendered) {
    if (cam.width() != mask.width() || cam.height() != mask.height() || !cam.same_shape(rendered)) {
        throw ContractError("extract_regions: image sizes differ");
    }
    std::vector<int> labels;
    const int n = label_components(mask, labels);
    const int w = mask.width();
    const int h = mask.height();
    std::vector<ChangeRegion> regions(static_cast<std::size_t>(n));
    std::vector<std::array<int, kNumClasses>> cam_counts(regions.size(), std::array<int, kNumClasses>{});
    std::vector<std::array<int, kNumClasses>> ren_counts(regions.size(), std::array<int, kNumClasses>{});
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const int l = labels[static_cast<std::size_t>(v) * w + u];
            if (l == 0) continue;
            auto& r = regions[static_cast<std::size_t>(l - 1)];
            if (r.pixels.empty()) {
                r.u_min = r.u_max = u;
                r.v_min = r.v_max = v;
            }
            r.pixels.push_back({u, v});
            r.u_min = std::min(r.u_min, u);
            r.u_max = std::max(r.u_max, u);
            r.v_min = std::min(r.v_min, v);
            r.v_max = std::max(r.v_max, v);
            if (u == 0 || v == 0 || u == w - 1 || v == h - 1) r.touches_border = true;
            ++cam_counts[static_cast<std::size_t>(l - 1)][index_of(cam.at(u, v))];
            ++ren_counts[static_cast<std::size_t>(l - 1)][index_of(rendered.at(u, v))];
        }
    }
    const double total = static_cast<double>(w) * static_cast<double>(h);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        auto& r = regions[i];
        r.cam_class = mode_class(cam_counts[i]);
        r.render_class = mode_class(ren_counts[i]);
        r.direction = is_dynamic(r.render_class) && !is_dynamic(r.cam_class) ? ChangeDirection::Removed
                                                                             : ChangeDirection::Added;
        r.area_fraction = static_cast<double>(r.pixels.size()) / total;
    }
    return regions;
}

std::string_view direction_name(ChangeDirection d) {
    return d == ChangeDirection::Added ? "added" : "removed";
}

void write_mask_png(const ChangeMask& mask, const std::filesystem::path& path) {
    GrayImage img{mask.width(), mask.height(), std::vector<std::uint8_t>(mask.data().size())};
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = mask.data()[i] ? 255 : 0;
    write_gray_png(img, path);
}

std::string format_regions(const std::vector<ChangeRegion>& regions) {
    std::string s;
    for (const auto& r : regions) {
        s += direction_name(r.direction);
        s += ' ';
        s += class_name(r.cam_class);
        s += ' ';
        s += class_name(r.render_class);
        s += ' ' + std::to_string(r.pixels.size()) + ' ' + std::to_string(r.u_min) + ' ' +
             std::to_string(r.v_min) + ' ' + std::to_string(r.u_max) + ' ' + std::to_string(r.v_max) +
             (r.touches_border ? " 1\n" : " 0\n");
    }
    return s;
}

}  // namespace semmap
