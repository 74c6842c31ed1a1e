// Per-pixel semantic change between the camera image and a render of the map.
#pragma once

#include "semmap/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace semmap {

class ChangeMask {
public:
    ChangeMask() = default;
    ChangeMask(int width, int height)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] bool at(int u, int v) const { return data_[index(u, v)] != 0; }
    void set(int u, int v, bool changed) { data_[index(u, v)] = changed ? 1 : 0; }
    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }
    [[nodiscard]] std::size_t count() const;

    bool operator==(const ChangeMask&) const = default;

private:
    [[nodiscard]] std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

enum class ChangeDirection { Added, Removed };

struct PixelCoord {
    int u = 0;
    int v = 0;
    bool operator==(const PixelCoord&) const = default;
};

struct ChangeRegion {
    std::vector<PixelCoord> pixels;  ///< raster order
    ClassId cam_class = ClassId::Sky;
    ClassId render_class = ClassId::Sky;
    ChangeDirection direction = ChangeDirection::Added;
    double area_fraction = 0.0;
    bool touches_border = false;
    int u_min = 0, v_min = 0, u_max = 0, v_max = 0;
};

/// 1 where the class indices differ. Throws ContractError on a size mismatch.
ChangeMask detect_changes(const SegmentedImage& cam, const SegmentedImage& rendered);

/// 4-connected component labels, 0 for background and 1.. in order of each
/// component's first pixel in raster order. Returns the component count.
int label_components(const ChangeMask& mask, std::vector<int>& labels);

/// Zero every 4-connected component smaller than min_fraction of the image.
/// Components at or above the threshold are kept.
ChangeMask filter_regions(const ChangeMask& mask, double min_fraction = 0.05);

/// One region per component, ordered by first pixel in raster order.
std::vector<ChangeRegion> extract_regions(const ChangeMask& mask, const SegmentedImage& cam,
                                          const SegmentedImage& rendered);

std::string_view direction_name(ChangeDirection d);

void write_mask_png(const ChangeMask& mask, const std::filesystem::path& path);

/// One line per region:
/// "<direction> <cam class> <render class> <pixels> <u_min> <v_min> <u_max> <v_max> <border 0|1>"
std::string format_regions(const std::vector<ChangeRegion>& regions);

}  // namespace semmap
