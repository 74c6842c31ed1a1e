#pragma once

#include "semmap/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace semmap {

/// 8-bit single channel PNG where each value is a class index.
void write_class_png(const SegmentedImage& img, const std::filesystem::path& path);

/// Throws ParseError when a pixel value is outside [0, 8] or the PNG is not
/// 8-bit grayscale.
SegmentedImage read_class_png(const std::filesystem::path& path);

/// RGB visualization using the class palette.
void write_palette_png(const SegmentedImage& img, const std::filesystem::path& path);

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  ///< r, g, b interleaved
};

void write_gray_png(const GrayImage& img, const std::filesystem::path& path);
void write_rgb_png(const RgbImage& img, const std::filesystem::path& path);
GrayImage read_gray_png(const std::filesystem::path& path);

/// One line per valid pixel: "u v x y z frame".
std::string format_point_cloud(const PointCloudImage& cloud);
void write_point_cloud(const PointCloudImage& cloud, const std::filesystem::path& path);

}  // namespace semmap
