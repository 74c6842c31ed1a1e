#pragma once

#include "semmap/geometry.hpp"
#include "semmap/semantic_class.hpp"

#include <cstdint>
#include <vector>

namespace semmap {

/// Row-major grid of class indices. Used for camera input, virtual-camera
/// renders and anything else that labels pixels with a semantic class.
class SegmentedImage {
public:
    SegmentedImage() = default;
    SegmentedImage(int width, int height, ClassId fill = ClassId::Sky)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    [[nodiscard]] ClassId at(int u, int v) const { return data_[index(u, v)]; }
    void set(int u, int v, ClassId c) { data_[index(u, v)] = c; }

    [[nodiscard]] const std::vector<ClassId>& data() const { return data_; }
    std::vector<ClassId>& data() { return data_; }

    [[nodiscard]] bool same_shape(const SegmentedImage& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    bool operator==(const SegmentedImage&) const = default;

private:
    [[nodiscard]] std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<ClassId> data_;
};

enum class Frame { Local, World };

/// Per-pixel 3D points with a validity flag. Invalid pixels carry no point.
class PointCloudImage {
public:
    PointCloudImage() = default;
    PointCloudImage(int width, int height, Frame frame)
        : width_(width), height_(height), frame_(frame),
          points_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Vec3::Zero()),
          valid_(points_.size(), 0) {}

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] Frame frame() const { return frame_; }
    void set_frame(Frame f) { frame_ = f; }

    [[nodiscard]] bool valid(int u, int v) const { return valid_[index(u, v)] != 0; }
    [[nodiscard]] const Vec3& point(int u, int v) const { return points_[index(u, v)]; }

    void set(int u, int v, const Vec3& p) {
        points_[index(u, v)] = p;
        valid_[index(u, v)] = 1;
    }
    void clear(int u, int v) {
        points_[index(u, v)] = Vec3::Zero();
        valid_[index(u, v)] = 0;
    }

    [[nodiscard]] std::size_t valid_count() const;

    bool operator==(const PointCloudImage& o) const {
        return width_ == o.width_ && height_ == o.height_ && frame_ == o.frame_ &&
               points_ == o.points_ && valid_ == o.valid_;
    }

private:
    [[nodiscard]] std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    Frame frame_ = Frame::Local;
    std::vector<Vec3> points_;
    std::vector<std::uint8_t> valid_;
};

/// Nearest-neighbour resample onto a grid of the same aspect ratio. Each
/// output pixel takes the input pixel under its center.
SegmentedImage resample_nearest(const SegmentedImage& img, int width, int height);

}  // namespace semmap
