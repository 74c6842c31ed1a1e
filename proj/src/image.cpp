#include "semmap/image.hpp"

#include "semmap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace semmap {

std::size_t PointCloudImage::valid_count() const {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

SegmentedImage resample_nearest(const SegmentedImage& img, int width, int height) {
    if (width == img.width() && height == img.height()) return img;
    if (width <= 0 || height <= 0) throw ContractError("resample target must be non-empty");
    if (static_cast<long long>(width) * img.height() != static_cast<long long>(height) * img.width()) {
        throw ContractError("resample must keep the aspect ratio");
    }
    SegmentedImage out(width, height);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int v = 0; v < height; ++v) {
        const int sv = std::min(img.height() - 1, static_cast<int>(std::floor((v + 0.5) * sy)));
        for (int u = 0; u < width; ++u) {
            const int su = std::min(img.width() - 1, static_cast<int>(std::floor((u + 0.5) * sx)));
            out.set(u, v, img.at(su, sv));
        }
    }
    return out;
}

}  // namespace semmap
