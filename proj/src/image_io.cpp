#include "semmap/image_io.hpp"

#include "semmap/errors.hpp"
#include "semmap/text_io.hpp"

#include <png.h>

#include <cstring>

namespace semmap {

namespace {

struct MemReader {
    const std::string* buf;
    std::size_t pos;
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    *err = msg;
    png_longjmp(png, 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

void write_mem(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void flush_mem(png_structp) {}

void read_mem(png_structp png, png_bytep data, png_size_t len) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + len > r->buf->size()) png_error(png, "truncated PNG data");
    std::memcpy(data, r->buf->data() + r->pos, len);
    r->pos += len;
}

std::vector<unsigned char> encode_png(int width, int height, int channels,
                                      const std::uint8_t* pixels) {
    std::string err;
    std::vector<unsigned char> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warn_fn);
    if (png == nullptr) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + err);
    }
    png_set_write_fn(png, &out, write_mem, flush_mem);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(pixels + stride * static_cast<std::size_t>(y)));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace

void write_gray_png(const GrayImage& img, const std::filesystem::path& path) {
    write_bytes(path, encode_png(img.width, img.height, 1, img.data.data()));
}

void write_rgb_png(const RgbImage& img, const std::filesystem::path& path) {
    write_bytes(path, encode_png(img.width, img.height, 3, img.data.data()));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
        throw ParseError(path.string() + ": not a PNG file");
    }
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warn_fn);
    if (png == nullptr) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    GrayImage img;
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError(path.string() + ": PNG decode failed: " + err);
    }
    MemReader reader{&bytes, 0};
    png_set_read_fn(png, &reader, read_mem);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError(path.string() + ": expected an 8-bit single-channel PNG");
    }
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.data.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, img.data.data() + static_cast<std::size_t>(y) * img.width, nullptr);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_class_png(const SegmentedImage& img, const std::filesystem::path& path) {
    GrayImage g{img.width(), img.height(), {}};
    g.data.reserve(img.size());
    for (ClassId c : img.data()) g.data.push_back(static_cast<std::uint8_t>(c));
    write_gray_png(g, path);
}

SegmentedImage read_class_png(const std::filesystem::path& path) {
    const GrayImage g = read_gray_png(path);
    SegmentedImage img(g.width, g.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (g.data[i] >= kNumClasses) {
            throw ParseError(path.string() + ": pixel value " + std::to_string(g.data[i]) +
                             " is not a class index");
        }
        img.data()[i] = static_cast<ClassId>(g.data[i]);
    }
    return img;
}

void write_palette_png(const SegmentedImage& img, const std::filesystem::path& path) {
    RgbImage rgb{img.width(), img.height(), {}};
    rgb.data.reserve(img.size() * 3);
    for (ClassId c : img.data()) {
        const Rgb& col = kPalette[index_of(c)];
        rgb.data.push_back(col.r);
        rgb.data.push_back(col.g);
        rgb.data.push_back(col.b);
    }
    write_rgb_png(rgb, path);
}

std::string format_point_cloud(const PointCloudImage& cloud) {
    std::string out;
    const char* tag = cloud.frame() == Frame::Local ? "local" : "world";
    for (int v = 0; v < cloud.height(); ++v) {
        for (int u = 0; u < cloud.width(); ++u) {
            if (!cloud.valid(u, v)) continue;
            const Vec3& p = cloud.point(u, v);
            out += std::to_string(u) + ' ' + std::to_string(v) + ' ' + format_double(p.x()) + ' ' +
                   format_double(p.y()) + ' ' + format_double(p.z()) + ' ' + tag + '\n';
        }
    }
    return out;
}

void write_point_cloud(const PointCloudImage& cloud, const std::filesystem::path& path) {
    write_file_atomic(path, format_point_cloud(cloud));
}

}  // namespace semmap
