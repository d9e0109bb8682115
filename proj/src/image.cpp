#include "illusionpad/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <stdexcept>
#include <system_error>

#include <png.h>

#include "illusionpad/error.hpp"

namespace illusionpad {

GrayImage::GrayImage(int width, int height, double fill) {
    if (width < 0 || height < 0) throw DomainError("image dimensions must be non-negative");
    samples_ = ImageArray::Constant(height, width, fill);
}

GrayImage::GrayImage(ImageArray samples) : samples_(std::move(samples)) {}

GrayImage GrayImage::crop(int x, int y, int w, int h) const {
    if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > width() || y + h > height())
        throw DomainError("crop rectangle lies outside the image");
    return GrayImage(ImageArray(samples_.block(y, x, h, w)));
}

GrayImage resample_bilinear(const GrayImage& image, int width, int height) {
    if (image.empty() || width <= 0 || height <= 0) throw DomainError("cannot resample an empty image");
    if (width == image.width() && height == image.height()) return image;
    GrayImage out(width, height);
    const double sx = double(image.width()) / width;
    const double sy = double(image.height()) / height;
    const int max_x = image.width() - 1;
    const int max_y = image.height() - 1;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(max_y));
        const int y0 = int(fy);
        const int y1 = std::min(y0 + 1, max_y);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(max_x));
            const int x0 = int(fx);
            const int x1 = std::min(x0 + 1, max_x);
            const double wx = fx - x0;
            const double top = image(x0, y0) * (1 - wx) + image(x1, y0) * wx;
            const double bottom = image(x0, y1) * (1 - wx) + image(x1, y1) * wx;
            out(x, y) = top * (1 - wy) + bottom * wy;
        }
    }
    return out;
}

std::vector<unsigned char> to_bytes(const GrayImage& image, double offset) {
    std::vector<unsigned char> bytes(static_cast<size_t>(image.width()) * image.height());
    size_t i = 0;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            bytes[i++] = static_cast<unsigned char>(std::lround(std::clamp(image(x, y) + offset, 0.0, 1.0) * 255.0));
    return bytes;
}

std::vector<unsigned char> encode_png(const GrayImage& image, double offset) {
    if (image.empty()) throw DomainError("cannot encode an empty image");
    const auto pixels = to_bytes(image, offset);
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, pixels.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG encode failed: ") + png.message);
    std::vector<unsigned char> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, pixels.data(), 0, nullptr))
        throw std::runtime_error(std::string("PNG encode failed: ") + png.message);
    out.resize(size);
    return out;
}

GrayImage decode_png(const std::vector<unsigned char>& bytes) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
        throw InputError(std::string("PNG decode failed: ") + png.message);
    const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
    png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;
    std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&png);
        throw InputError(std::string("PNG decode failed: ") + png.message);
    }
    GrayImage out(static_cast<int>(png.width), static_cast<int>(png.height));
    size_t i = 0;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x, i += channels) {
            out(x, y) = gray ? pixels[i] / 255.0
                             : (0.299 * pixels[i] + 0.587 * pixels[i + 1] + 0.114 * pixels[i + 2]) / 255.0;
        }
    }
    return out;
}

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

GrayImage read_png(const std::filesystem::path& path) { return decode_png(read_file_bytes(path)); }

void write_png(const std::filesystem::path& path, const GrayImage& image, double offset) {
    write_file_atomic(path, encode_png(image, offset));
}

namespace {

template <typename Bytes>
void write_atomic_impl(const std::filesystem::path& path, const Bytes& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(contents.data()), static_cast<std::streamsize>(contents.size()));
        if (!out) throw InputError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError("cannot move " + tmp.string() + " into place");
    }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    write_atomic_impl(path, contents);
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<unsigned char>& contents) {
    write_atomic_impl(path, contents);
}

void log_warning(const std::string& message) { std::clog << "illusionpad: warning: " << message << '\n'; }

}  // namespace illusionpad
