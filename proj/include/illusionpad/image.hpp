#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace illusionpad {

/// Row-major luminance grid; rows run top to bottom, columns left to right.
using ImageArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grayscale raster. Samples are nominally in [0, 1] but stay unbounded
/// internally so that filtering and composition remain linear; clamping
/// happens only on export.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    explicit GrayImage(ImageArray samples);

    int width() const { return static_cast<int>(samples_.cols()); }
    int height() const { return static_cast<int>(samples_.rows()); }
    bool empty() const { return samples_.size() == 0; }

    double& operator()(int x, int y) { return samples_(y, x); }
    double operator()(int x, int y) const { return samples_(y, x); }

    const ImageArray& array() const { return samples_; }
    ImageArray& array() { return samples_; }

    /// Copy of the axis-aligned block starting at (x, y).
    GrayImage crop(int x, int y, int w, int h) const;

    friend bool operator==(const GrayImage& a, const GrayImage& b) {
        return a.samples_.rows() == b.samples_.rows() && a.samples_.cols() == b.samples_.cols() &&
               (a.samples_ == b.samples_).all();
    }

private:
    ImageArray samples_;
};

inline GrayImage operator+(const GrayImage& a, const GrayImage& b) {
    return GrayImage(ImageArray(a.array() + b.array()));
}

/// Bilinear resample to (width, height) using pixel-center alignment.
GrayImage resample_bilinear(const GrayImage& image, int width, int height);

/// 8-bit quantization used for PNG export: round(clamp(v, 0, 1) * 255).
std::vector<unsigned char> to_bytes(const GrayImage& image, double offset = 0.0);

/// Encode as an 8-bit grayscale PNG. `offset` is added before clamping.
std::vector<unsigned char> encode_png(const GrayImage& image, double offset = 0.0);

/// Decode any PNG to luminance in [0, 1]; color inputs are reduced with Rec. 601 weights.
GrayImage decode_png(const std::vector<unsigned char>& bytes);

GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image, double offset = 0.0);

/// Write through a temporary sibling and rename into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_file_atomic(const std::filesystem::path& path, const std::vector<unsigned char>& contents);

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);

/// Emits a warning line on stderr with a fixed prefix.
void log_warning(const std::string& message);

}  // namespace illusionpad
