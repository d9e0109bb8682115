#pragma once

// Frequency-domain filtering on the image's own DFT grid.
//
// Frequencies are expressed as signed cycles per image (c/im): bin k of an
// N-point axis maps to k for k < N/2 and to k - N otherwise. Transforms are
// real-to-complex, so only the non-negative horizontal half-plane is stored;
// every gain used here is even in both axes, which keeps filtered output real.

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "illusionpad/geometry.hpp"
#include "illusionpad/image.hpp"

namespace illusionpad {

using ComplexArray = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Half-plane DFT of a real image: `coeffs` is height x (width / 2 + 1).
struct Spectrum {
    int width = 0;
    int height = 0;
    ComplexArray coeffs;
};

constexpr int signed_cycles(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }

/// Unnormalized forward DFT.
Spectrum forward_transform(const GrayImage& image);

/// Inverse DFT scaled by 1 / (width * height).
GrayImage inverse_transform(const Spectrum& spectrum);

/// Multiplies every stored bin by gain(n_x, n_y), with (n_x, n_y) in signed c/im.
template <typename GainFn>
Spectrum apply_gain(const Spectrum& in, GainFn&& gain) {
    Spectrum out{in.width, in.height, ComplexArray(in.coeffs.rows(), in.coeffs.cols())};
    for (int ky = 0; ky < in.height; ++ky) {
        const double ny = signed_cycles(ky, in.height);
        for (int kx = 0; kx < in.coeffs.cols(); ++kx)
            out.coeffs(ky, kx) = in.coeffs(ky, kx) * gain(double(kx), ny);
    }
    return out;
}

enum class FilterKind { lowpass, highpass };

/// Gaussian filter parameterized by its vertical frequency-domain sigma (c/im).
/// The horizontal sigma follows from the image aspect so that the spatial
/// footprint is isotropic: sigma_x = sigma_y * N_x / N_y.
struct GaussianFilterSpec {
    FilterKind kind = FilterKind::lowpass;
    double sigma_y = 0.0;

    double sigma_x(int width, int height) const { return sigma_y * double(width) / double(height); }
};

/// Gain at bin (n_x, n_y) c/im for a filter applied to a width x height grid.
double gaussian_gain(const GaussianFilterSpec& spec, const Eigen::Vector2d& bin, int width, int height);

GrayImage apply_filter(const GrayImage& image, const GaussianFilterSpec& spec);
Spectrum apply_filter(const Spectrum& spectrum, const GaussianFilterSpec& spec);

/// Hybrid image: composed = user_high + surfer_low, kept unclamped.
struct HybridImage {
    GrayImage composed;
    GrayImage user_high;
    GrayImage surfer_low;
    double sigma_lf = 0.0;
    double sigma_hf = 0.0;
};

constexpr double kDefaultSigmaLf = 35.0;

/// Sigmas are native c/im; on a grid with cycle_scale s the filters run at sigma / s.
HybridImage compose_hybrid(const GrayImage& user_img, const GrayImage& surfer_img, double sigma_lf,
                           double sigma_hf, double cycle_scale = 1.0);

struct ProfilePoint {
    double magnitude = 0.0;  // bucket center
    double log_power = 0.0;  // sum of ln(1 + |X|) over bins in the bucket
};

using SpectrumProfile = std::vector<ProfilePoint>;

/// 1D spectrum: ln(1 + |X(f)|) summed over bins whose |f| (c/im) rounds to
/// the same integer, from DC to the grid corner.
SpectrumProfile spectrum_profile(const GrayImage& image);

/// Same aggregation over perceived magnitudes |f_p| (c/d) for a viewing
/// position, bucketed at `bucket_cpd` resolution.
SpectrumProfile perceived_spectrum_profile(const GrayImage& image, const DisplayGeometry& display,
                                           const ViewingPosition& pos, double bucket_cpd = 0.5);

/// CSV with header `magnitude_c_per_im,log_power` (or the given magnitude column name).
std::string profile_csv(const SpectrumProfile& profile, const std::string& magnitude_column = "magnitude_c_per_im");

}  // namespace illusionpad
