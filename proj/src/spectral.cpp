#include "illusionpad/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>

#include <fftw3.h>

#include "illusionpad/error.hpp"

namespace illusionpad {
namespace {

struct FftwBuffer {
    explicit FftwBuffer(size_t bytes) : ptr(fftw_malloc(bytes)) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* ptr;
};

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

// FFTW planning is not thread-safe; execution with new-array calls is.
// Plans live for the process lifetime.
const PlanPair& plans_for(int height, int width) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace({height, width});
    if (inserted) {
        const size_t half = static_cast<size_t>(height) * (width / 2 + 1);
        FftwBuffer real(sizeof(double) * static_cast<size_t>(height) * width);
        FftwBuffer cplx(sizeof(fftw_complex) * half);
        auto* r = static_cast<double*>(real.ptr);
        auto* c = static_cast<fftw_complex*>(cplx.ptr);
        it->second.forward = fftw_plan_dft_r2c_2d(height, width, r, c, FFTW_ESTIMATE);
        it->second.inverse = fftw_plan_dft_c2r_2d(height, width, c, r, FFTW_ESTIMATE);
        if (!it->second.forward || !it->second.inverse) throw std::runtime_error("FFTW planning failed");
    }
    return it->second;
}

}  // namespace

Spectrum forward_transform(const GrayImage& image) {
    if (image.empty()) throw DomainError("cannot transform an empty image");
    const int h = image.height();
    const int w = image.width();
    const int hw = w / 2 + 1;
    const auto& plans = plans_for(h, w);
    FftwBuffer real(sizeof(double) * static_cast<size_t>(h) * w);
    FftwBuffer cplx(sizeof(fftw_complex) * static_cast<size_t>(h) * hw);
    Eigen::Map<ImageArray>(static_cast<double*>(real.ptr), h, w) = image.array();
    fftw_execute_dft_r2c(plans.forward, static_cast<double*>(real.ptr), static_cast<fftw_complex*>(cplx.ptr));
    Spectrum out{w, h, ComplexArray(h, hw)};
    out.coeffs = Eigen::Map<ComplexArray>(static_cast<std::complex<double>*>(cplx.ptr), h, hw);
    return out;
}

GrayImage inverse_transform(const Spectrum& spectrum) {
    const int h = spectrum.height;
    const int w = spectrum.width;
    const int hw = w / 2 + 1;
    if (h <= 0 || w <= 0 || spectrum.coeffs.rows() != h || spectrum.coeffs.cols() != hw)
        throw DomainError("spectrum shape does not match its image dimensions");
    const auto& plans = plans_for(h, w);
    FftwBuffer real(sizeof(double) * static_cast<size_t>(h) * w);
    FftwBuffer cplx(sizeof(fftw_complex) * static_cast<size_t>(h) * hw);
    Eigen::Map<ComplexArray>(static_cast<std::complex<double>*>(cplx.ptr), h, hw) = spectrum.coeffs;
    fftw_execute_dft_c2r(plans.inverse, static_cast<fftw_complex*>(cplx.ptr), static_cast<double*>(real.ptr));
    ImageArray out = Eigen::Map<ImageArray>(static_cast<double*>(real.ptr), h, w) / (double(h) * double(w));
    return GrayImage(std::move(out));
}

double gaussian_gain(const GaussianFilterSpec& spec, const Eigen::Vector2d& bin, int width, int height) {
    if (!(spec.sigma_y > 0)) throw DomainError("Gaussian sigma must be positive");
    const double sx = spec.sigma_x(width, height);
    const double sy = spec.sigma_y;
    const double low = std::exp(-bin.x() * bin.x() / (2 * sx * sx) - bin.y() * bin.y() / (2 * sy * sy));
    return spec.kind == FilterKind::lowpass ? low : 1.0 - low;
}

Spectrum apply_filter(const Spectrum& spectrum, const GaussianFilterSpec& spec) {
    if (!(spec.sigma_y > 0)) throw DomainError("Gaussian sigma must be positive");
    return apply_gain(spectrum, [&](double nx, double ny) {
        return gaussian_gain(spec, Eigen::Vector2d(nx, ny), spectrum.width, spectrum.height);
    });
}

GrayImage apply_filter(const GrayImage& image, const GaussianFilterSpec& spec) {
    if (image.empty()) throw DomainError("cannot filter an empty image");
    return inverse_transform(apply_filter(forward_transform(image), spec));
}

HybridImage compose_hybrid(const GrayImage& user_img, const GrayImage& surfer_img, double sigma_lf,
                           double sigma_hf, double cycle_scale) {
    if (user_img.width() != surfer_img.width() || user_img.height() != surfer_img.height())
        throw DomainError("hybrid components must have identical dimensions");
    if (!(sigma_lf > 0) || !(sigma_hf > 0)) throw DomainError("hybrid sigmas must be positive");
    if (!(cycle_scale > 0)) throw DomainError("cycle scale must be positive");
    HybridImage out;
    out.user_high = apply_filter(user_img, {FilterKind::highpass, sigma_hf / cycle_scale});
    out.surfer_low = apply_filter(surfer_img, {FilterKind::lowpass, sigma_lf / cycle_scale});
    out.composed = out.user_high + out.surfer_low;
    out.sigma_lf = sigma_lf;
    out.sigma_hf = sigma_hf;
    return out;
}

namespace {

// Visits every bin of the full plane through the stored half-plane; the
// mirrored bin (-n_x, -n_y) has identical |X| and identical |f|.
template <typename Visit>
void for_each_full_plane_bin(const Spectrum& s, Visit&& visit) {
    const int hw = static_cast<int>(s.coeffs.cols());
    for (int ky = 0; ky < s.height; ++ky) {
        const double ny = signed_cycles(ky, s.height);
        for (int kx = 0; kx < hw; ++kx) {
            const bool self_mirrored = kx == 0 || (s.width % 2 == 0 && kx == s.width / 2);
            const double weight = self_mirrored ? 1.0 : 2.0;
            visit(double(kx), ny, std::abs(s.coeffs(ky, kx)), weight);
        }
    }
}

SpectrumProfile accumulate(const std::map<long, double>& buckets, double bucket_width) {
    SpectrumProfile out;
    if (buckets.empty()) return out;
    const long last = buckets.rbegin()->first;
    out.reserve(static_cast<size_t>(last + 1));
    for (long b = 0; b <= last; ++b) {
        auto it = buckets.find(b);
        out.push_back({double(b) * bucket_width, it == buckets.end() ? 0.0 : it->second});
    }
    return out;
}

}  // namespace

SpectrumProfile spectrum_profile(const GrayImage& image) {
    const Spectrum s = forward_transform(image);
    std::map<long, double> buckets;
    for_each_full_plane_bin(s, [&](double nx, double ny, double mag, double weight) {
        buckets[std::lround(std::hypot(nx, ny))] += weight * std::log1p(mag);
    });
    return accumulate(buckets, 1.0);
}

SpectrumProfile perceived_spectrum_profile(const GrayImage& image, const DisplayGeometry& display,
                                           const ViewingPosition& pos, double bucket_cpd) {
    if (!(bucket_cpd > 0)) throw DomainError("bucket width must be positive");
    const VisualAngle angle = visual_angle(pos, display);
    const double deg_x = degrees(angle.theta_x) / display.cycle_scale;
    const double deg_y = degrees(angle.theta_y) / display.cycle_scale;
    const Spectrum s = forward_transform(image);
    std::map<long, double> buckets;
    for_each_full_plane_bin(s, [&](double nx, double ny, double mag, double weight) {
        const double fp = std::hypot(nx / deg_x, ny / deg_y);
        buckets[std::lround(fp / bucket_cpd)] += weight * std::log1p(mag);
    });
    return accumulate(buckets, bucket_cpd);
}

std::string profile_csv(const SpectrumProfile& profile, const std::string& magnitude_column) {
    std::ostringstream out;
    out.precision(10);
    out << magnitude_column << ",log_power\n";
    for (const auto& p : profile) out << p.magnitude << ',' << p.log_power << '\n';
    return out.str();
}

}  // namespace illusionpad
