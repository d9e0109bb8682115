#include "illusionpad/perception.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "illusionpad/error.hpp"

namespace illusionpad {

void DafSpec::validate() const {
    if (!(f1_base > 0)) throw DomainError("DAF f1 must be positive");
    if (!(ratio_r > 1)) throw DomainError("DAF ratio r must exceed 1");
    if (!(k_a > 0)) throw DomainError("DAF attenuation exponent k_a must be positive");
}

double effective_f1(double phi0, double theta0, const DafSpec& spec) {
    spec.validate();
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(phi0 > -half_pi && phi0 < half_pi)) throw DomainError("phi0 must lie in (-pi/2, pi/2)");
    if (!(theta0 > 0 && theta0 < std::numbers::pi)) throw DomainError("theta0 must lie in (0, pi)");
    const double a_phi = 1.0 - std::pow(std::abs(phi0) / half_pi, spec.k_a);
    const double a_theta = 1.0 - std::pow(std::abs(theta0 - half_pi) / half_pi, spec.k_a);
    return spec.f1_base * a_phi * a_theta;
}

double daf_gain(double fp_mag, double f1, double ratio_r) {
    if (!(ratio_r > 1)) throw DomainError("DAF ratio r must exceed 1");
    if (f1 < 0 || fp_mag < 0) throw DomainError("DAF frequencies must be non-negative");
    if (f1 == 0) return fp_mag == 0 ? 1.0 : 0.0;
    const double f0 = f1 / ratio_r;
    if (fp_mag < f0) return 1.0;
    if (fp_mag > f1) return 0.0;
    const double t = std::log(fp_mag / f0) / std::log(ratio_r);
    return 1.0 - t * t;
}

bool angles_extrapolated(double phi0, double theta0) {
    constexpr double slack = 1e-9;
    return std::abs(phi0) > std::numbers::pi / 3 + slack ||
           std::abs(theta0 - std::numbers::pi / 2) > std::numbers::pi / 4 + slack;
}

PerceptionParams perception_params(const DisplayGeometry& display, const ViewingPosition& pos, const DafSpec& spec) {
    PerceptionParams p;
    p.angle = visual_angle(pos, display);
    p.f1 = effective_f1(pos.phi0(), pos.theta0(), spec);
    p.f0 = p.f1 / spec.ratio_r;
    p.extrapolated = angles_extrapolated(pos.phi0(), pos.theta0());
    p.cycle_scale = display.cycle_scale;
    return p;
}

double daf_bin_gain(double nx, double ny, const PerceptionParams& params, double ratio_r) {
    const Eigen::Vector2d fp = perceived_frequency(Eigen::Vector2d(nx * params.cycle_scale, ny * params.cycle_scale), params.angle);
    return daf_gain(fp.norm(), params.f1, ratio_r);
}

Spectrum simulate_perception(const Spectrum& spectrum, const PerceptionParams& params, double ratio_r) {
    if (!(params.angle.theta_x > 0) || !(params.angle.theta_y > 0))
        throw DomainError("visual angle components must be positive");
    if (!(ratio_r > 1)) throw DomainError("DAF ratio r must exceed 1");
    // Inlined daf_gain: this loop runs for every bin of every evaluated position.
    const double inv_deg_x = params.cycle_scale / degrees(params.angle.theta_x);
    const double inv_deg_y = params.cycle_scale / degrees(params.angle.theta_y);
    const double f1 = params.f1;
    const double f0 = f1 / ratio_r;
    const double inv_log_r = 1.0 / std::log(ratio_r);
    Spectrum out{spectrum.width, spectrum.height, ComplexArray(spectrum.coeffs.rows(), spectrum.coeffs.cols())};
    const auto cols = spectrum.coeffs.cols();
    for (int ky = 0; ky < spectrum.height; ++ky) {
        const double fy = signed_cycles(ky, spectrum.height) * inv_deg_y;
        for (Eigen::Index kx = 0; kx < cols; ++kx) {
            const double fx = double(kx) * inv_deg_x;
            const double fp = std::sqrt(fx * fx + fy * fy);
            double g;
            if (fp == 0)
                g = 1.0;
            else if (fp > f1)
                g = 0.0;
            else if (fp < f0)
                g = 1.0;
            else {
                const double t = std::log(fp / f0) * inv_log_r;
                g = 1.0 - t * t;
            }
            out.coeffs(ky, kx) = spectrum.coeffs(ky, kx) * g;
        }
    }
    return out;
}

GrayImage simulate_perception(const GrayImage& image, const DisplayGeometry& display, const ViewingPosition& pos,
                              const DafSpec& spec) {
    if (image.empty()) throw DomainError("cannot simulate perception of an empty image");
    spec.validate();
    const GrayImage* source = &image;
    GrayImage resampled;
    if (image.width() != display.width_px || image.height() != display.height_px) {
        log_warning("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                    " but the display is " + std::to_string(display.width_px) + "x" +
                    std::to_string(display.height_px) + "; resampling bilinearly");
        resampled = resample_bilinear(image, display.width_px, display.height_px);
        source = &resampled;
    }
    const PerceptionParams params = perception_params(display, pos, spec);
    return inverse_transform(simulate_perception(forward_transform(*source), params, spec.ratio_r));
}

}  // namespace illusionpad
