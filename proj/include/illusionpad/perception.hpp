#pragma once

// Distance-as-filtering: perception from a viewing position is simulated by
// low-pass filtering the image over perceived frequency magnitude (c/d).

#include "illusionpad/geometry.hpp"
#include "illusionpad/image.hpp"
#include "illusionpad/spectral.hpp"

namespace illusionpad {

struct DafSpec {
    double f1_base = 31.0;  // c/d, cutoff for frontal viewing
    double ratio_r = 3.0;   // f0 = f1 / ratio_r
    double k_a = 3.0;       // angular attenuation exponent

    void validate() const;
};

/// Cutoff f1 after angular attenuation:
/// f1_base * (1 - (|phi0| / (pi/2))^k_a) * (1 - (|theta0 - pi/2| / (pi/2))^k_a).
double effective_f1(double phi0, double theta0, const DafSpec& spec = {});

/// 1 below f0 = f1 / r, 1 - (log(fp / f0) / log r)^2 up to f1, 0 beyond.
double daf_gain(double fp_mag, double f1, double ratio_r);

/// True when the angles fall outside the range the attenuation was fitted on
/// (|phi0| <= pi/3, |theta0 - pi/2| <= pi/4).
bool angles_extrapolated(double phi0, double theta0);

struct PerceptionParams {
    VisualAngle angle;
    double f1 = 0.0;
    double f0 = 0.0;
    bool extrapolated = false;
    double cycle_scale = 1.0;
};

PerceptionParams perception_params(const DisplayGeometry& display, const ViewingPosition& pos, const DafSpec& spec);

/// Perceived-frequency DAF gain for bin (n_x, n_y) c/im.
double daf_bin_gain(double nx, double ny, const PerceptionParams& params, double ratio_r);

/// DAF filter applied to a precomputed spectrum.
Spectrum simulate_perception(const Spectrum& spectrum, const PerceptionParams& params, double ratio_r);

/// Full spatial-domain simulation. Images not at the display's native pixel
/// grid are resampled bilinearly first (with a warning).
GrayImage simulate_perception(const GrayImage& image, const DisplayGeometry& display, const ViewingPosition& pos,
                              const DafSpec& spec = {});

}  // namespace illusionpad
