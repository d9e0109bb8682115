#pragma once

#include <array>
#include <span>
#include <vector>

#include "illusionpad/keypad.hpp"
#include "illusionpad/perception.hpp"

namespace illusionpad {

/// Gaussian-window SSIM parameters for luminance normalized to [0, dynamic_range].
struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate() const;
};

/// Mean SSIM over every fully interior window position.
double mssim(const GrayImage& reference, const GrayImage& distorted, const SsimParams& params = {});

constexpr double kDefaultVisibilityThreshold = 0.93;

struct VisibilityVerdict {
    double index_v = 0.0;
    double threshold_v_th = kDefaultVisibilityThreshold;
    bool visible = true;
    ViewingPosition position{0, 0, 1};
    bool extrapolated_angles = false;
};

/// The user's keypad is predicted invisible when index_v >= v_th.
VisibilityVerdict verdict(double index_v, double v_th, const ViewingPosition& position = {0, 0, 1},
                          bool extrapolated_angles = false);

struct VisibilityDetail {
    double index_v = 0.0;
    std::array<double, 10> per_button{};
    PerceptionParams perception;
};

/// Holds the spectra of a keypad's hybrid and surfer low-pass images so
/// that many viewing positions can be evaluated without re-transforming.
class VisibilityEvaluator {
public:
    VisibilityEvaluator(const HybridKeypad& keypad, const DafSpec& daf = {}, const SsimParams& ssim = {});

    /// Mean over the ten buttons of MSSIM(DAF(surfer_low), DAF(hybrid)).
    double index(const ViewingPosition& pos) const { return evaluate(pos).index_v; }
    VisibilityDetail evaluate(const ViewingPosition& pos) const;

    const DisplayGeometry& display() const { return display_; }
    const DafSpec& daf() const { return daf_; }

private:
    DisplayGeometry display_;
    KeypadLayout layout_;
    DafSpec daf_;
    SsimParams ssim_;
    Spectrum hybrid_;
    Spectrum reference_;
};

double visibility_index(const HybridKeypad& keypad, const ViewingPosition& pos, const DafSpec& daf = {},
                        const SsimParams& ssim = {});

/// Mean index over several keypads (fixed summation order).
double mean_visibility_index(std::span<const VisibilityEvaluator> evaluators, const ViewingPosition& pos);

}  // namespace illusionpad
