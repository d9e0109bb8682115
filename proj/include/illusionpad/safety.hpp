#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "illusionpad/device.hpp"
#include "illusionpad/keypad.hpp"
#include "illusionpad/visibility.hpp"

namespace illusionpad {

/// Attack-scenario defaults.
struct ThreatModel {
    double min_attacker_phi = std::numbers::pi / 6;
    double camera_distance_in = 100.0;
    std::array<double, 4> safety_distances_in{25.0, 35.0, 45.0, 60.0};
};

/// Largest user-keypad cycle that survives the high-pass filter.
struct CutoffAnalysis {
    double sigma_x_hf = 0.0;  // c/im
    double sigma_y_hf = 0.0;  // c/im
    double axis_a = 0.0;      // half-gain ellipse semi-axes, c/im
    double axis_b = 0.0;
    double fs_x = 0.0;        // inscribed rectangle corner, c/im
    double fs_y = 0.0;
    double l_x = 0.0;         // cycle lengths, inches
    double l_y = 0.0;
};

CutoffAnalysis cutoff_analysis(double sigma_hf, const DisplayGeometry& display);

enum class SafetyMode { naked_eye, camera };

struct SearchSample {
    double r0 = 0.0;
    double v = 0.0;
};

struct SafetyResult {
    double d_s = 0.0;  // inches
    SafetyMode mode = SafetyMode::naked_eye;
    bool unbounded = false;  // threshold never reached inside the search range
    std::string device;
    double sigma_lf = 0.0;
    double sigma_hf = 0.0;
    double v_th = kDefaultVisibilityThreshold;
    double theta0 = std::numbers::pi / 2;
    double phi0 = std::numbers::pi / 6;
    std::vector<SearchSample> trace;
    std::optional<CutoffAnalysis> cutoff;
};

/// Pinhole-camera distance beyond which the largest surviving cycle of the
/// user's keypad projects onto at most one sensor pixel.
SafetyResult camera_safety_distance(double sigma_hf, const DeviceProfile& device);

struct DistanceSearch {
    double theta0 = std::numbers::pi / 2;
    double phi0 = std::numbers::pi / 6;
    double r_min = 5.0;
    double r_max = 300.0;
    double coarse_step = 5.0;
    double tolerance = 0.5;
    double dip_tolerance = 0.005;
};

/// Minimum r0 on the (theta0, phi0) ray with v >= v_th: coarse scan, then
/// bisection. v is averaged over all evaluators.
SafetyResult naked_eye_safety_distance(std::span<const VisibilityEvaluator> evaluators, double v_th,
                                       const DistanceSearch& search = {});

SafetyResult naked_eye_safety_distance(const HybridKeypad& keypad, double v_th = kDefaultVisibilityThreshold,
                                       const DistanceSearch& search = {}, const DafSpec& daf = {},
                                       const SsimParams& ssim = {});

struct AxisRange {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    double at(int i) const { return count == 1 ? min : min + (max - min) * i / (count - 1); }
};

struct GridSpec {
    AxisRange x{-30.0, 30.0, 20};
    AxisRange y{-30.0, 30.0, 20};
    AxisRange z{6.0, 90.0, 20};
};

struct RegionCell {
    double x = 0.0, y = 0.0, z = 0.0;
    double v = 0.0;
    bool visible = false;
};

struct VisibilityRegion {
    GridSpec grid;
    double v_th = kDefaultVisibilityThreshold;
    std::vector<RegionCell> cells;  // x fastest, then y, then z
    std::optional<RegionCell> farthest_visible;

    const RegionCell& at(int ix, int iy, int iz) const {
        return cells[(static_cast<size_t>(iz) * grid.y.count + iy) * grid.x.count + ix];
    }
};

/// Visibility verdict at every grid node (all nodes need z0 > 5 in).
VisibilityRegion visibility_region(const VisibilityEvaluator& evaluator, const GridSpec& grid,
                                   double v_th = kDefaultVisibilityThreshold);

std::string region_csv(const VisibilityRegion& region);

/// Zx-plane slice nearest y = 0 rendered as a PNG mask (white = visible), z growing downwards.
GrayImage region_slice_zx(const VisibilityRegion& region);

struct SigmaSearch {
    double sigma_min = 50.0;
    double sigma_max = 800.0;
    double tolerance = 5.0;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double theta0 = std::numbers::pi / 2;
    double phi0 = std::numbers::pi / 6;
    KeypadOptions keypad;
    DafSpec daf;
    SsimParams ssim;
};

struct SigmaSample {
    double sigma_hf = 0.0;
    double v = 0.0;
};

struct SigmaSolution {
    double sigma_hf = 0.0;
    double v = 0.0;
    std::vector<SigmaSample> trace;
};

/// Keypads over the seed set for one sigma pair, sharing the rendered sources.
std::vector<VisibilityEvaluator> seeded_evaluators(const DeviceProfile& device, double sigma_lf, double sigma_hf,
                                                   const SigmaSearch& search);

/// Smallest sigma_hf (within tolerance) whose seed-averaged v at
/// (target_ds, theta0, phi0) reaches v_th.
SigmaSolution solve_sigma_hf(double target_ds, const DeviceProfile& device, double sigma_lf,
                             double v_th = kDefaultVisibilityThreshold, const SigmaSearch& search = {});

}  // namespace illusionpad
