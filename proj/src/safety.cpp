#include "illusionpad/safety.hpp"

#include <cmath>
#include <sstream>

#include "illusionpad/error.hpp"
#include "parallel.hpp"

namespace illusionpad {

CutoffAnalysis cutoff_analysis(double sigma_hf, const DisplayGeometry& display) {
    if (!(sigma_hf > 0)) throw DomainError("sigma_hf must be positive");
    display.validate();
    CutoffAnalysis c;
    c.sigma_y_hf = sigma_hf;
    c.sigma_x_hf = GaussianFilterSpec{FilterKind::lowpass, sigma_hf}.sigma_x(display.width_px, display.height_px);
    // Half-gain contour of exp(-fx^2 / (2 sx^2) - fy^2 / (2 sy^2)).
    const double half_gain = std::sqrt(2.0 * std::log(1.0 / 0.5));
    c.axis_a = c.sigma_x_hf * half_gain;
    c.axis_b = c.sigma_y_hf * half_gain;
    c.fs_x = c.axis_a * std::numbers::sqrt2 / 2;
    c.fs_y = c.axis_b * std::numbers::sqrt2 / 2;
    c.l_x = (display.width_px / display.ppi) / c.fs_x;
    c.l_y = (display.height_px / display.ppi) / c.fs_y;
    return c;
}

SafetyResult camera_safety_distance(double sigma_hf, const DeviceProfile& device) {
    device.validate();
    if (!device.camera) throw InputError("device '" + device.name + "' has no camera profile");
    SafetyResult out;
    out.mode = SafetyMode::camera;
    out.device = device.name;
    out.sigma_hf = sigma_hf;
    out.theta0 = std::numbers::pi / 2;
    out.phi0 = 0.0;
    out.cutoff = cutoff_analysis(sigma_hf, device.display);
    constexpr double mm_per_inch = 25.4;
    const double cycle_mm = std::max(out.cutoff->l_x, out.cutoff->l_y) * mm_per_inch;
    out.d_s = device.camera->focal_length_mm * cycle_mm / device.camera->pixel_size_mm / mm_per_inch;
    return out;
}

SafetyResult naked_eye_safety_distance(std::span<const VisibilityEvaluator> evaluators, double v_th,
                                       const DistanceSearch& search) {
    if (evaluators.empty()) throw DomainError("no keypads to evaluate");
    if (!(v_th > 0 && v_th <= 1)) throw DomainError("visibility threshold must lie in (0, 1]");
    if (!(search.r_min > 0) || !(search.r_max > search.r_min) || !(search.coarse_step > 0) || !(search.tolerance > 0))
        throw DomainError("invalid distance search bracket");

    SafetyResult out;
    out.mode = SafetyMode::naked_eye;
    out.v_th = v_th;
    out.theta0 = search.theta0;
    out.phi0 = search.phi0;
    const auto v_at = [&](double r) {
        const double v = mean_visibility_index(evaluators, spherical_to_cartesian(r, search.theta0, search.phi0));
        out.trace.push_back({r, v});
        return v;
    };

    double previous_r = search.r_min;
    double previous_v = v_at(search.r_min);
    if (previous_v >= v_th) {
        out.d_s = search.r_min;
        return out;
    }
    for (int step = 1;; ++step) {
        const double r = std::min(search.r_max, search.r_min + step * search.coarse_step);
        const double v = v_at(r);
        if (v < previous_v - search.dip_tolerance) {
            std::ostringstream msg;
            msg << "visibility index is not monotone on the search ray: v(" << previous_r << ")=" << previous_v
                << " > v(" << r << ")=" << v;
            throw SearchError(msg.str());
        }
        if (v >= v_th) {
            double lo = previous_r;
            double hi = r;
            while (hi - lo > search.tolerance) {
                const double mid = 0.5 * (lo + hi);
                (v_at(mid) >= v_th ? hi : lo) = mid;
            }
            out.d_s = hi;
            return out;
        }
        previous_r = r;
        previous_v = v;
        if (r >= search.r_max) break;
    }
    out.unbounded = true;
    out.d_s = search.r_max;
    return out;
}

SafetyResult naked_eye_safety_distance(const HybridKeypad& keypad, double v_th, const DistanceSearch& search,
                                       const DafSpec& daf, const SsimParams& ssim) {
    const VisibilityEvaluator evaluator(keypad, daf, ssim);
    SafetyResult out = naked_eye_safety_distance(std::span(&evaluator, 1), v_th, search);
    out.device = keypad.device.name;
    out.sigma_lf = keypad.sigma_lf;
    out.sigma_hf = keypad.sigma_hf;
    return out;
}

VisibilityRegion visibility_region(const VisibilityEvaluator& evaluator, const GridSpec& grid, double v_th) {
    if (grid.x.count < 1 || grid.y.count < 1 || grid.z.count < 1) throw DomainError("grid counts must be positive");
    if (!(std::min(grid.z.min, grid.z.max) > 5.0)) throw DomainError("region grid requires z0 > 5 in everywhere");
    if (!(v_th > 0 && v_th <= 1)) throw DomainError("visibility threshold must lie in (0, 1]");
    VisibilityRegion region;
    region.grid = grid;
    region.v_th = v_th;
    region.cells.resize(static_cast<size_t>(grid.x.count) * grid.y.count * grid.z.count);
    detail::parallel_for(region.cells.size(), [&](size_t i) {
        const int ix = static_cast<int>(i % grid.x.count);
        const int iy = static_cast<int>((i / grid.x.count) % grid.y.count);
        const int iz = static_cast<int>(i / (static_cast<size_t>(grid.x.count) * grid.y.count));
        RegionCell& c = region.cells[i];
        c.x = grid.x.at(ix);
        c.y = grid.y.at(iy);
        c.z = grid.z.at(iz);
        c.v = evaluator.index(ViewingPosition(c.x, c.y, c.z));
        c.visible = c.v < v_th;
    });
    double best = -1.0;
    for (const auto& c : region.cells) {
        const double r = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
        if (c.visible && r > best) {
            best = r;
            region.farthest_visible = c;
        }
    }
    return region;
}

std::string region_csv(const VisibilityRegion& region) {
    std::ostringstream out;
    out.precision(10);
    out << "x,y,z,v,visible\n";
    for (const auto& c : region.cells)
        out << c.x << ',' << c.y << ',' << c.z << ',' << c.v << ',' << (c.visible ? 1 : 0) << '\n';
    return out.str();
}

GrayImage region_slice_zx(const VisibilityRegion& region) {
    const auto& g = region.grid;
    int iy = 0;
    for (int j = 1; j < g.y.count; ++j)
        if (std::abs(g.y.at(j)) < std::abs(g.y.at(iy))) iy = j;
    GrayImage out(g.x.count, g.z.count, 0.0);
    for (int iz = 0; iz < g.z.count; ++iz)
        for (int ix = 0; ix < g.x.count; ++ix) out(ix, iz) = region.at(ix, iy, iz).visible ? 1.0 : 0.0;
    return out;
}

namespace {

// Renders once per device; only the filtering depends on the sigmas.
struct SeededSources {
    KeypadLayout layout;
    GrayImage surfer;
    std::vector<Ordering> orderings;
    std::vector<GrayImage> users;

    SeededSources(const DeviceProfile& device, const SigmaSearch& search) {
        device.validate();
        if (search.seeds.empty()) throw DomainError("sigma search needs at least one seed");
        const int w = device.display.width_px;
        const int h = device.display.height_px;
        layout = search.keypad.layout.value_or(KeypadLayout::standard(w, h));
        layout.ordering = kRegularOrdering;
        surfer = render_keypad(kRegularOrdering, search.keypad.style, w, h, layout);
        for (auto seed : search.seeds) {
            SeededRng rng(seed);
            orderings.push_back(shuffle_ordering(rng));
            users.push_back(render_keypad(orderings.back(), search.keypad.style, w, h, layout));
        }
    }

    std::vector<VisibilityEvaluator> evaluators(const DeviceProfile& device, double sigma_lf, double sigma_hf,
                                                const SigmaSearch& search) const {
        std::vector<VisibilityEvaluator> out;
        out.reserve(users.size());
        for (size_t i = 0; i < users.size(); ++i) {
            HybridKeypad k;
            k.hybrid = compose_hybrid(users[i], surfer, sigma_lf, sigma_hf, device.display.cycle_scale);
            k.user_ordering = orderings[i];
            k.layout = layout;
            k.device = device;
            k.sigma_lf = sigma_lf;
            k.sigma_hf = sigma_hf;
            out.emplace_back(k, search.daf, search.ssim);
        }
        return out;
    }
};

}  // namespace

std::vector<VisibilityEvaluator> seeded_evaluators(const DeviceProfile& device, double sigma_lf, double sigma_hf,
                                                   const SigmaSearch& search) {
    return SeededSources(device, search).evaluators(device, sigma_lf, sigma_hf, search);
}

SigmaSolution solve_sigma_hf(double target_ds, const DeviceProfile& device, double sigma_lf, double v_th,
                             const SigmaSearch& search) {
    if (!(target_ds >= 10.0 && target_ds <= 120.0)) throw DomainError("target safety distance must lie in [10, 120] in");
    if (!(sigma_lf > 0)) throw DomainError("sigma_lf must be positive");
    if (!(search.sigma_max > search.sigma_min) || !(search.sigma_min > 0) || !(search.tolerance > 0))
        throw DomainError("invalid sigma search bracket");
    const SeededSources sources(device, search);
    const ViewingPosition pos = spherical_to_cartesian(target_ds, search.theta0, search.phi0);
    SigmaSolution out;
    const auto v_at = [&](double sigma) {
        const auto evals = sources.evaluators(device, sigma_lf, sigma, search);
        const double v = mean_visibility_index(evals, pos);
        out.trace.push_back({sigma, v});
        return v;
    };
    const double v_lo = v_at(search.sigma_min);
    if (v_lo >= v_th) {
        out.sigma_hf = search.sigma_min;
        out.v = v_lo;
        return out;
    }
    double v_hi = v_at(search.sigma_max);
    if (v_hi < v_th) {
        std::ostringstream msg;
        msg << "no sigma_hf in [" << search.sigma_min << ", " << search.sigma_max << "] reaches v_th=" << v_th
            << " at " << target_ds << " in (v=" << v_lo << " .. " << v_hi << ")";
        throw SearchError(msg.str());
    }
    double lo = search.sigma_min;
    double hi = search.sigma_max;
    while (hi - lo > search.tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double v = v_at(mid);
        if (v >= v_th) {
            hi = mid;
            v_hi = v;
        } else {
            lo = mid;
        }
    }
    out.sigma_hf = hi;
    out.v = v_hi;
    return out;
}

}  // namespace illusionpad
