#include <doctest.h>

#include <numbers>
#include <sstream>

#include "illusionpad/error.hpp"
#include "illusionpad/safety.hpp"

using namespace illusionpad;

namespace {

const double kPiD = std::numbers::pi;

const DeviceProfile& working_device() {
    static const DeviceProfile d = DeviceProfile::nexus6().at_working_width(360);
    return d;
}

HybridKeypad keypad_at(double sigma_hf, double sigma_lf = 35, bool include_user = true) {
    SeededRng rng(7);
    KeypadOptions opts;
    opts.include_user = include_user;
    return make_hybrid_keypad(working_device(), sigma_lf, sigma_hf, rng, opts);
}

}  // namespace

TEST_CASE("camera safety distance") {
    const SafetyResult r = camera_safety_distance(215, DeviceProfile::nexus6());
    REQUIRE(r.cutoff);
    CHECK(r.cutoff->sigma_x_hf == 120.9375);
    CHECK(r.cutoff->fs_x == doctest::Approx(100.69).epsilon(0.1 / 100.69));
    CHECK(r.cutoff->fs_y == doctest::Approx(178.99).epsilon(0.1 / 178.99));
    CHECK(std::abs(r.cutoff->l_x - 0.029) <= 0.001);
    CHECK(std::abs(r.cutoff->l_y - 0.029) <= 0.001);
    CHECK(r.cutoff->l_x == doctest::Approx(r.cutoff->l_y).epsilon(1e-9));
    CHECK(r.d_s == doctest::Approx(97.81).epsilon(0.005));
    CHECK(r.mode == SafetyMode::camera);

    DeviceProfile focal = DeviceProfile::nexus6();
    focal.camera->focal_length_mm *= 2;
    CHECK(camera_safety_distance(215, focal).d_s == doctest::Approx(2 * r.d_s));
    DeviceProfile pixel = DeviceProfile::nexus6();
    pixel.camera->pixel_size_mm *= 2;
    CHECK(camera_safety_distance(215, pixel).d_s == doctest::Approx(r.d_s / 2));
    // Same panel at a coarser grid: the physical cycle length is unchanged.
    CHECK(camera_safety_distance(215, working_device()).d_s == doctest::Approx(r.d_s));

    DeviceProfile blind = DeviceProfile::nexus6();
    blind.camera.reset();
    CHECK_THROWS_AS(camera_safety_distance(215, blind), InputError);
    CHECK_THROWS_AS(camera_safety_distance(0, DeviceProfile::nexus6()), DomainError);
    CHECK(camera_safety_distance(440, DeviceProfile::nexus6()).d_s < r.d_s);
}

TEST_CASE("naked-eye distance with no user component") {
    const SafetyResult r = naked_eye_safety_distance(keypad_at(215, 35, false));
    CHECK(r.d_s == 5.0);
    CHECK(!r.unbounded);
    CHECK(r.trace.size() == 1);
}

TEST_CASE("naked-eye distances across categories") {
    const std::array<double, 4> sigmas{145, 215, 305, 440};
    const std::array<double, 4> scenario{60, 45, 35, 25};
    double prev = 1e9;
    for (size_t i = 0; i < 4; ++i) {
        const SafetyResult r = naked_eye_safety_distance(keypad_at(sigmas[i]));
        CHECK(!r.unbounded);
        CHECK(r.d_s < prev);
        CHECK(r.d_s <= scenario[i] * 1.35);
        CHECK(r.sigma_hf == sigmas[i]);
        prev = r.d_s;
        // The result is the first bracket point that meets the threshold.
        const VisibilityEvaluator e(keypad_at(sigmas[i]));
        CHECK(e.index(spherical_to_cartesian(r.d_s, kPiD / 2, kPiD / 6)) >= kDefaultVisibilityThreshold);
        CHECK(e.index(spherical_to_cartesian(r.d_s - 0.5, kPiD / 2, kPiD / 6)) < kDefaultVisibilityThreshold);
        if (sigmas[i] == 215) CHECK(r.d_s <= 45);
    }
}

TEST_CASE("a wider low-pass lets the surfer keypad mask the user keypad closer in") {
    double prev = 1e9;
    for (double lf : {20.0, 35.0, 50.0}) {
        const double d = naked_eye_safety_distance(keypad_at(215, lf)).d_s;
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("search edge cases") {
    const HybridKeypad k = keypad_at(215);
    DistanceSearch short_ray;
    short_ray.r_max = 15;
    const SafetyResult r = naked_eye_safety_distance(k, kDefaultVisibilityThreshold, short_ray);
    CHECK(r.unbounded);
    CHECK(r.d_s == 15);
    CHECK(r.trace.size() == 3);

    DistanceSearch strict;
    strict.dip_tolerance = -1;
    CHECK_THROWS_AS(naked_eye_safety_distance(k, kDefaultVisibilityThreshold, strict), SearchError);

    DistanceSearch bad;
    bad.r_max = 1;
    CHECK_THROWS_AS(naked_eye_safety_distance(k, kDefaultVisibilityThreshold, bad), DomainError);
    CHECK_THROWS_AS(naked_eye_safety_distance(k, 0.0), DomainError);
}

TEST_CASE("visibility region") {
    const HybridKeypad k = keypad_at(215);
    const VisibilityEvaluator e(k);
    GridSpec grid;
    grid.x = {-24, 24, 9};
    grid.y = {-24, 24, 9};
    grid.z = {6, 54, 9};
    const VisibilityRegion region = visibility_region(e, grid);
    REQUIRE(region.cells.size() == 729);
    int visible = 0;
    for (int iz = 0; iz < 9; ++iz)
        for (int iy = 0; iy < 9; ++iy)
            for (int ix = 0; ix < 9; ++ix) {
                const auto& c = region.at(ix, iy, iz);
                const auto& mx = region.at(8 - ix, iy, iz);
                const auto& my = region.at(ix, 8 - iy, iz);
                CHECK(std::abs(c.v - mx.v) < 1e-9);
                CHECK(std::abs(c.v - my.v) < 1e-9);
                CHECK(c.visible == mx.visible);
                CHECK(c.visible == my.visible);
                visible += c.visible;
            }
    CHECK(visible > 0);
    CHECK(visible < 729);

    double axis_max = 0;
    for (int iz = 0; iz < 9; ++iz)
        if (region.at(4, 4, iz).visible) axis_max = region.at(4, 4, iz).z;
    REQUIRE(region.farthest_visible);
    const auto& f = *region.farthest_visible;
    const double dz = 6;
    CHECK(std::sqrt(f.x * f.x + f.y * f.y + f.z * f.z) <= axis_max + dz);
    for (const auto& c : region.cells)
        if (c.visible) CHECK(std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z) <= axis_max + dz);

    DistanceSearch on_axis;
    on_axis.phi0 = 0;
    const double d_axis = naked_eye_safety_distance(k, kDefaultVisibilityThreshold, on_axis).d_s;
    const double d_ray = naked_eye_safety_distance(k).d_s;
    CHECK(d_axis >= d_ray);
    CHECK(axis_max + dz >= d_ray);

    const std::string csv = region_csv(region);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,y,z,v,visible");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 729);

    const GrayImage slice = region_slice_zx(region);
    CHECK(slice.width() == 9);
    CHECK(slice.height() == 9);
    CHECK(slice(4, 0) == 1.0);
}

TEST_CASE("region edge cases") {
    GridSpec grid;
    grid.x = {-10, 10, 3};
    grid.y = {-10, 10, 3};
    grid.z = {6, 30, 3};
    const VisibilityRegion empty = visibility_region(VisibilityEvaluator(keypad_at(215, 35, false)), grid);
    for (const auto& c : empty.cells) CHECK(!c.visible);
    CHECK(!empty.farthest_visible);

    GridSpec too_close = grid;
    too_close.z = {5, 30, 3};
    CHECK_THROWS_AS(visibility_region(VisibilityEvaluator(keypad_at(215)), too_close), DomainError);
}

TEST_CASE("solving for the high-pass width") {
    const SigmaSolution s60 = solve_sigma_hf(60, working_device(), 35);
    CHECK(s60.sigma_hf >= 145 * 0.65);
    CHECK(s60.sigma_hf <= 145 * 1.35);
    CHECK(s60.v >= kDefaultVisibilityThreshold);
    const SigmaSolution s25 = solve_sigma_hf(25, working_device(), 35);
    CHECK(s25.sigma_hf > s60.sigma_hf);

    for (const auto& s : {std::pair{60.0, s60}, std::pair{25.0, s25}}) {
        SigmaSearch search;
        const auto evals = seeded_evaluators(working_device(), 35, s.second.sigma_hf, search);
        const SafetyResult back = naked_eye_safety_distance(evals, kDefaultVisibilityThreshold);
        CHECK(back.d_s <= s.first + 1);
    }

    CHECK_THROWS_AS(solve_sigma_hf(5, working_device(), 35), DomainError);
    SigmaSearch narrow;
    narrow.sigma_max = 60;
    CHECK_THROWS_AS(solve_sigma_hf(60, working_device(), 35, kDefaultVisibilityThreshold, narrow), SearchError);
}
