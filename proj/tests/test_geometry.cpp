#include <doctest.h>

#include <random>

#include "illusionpad/device.hpp"
#include "illusionpad/error.hpp"
#include "illusionpad/geometry.hpp"

using namespace illusionpad;

namespace {

const double kPiD = std::numbers::pi;

DisplayGeometry square_display(double side_in) { return {side_in, side_in, 200, 200, 200 / side_in}; }

}  // namespace

TEST_CASE("spherical to cartesian") {
    auto p = spherical_to_cartesian(10.0, kPiD / 2, 0.0);
    CHECK(p.x0() == doctest::Approx(0).epsilon(1e-12));
    CHECK(std::abs(p.y0()) < 1e-12);
    CHECK(p.z0() == doctest::Approx(10));

    p = spherical_to_cartesian(10.0, kPiD / 2, kPiD / 6);
    CHECK(p.x0() == doctest::Approx(5.0));
    CHECK(std::abs(p.y0()) < 1e-12);
    CHECK(p.z0() == doctest::Approx(8.6603).epsilon(1e-4));

    p = spherical_to_cartesian(10.0, kPiD / 3, 0.0);
    CHECK(std::abs(p.x0()) < 1e-12);
    CHECK(p.y0() == doctest::Approx(5.0));
    CHECK(p.z0() == doctest::Approx(8.6603).epsilon(1e-4));
}

TEST_CASE("cartesian round trip") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> xy(-50, 50), z(0.1, 80);
    for (int i = 0; i < 1000; ++i) {
        const ViewingPosition p(xy(gen), xy(gen), z(gen));
        const auto q = spherical_to_cartesian(p.r0(), p.theta0(), p.phi0());
        const double scale = p.r0();
        CHECK(std::abs(q.x0() - p.x0()) <= 1e-9 * scale);
        CHECK(std::abs(q.y0() - p.y0()) <= 1e-9 * scale);
        CHECK(std::abs(q.z0() - p.z0()) <= 1e-9 * scale);
        CHECK(p.theta0() > 0);
        CHECK(p.theta0() < kPiD);
        CHECK(std::abs(p.phi0()) < kPiD / 2);
    }
}

TEST_CASE("position invariants") {
    CHECK_THROWS_AS(ViewingPosition(0, 0, 0), DomainError);
    CHECK_THROWS_AS(ViewingPosition(1, 1, -2), DomainError);
    CHECK_THROWS_AS(ViewingPosition(std::nan(""), 0, 1), DomainError);
    CHECK_THROWS_AS(spherical_to_cartesian(-1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(spherical_to_cartesian(5.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(spherical_to_cartesian(5.0, 1.0, kPiD / 2), DomainError);
}

TEST_CASE("display geometry invariants") {
    CHECK_NOTHROW(DeviceProfile::nexus6().display.validate());
    DisplayGeometry bad = DeviceProfile::nexus6().display;
    bad.width_in += 0.2;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = DeviceProfile::nexus6().display;
    bad.ppi = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("visual angle closed cases") {
    const auto a = visual_angle(ViewingPosition(0, 0, 1), square_display(2.0));
    CHECK(std::abs(a.theta_x - kPiD / 2) < 1e-12);
    CHECK(std::abs(a.theta_y - kPiD / 2) < 1e-12);

    const auto near = visual_angle(spherical_to_cartesian(1e-7, 1.1, 0.4), square_display(2.0));
    CHECK(near.theta_x == doctest::Approx(kPiD).epsilon(1e-6));
    CHECK(near.theta_y == doctest::Approx(kPiD).epsilon(1e-6));

    const DisplayGeometry nexus = DeviceProfile::nexus6().display;
    const auto on_axis = visual_angle(ViewingPosition(0, 0, 20), nexus);
    CHECK(std::abs(on_axis.theta_x - 2 * std::atan(nexus.width_in / 40)) < 1e-12);
    CHECK(std::abs(on_axis.theta_y - 2 * std::atan(nexus.height_in / 40)) < 1e-12);
    CHECK(on_axis.theta_x == doctest::Approx(0.1458).epsilon(1e-3));
}

TEST_CASE("spherical and cartesian visual angles agree") {
    const DisplayGeometry d = DeviceProfile::nexus6().display;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> r(0.5, 300), theta(0.01, kPiD - 0.01), phi(-kPiD / 2 + 0.01, kPiD / 2 - 0.01);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const double rr = r(gen), tt = theta(gen), pp = phi(gen);
        const auto c = visual_angle(spherical_to_cartesian(rr, tt, pp), d);
        const auto s = visual_angle_spherical(rr, tt, pp, d);
        worst = std::max({worst, std::abs(c.theta_x - s.theta_x), std::abs(c.theta_y - s.theta_y)});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("visual angle symmetry, monotonicity and on-axis maximum") {
    const DisplayGeometry d = DeviceProfile::nexus6().display;
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j)
            for (int k = 0; k < 21; ++k) {
                const double x = -30 + 3.0 * i, y = -30 + 3.0 * j, z = 1 + 4.0 * k;
                const auto a = visual_angle(ViewingPosition(x, y, z), d);
                const auto mx = visual_angle(ViewingPosition(-x, y, z), d);
                const auto my = visual_angle(ViewingPosition(x, -y, z), d);
                CHECK(std::abs(a.theta_x - mx.theta_x) < 1e-12);
                CHECK(std::abs(a.theta_y - mx.theta_y) < 1e-12);
                CHECK(std::abs(a.theta_x - my.theta_x) < 1e-12);
                CHECK(std::abs(a.theta_y - my.theta_y) < 1e-12);
            }
    for (int i = 0; i < 21; ++i) {
        const double r = 5 + 14.0 * i;
        const auto axis = visual_angle(spherical_to_cartesian(r, kPiD / 2, 0.0), d);
        for (int j = 0; j < 21; ++j)
            for (int k = 0; k < 21; ++k) {
                const double theta = kPiD * (j + 1) / 22, phi = -kPiD / 2 + kPiD * (k + 1) / 22;
                const auto a = visual_angle(spherical_to_cartesian(r, theta, phi), d);
                CHECK(a.theta_x * a.theta_y <= axis.theta_x * axis.theta_y + 1e-15);
            }
    }
    double prev_x = kPiD, prev_y = kPiD;
    for (double r = 0.5; r < 300; r *= 1.3) {
        const auto a = visual_angle(spherical_to_cartesian(r, 1.2, 0.5), d);
        CHECK(a.theta_x < prev_x);
        CHECK(a.theta_y < prev_y);
        prev_x = a.theta_x;
        prev_y = a.theta_y;
    }
}

TEST_CASE("perceived frequency") {
    const VisualAngle one_degree{radians(1.0), radians(1.0)};
    const Eigen::Vector2d f = perceived_frequency(Eigen::Vector2d(10, 0), one_degree);
    CHECK(f.x() == doctest::Approx(10.0));
    CHECK(f.y() == 0.0);
    CHECK(perceived_frequency(Eigen::Vector2d(0, 0), one_degree).norm() == 0.0);

    const DisplayGeometry d = DeviceProfile::nexus6().display;
    const Eigen::Vector2d n(40, 70);
    const double f100 = perceived_frequency(n, visual_angle(ViewingPosition(0, 0, 100), d)).norm();
    const double f200 = perceived_frequency(n, visual_angle(ViewingPosition(0, 0, 200), d)).norm();
    CHECK(f200 / f100 == doctest::Approx(2.0).epsilon(0.01));
    const double small_angle = 2 * std::atan(d.width_in / 400);
    CHECK(perceived_frequency(Eigen::Vector2d(40, 0), visual_angle(ViewingPosition(0, 0, 200), d)).x() ==
          doctest::Approx(40 / degrees(small_angle)));
    CHECK_THROWS_AS(perceived_frequency(n, VisualAngle{0, 1}), DomainError);
}
