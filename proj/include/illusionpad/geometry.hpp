#pragma once

// Pinhole viewing geometry: observer positions, display extents, subtended
// visual angles and the cycles-per-image to cycles-per-degree mapping.
//
// Coordinates are centered on the display, x to the right, y up, z towards
// the observer. Spherical positions use
//
//   x0 = r sin(theta) sin(phi),  y0 = r cos(theta),  z0 = r sin(theta) cos(phi)
//
// so theta is the polar angle from the +y axis and phi the azimuth in the
// zx plane. With this mapping the cross term of the visual-angle
// denominator is (x0 * d_x)^2 = (r sin(theta) sin(phi) d_x)^2 for the
// horizontal angle and (r cos(theta) d_y)^2 for the vertical one.
//
// All lengths are inches, all angles radians unless a name says otherwise.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "illusionpad/error.hpp"

namespace illusionpad {

template <typename Scalar>
constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

template <typename Scalar>
constexpr Scalar degrees(Scalar radians) { return radians * Scalar(180) / kPi<Scalar>; }

template <typename Scalar>
constexpr Scalar radians(Scalar degrees) { return degrees * kPi<Scalar> / Scalar(180); }

/// Observer location in front of the display, stored in Cartesian form.
template <typename Scalar>
class BasicViewingPosition {
public:
    using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

    BasicViewingPosition(Scalar x0, Scalar y0, Scalar z0) : p_(x0, y0, z0) {
        if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(z0))
            throw DomainError("viewing position must be finite");
        if (!(z0 > Scalar(0)))
            throw DomainError("viewing position must satisfy z0 > 0 (observer in front of the screen)");
    }

    explicit BasicViewingPosition(const Vector3& p) : BasicViewingPosition(p.x(), p.y(), p.z()) {}

    Scalar x0() const { return p_.x(); }
    Scalar y0() const { return p_.y(); }
    Scalar z0() const { return p_.z(); }
    const Vector3& cartesian() const { return p_; }

    Scalar r0() const { return p_.norm(); }
    Scalar theta0() const { return std::acos(std::clamp(p_.y() / r0(), Scalar(-1), Scalar(1))); }
    Scalar phi0() const { return std::atan2(p_.x(), p_.z()); }

private:
    Vector3 p_;
};

/// Physical and pixel extent of a display.
template <typename Scalar>
struct BasicDisplayGeometry {
    Scalar width_in{};   // d_x
    Scalar height_in{};  // d_y
    int width_px{};      // N_x
    int height_px{};     // N_y
    Scalar ppi{};
    Scalar cycle_scale{1};  // native c/im per c/im of this pixel grid

    /// Physical size and resolution must be positive and agree within 0.05 in.
    void validate() const {
        if (!(width_in > 0) || !(height_in > 0) || width_px <= 0 || height_px <= 0 || !(ppi > 0))
            throw DomainError("display geometry fields must all be positive");
        if (!(cycle_scale > 0) || !std::isfinite(cycle_scale)) throw DomainError("display cycle scale must be positive");
        if (std::abs(width_in - Scalar(width_px) / ppi) > Scalar(0.05) ||
            std::abs(height_in - Scalar(height_px) / ppi) > Scalar(0.05))
            throw DomainError("display physical size disagrees with pixel count / ppi by more than 0.05 in");
    }

    /// Same physical panel on a different pixel grid; ppi follows the width.
    /// The new grid stands in for the native one with its frequency axis
    /// compressed, so one grid cycle counts as cycle_scale native cycles.
    BasicDisplayGeometry resampled(int new_width_px, int new_height_px) const {
        BasicDisplayGeometry g = *this;
        g.width_px = new_width_px;
        g.height_px = new_height_px;
        g.ppi = ppi * Scalar(new_width_px) / Scalar(width_px);
        g.cycle_scale = cycle_scale * Scalar(width_px) / Scalar(new_width_px);
        return g;
    }
};

template <typename Scalar>
struct BasicVisualAngle {
    Scalar theta_x{};
    Scalar theta_y{};
};

using ViewingPosition = BasicViewingPosition<double>;
using DisplayGeometry = BasicDisplayGeometry<double>;
using VisualAngle = BasicVisualAngle<double>;

template <typename Scalar>
BasicViewingPosition<Scalar> spherical_to_cartesian(Scalar r0, Scalar theta0, Scalar phi0) {
    if (!(r0 > 0) || !std::isfinite(r0))
        throw DomainError("viewing distance r0 must be positive");
    if (!(theta0 > 0 && theta0 < kPi<Scalar>))
        throw DomainError("polar angle theta0 must lie in (0, pi)");
    if (!(phi0 > -kPi<Scalar> / 2 && phi0 < kPi<Scalar> / 2))
        throw DomainError("azimuth phi0 must lie in (-pi/2, pi/2)");
    const Scalar s = std::sin(theta0);
    return {r0 * s * std::sin(phi0), r0 * std::cos(theta0), r0 * s * std::cos(phi0)};
}

namespace detail {

// Angle at the eye between the two edge midpoints of one display axis.
template <typename Scalar>
Scalar subtended(const Eigen::Matrix<Scalar, 3, 1>& eye, const Eigen::Matrix<Scalar, 3, 1>& half_extent) {
    const Eigen::Matrix<Scalar, 3, 1> to_a = -half_extent - eye;
    const Eigen::Matrix<Scalar, 3, 1> to_b = half_extent - eye;
    return std::atan2(to_a.cross(to_b).norm(), to_a.dot(to_b));
}

template <typename Scalar>
void require_display_extent(const BasicDisplayGeometry<Scalar>& display) {
    if (!(display.width_in > 0) || !(display.height_in > 0))
        throw DomainError("display extent must be positive");
}

}  // namespace detail

/// Visual angle subtended by the display, from the Cartesian position.
template <typename Scalar>
BasicVisualAngle<Scalar> visual_angle(const BasicViewingPosition<Scalar>& pos,
                                      const BasicDisplayGeometry<Scalar>& display) {
    detail::require_display_extent(display);
    using V = Eigen::Matrix<Scalar, 3, 1>;
    return {detail::subtended<Scalar>(pos.cartesian(), V(display.width_in / 2, 0, 0)),
            detail::subtended<Scalar>(pos.cartesian(), V(0, display.height_in / 2, 0))};
}

/// Visual angle evaluated from spherical coordinates in closed form.
template <typename Scalar>
BasicVisualAngle<Scalar> visual_angle_spherical(Scalar r0, Scalar theta0, Scalar phi0,
                                                const BasicDisplayGeometry<Scalar>& display) {
    detail::require_display_extent(display);
    const auto axis = [r0](Scalar d, Scalar lateral) {
        const Scalar r2 = r0 * r0;
        const Scalar q = d * d / 4;
        const Scalar cross = lateral * d;
        const Scalar c = (r2 - q) / std::sqrt((r2 + q) * (r2 + q) - cross * cross);
        return std::acos(std::clamp(c, Scalar(-1), Scalar(1)));
    };
    return {axis(display.width_in, r0 * std::sin(theta0) * std::sin(phi0)),
            axis(display.height_in, r0 * std::cos(theta0))};
}

/// Perceived spatial frequency (c/d) of a grating with (n_x, n_y) cycles across the display.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> perceived_frequency(const Eigen::Matrix<Scalar, 2, 1>& cycles,
                                                const BasicVisualAngle<Scalar>& angle) {
    if (!(angle.theta_x > 0) || !(angle.theta_y > 0))
        throw DomainError("visual angle components must be positive");
    return {cycles.x() / degrees(angle.theta_x), cycles.y() / degrees(angle.theta_y)};
}

}  // namespace illusionpad
