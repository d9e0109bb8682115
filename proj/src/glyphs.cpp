// Built-in stroke font for the ten digits.
//
// Each glyph is a set of polylines in a unit box (u to the right, v down).
// Rasterization uses the distance from a pixel center to the nearest stroke
// segment, which gives a one-pixel antialiased edge at any resolution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "glyphs.hpp"

namespace illusionpad::glyphs {
namespace {

using Polyline = std::vector<Eigen::Vector2d>;

void append_arc(Polyline& line, double cx, double cy, double rx, double ry, double from_deg, double to_deg) {
    const int steps = std::max(8, static_cast<int>(std::abs(to_deg - from_deg) / 6.0));
    for (int i = 0; i <= steps; ++i) {
        const double a = (from_deg + (to_deg - from_deg) * i / steps) * std::numbers::pi / 180.0;
        line.emplace_back(cx + rx * std::cos(a), cy + ry * std::sin(a));
    }
}

Polyline arc(double cx, double cy, double rx, double ry, double from_deg, double to_deg) {
    Polyline line;
    append_arc(line, cx, cy, rx, ry, from_deg, to_deg);
    return line;
}

Polyline points(std::initializer_list<Eigen::Vector2d> pts) { return Polyline(pts); }

std::vector<Polyline> build(int digit) {
    switch (digit) {
        case 0:
            return {arc(0.5, 0.5, 0.45, 0.5, 0, 360)};
        case 1:
            return {points({{0.28, 0.2}, {0.58, 0.0}, {0.58, 1.0}})};
        case 2: {
            Polyline p = arc(0.5, 0.28, 0.42, 0.28, 180, 390);
            p.emplace_back(0.06, 1.0);
            p.emplace_back(0.95, 1.0);
            return {p};
        }
        case 3: {
            Polyline p = arc(0.5, 0.26, 0.4, 0.26, 200, 450);
            append_arc(p, 0.5, 0.75, 0.45, 0.25, 270, 520);
            return {p};
        }
        case 4:
            return {points({{0.72, 1.0}, {0.72, 0.0}, {0.04, 0.7}, {0.96, 0.7}})};
        case 5: {
            Polyline p = points({{0.88, 0.0}, {0.2, 0.0}, {0.16, 0.46}});
            append_arc(p, 0.5, 0.68, 0.42, 0.32, 225, 510);
            return {p};
        }
        case 6:
            return {arc(0.5, 0.68, 0.42, 0.32, 0, 360), arc(0.62, 0.68, 0.54, 0.68, 180, 280)};
        case 7:
            return {points({{0.05, 0.0}, {0.95, 0.0}, {0.38, 1.0}})};
        case 8:
            return {arc(0.5, 0.25, 0.36, 0.25, 0, 360), arc(0.5, 0.73, 0.45, 0.27, 0, 360)};
        case 9:
            return {arc(0.5, 0.32, 0.42, 0.32, 0, 360), arc(0.38, 0.32, 0.54, 0.68, 0, 100)};
        default:
            return {};
    }
}

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

}  // namespace

void draw_stroke_digit(ImageArray& canvas, int digit, const GlyphBox& box, double stroke_px, double ink,
                       double background) {
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments;
    for (const auto& line : build(digit)) {
        for (size_t i = 1; i < line.size(); ++i) {
            const auto map = [&](const Eigen::Vector2d& uv) {
                return Eigen::Vector2d(box.x + uv.x() * box.width, box.y + uv.y() * box.height);
            };
            segments.emplace_back(map(line[i - 1]), map(line[i]));
        }
    }
    const double half = stroke_px / 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(box.x - half - 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(box.y - half - 1)));
    const int x1 = std::min<int>(static_cast<int>(canvas.cols()), static_cast<int>(std::ceil(box.x + box.width + half + 1)));
    const int y1 = std::min<int>(static_cast<int>(canvas.rows()), static_cast<int>(std::ceil(box.y + box.height + half + 1)));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const Eigen::Vector2d p(x + 0.5, y + 0.5);
            double d = std::numeric_limits<double>::infinity();
            for (const auto& [a, b] : segments) d = std::min(d, segment_distance(p, a, b));
            const double coverage = std::clamp(half + 0.5 - d, 0.0, 1.0);
            if (coverage > 0) {
                const double v = background + (ink - background) * coverage;
                double& px = canvas(y, x);
                px = (ink >= background) ? std::max(px, v) : std::min(px, v);
            }
        }
    }
}

}  // namespace illusionpad::glyphs
