#pragma once

#include "illusionpad/image.hpp"

namespace illusionpad::glyphs {

struct GlyphBox {
    double x, y, width, height;
};

/// Rasterizes `digit` into `canvas` inside `box`; overlapping strokes keep the stronger ink.
void draw_stroke_digit(ImageArray& canvas, int digit, const GlyphBox& box, double stroke_px, double ink,
                       double background);

}  // namespace illusionpad::glyphs
