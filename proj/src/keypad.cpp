#include "illusionpad/keypad.hpp"

#include <algorithm>
#include <cmath>

#include "glyphs.hpp"
#include "illusionpad/error.hpp"

namespace illusionpad {

bool is_permutation_of_digits(const Ordering& ordering) {
    std::array<bool, 10> seen{};
    for (int d : ordering) {
        if (d < 0 || d > 9 || seen[d]) return false;
        seen[d] = true;
    }
    return true;
}

KeypadLayout KeypadLayout::standard(int width, int height) {
    KeypadLayout layout;
    const int pad_height = static_cast<int>(std::lround(0.7 * height));
    layout.cell_px = {width / layout.cols, pad_height / layout.rows};
    layout.origin_px = {(width - layout.cols * layout.cell_px[0]) / 2, height - layout.rows * layout.cell_px[1]};
    return layout;
}

std::array<PixelRect, 10> KeypadLayout::button_rects() const {
    std::array<PixelRect, 10> rects{};
    const int full = cols * (rows - 1);
    const int rest = 10 - full;
    for (int k = 0; k < 10; ++k) {
        int x;
        int y;
        if (k < full) {
            x = origin_px[0] + (k % cols) * cell_px[0];
            y = origin_px[1] + (k / cols) * cell_px[1];
        } else {
            x = origin_px[0] + ((cols - rest) * cell_px[0]) / 2 + (k - full) * cell_px[0];
            y = origin_px[1] + (rows - 1) * cell_px[1];
        }
        rects[k] = {x, y, cell_px[0], cell_px[1]};
    }
    return rects;
}

void KeypadLayout::validate(int image_width, int image_height) const {
    if (rows <= 0 || cols <= 0 || cell_px[0] <= 0 || cell_px[1] <= 0)
        throw DomainError("keypad layout needs positive rows, cols and cell size");
    const int full = cols * (rows - 1);
    if (full >= 10 || rows * cols < 10)
        throw DomainError("keypad layout must place exactly ten buttons with a non-empty last row");
    if (!is_permutation_of_digits(ordering)) throw DomainError("keypad ordering is not a permutation of 0-9");
    for (const auto& r : button_rects()) {
        if (r.x < 0 || r.y < 0 || r.x + r.width > image_width || r.y + r.height > image_height)
            throw DomainError("keypad button rectangle lies outside the image");
    }
}

KeypadLayout KeypadLayout::scaled(int from_width, int from_height, int to_width, int to_height) const {
    if (from_width == to_width && from_height == to_height) return *this;
    KeypadLayout out = *this;
    const double sx = double(to_width) / from_width;
    const double sy = double(to_height) / from_height;
    out.origin_px = {static_cast<int>(std::lround(origin_px[0] * sx)), static_cast<int>(std::lround(origin_px[1] * sy))};
    out.cell_px = {static_cast<int>(std::floor(cell_px[0] * sx)), static_cast<int>(std::floor(cell_px[1] * sy))};
    return out;
}

nlohmann::json to_json(const KeypadLayout& layout) {
    return {{"rows", layout.rows},
            {"cols", layout.cols},
            {"origin_px", layout.origin_px},
            {"cell_px", layout.cell_px},
            {"ordering", layout.ordering}};
}

KeypadLayout layout_from_json(const nlohmann::json& j) {
    try {
        KeypadLayout layout;
        layout.rows = j.at("rows").get<int>();
        layout.cols = j.at("cols").get<int>();
        layout.origin_px = j.at("origin_px").get<std::array<int, 2>>();
        layout.cell_px = j.at("cell_px").get<std::array<int, 2>>();
        if (j.contains("ordering")) layout.ordering = j["ordering"].get<Ordering>();
        if (!is_permutation_of_digits(layout.ordering))
            throw DomainError("layout ordering is not a permutation of 0-9");
        return layout;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed keypad layout: ") + e.what());
    }
}

GlyphAtlas load_glyph_atlas(const std::filesystem::path& dir) {
    GlyphAtlas atlas;
    std::string missing;
    for (int d = 0; d < 10; ++d) {
        const auto path = dir / ("digit_" + std::to_string(d) + ".png");
        if (!std::filesystem::is_regular_file(path)) {
            missing += (missing.empty() ? "" : ", ") + std::to_string(d);
            continue;
        }
        atlas[d] = read_png(path);
    }
    if (!missing.empty()) throw InputError("glyph assets missing for digit(s): " + missing + " in " + dir.string());
    return atlas;
}

namespace {

glyphs::GlyphBox glyph_box(const PixelRect& cell, const RenderStyle& style) {
    const double h = style.glyph_height * cell.height;
    const double w = style.glyph_aspect * h;
    return {cell.x + (cell.width - w) / 2.0, cell.y + (cell.height - h) / 2.0, w, h};
}

void draw_digit(ImageArray& canvas, int digit, const glyphs::GlyphBox& box, const RenderStyle& style) {
    if (!style.atlas) {
        glyphs::draw_stroke_digit(canvas, digit, box, style.stroke * box.height, style.foreground, style.background);
        return;
    }
    const GrayImage& mask = (*style.atlas)[digit];
    if (mask.empty()) throw InputError("glyph asset for digit " + std::to_string(digit) + " is empty");
    const int w = std::max(1, static_cast<int>(std::lround(box.width)));
    const int h = std::max(1, static_cast<int>(std::lround(box.height)));
    const GrayImage scaled = resample_bilinear(mask, w, h);
    const int x0 = static_cast<int>(std::lround(box.x));
    const int y0 = static_cast<int>(std::lround(box.y));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int cx = x0 + x;
            const int cy = y0 + y;
            if (cx < 0 || cy < 0 || cx >= canvas.cols() || cy >= canvas.rows()) continue;
            const double coverage = std::clamp(scaled(x, y), 0.0, 1.0);
            canvas(cy, cx) = style.background + (style.foreground - style.background) * coverage;
        }
    }
}

}  // namespace

GrayImage render_keypad(const Ordering& ordering, const RenderStyle& style, int width, int height,
                        const std::optional<KeypadLayout>& layout) {
    if (width < kMinRenderWidth || height < kMinRenderHeight)
        throw DomainError("keypad render size must be at least 300 x 533 pixels");
    if (!is_permutation_of_digits(ordering)) throw DomainError("ordering is not a permutation of 0-9");
    const KeypadLayout grid = layout.value_or(KeypadLayout::standard(width, height));
    grid.validate(width, height);
    GrayImage image(width, height, style.background);
    const auto rects = grid.button_rects();
    for (int k = 0; k < 10; ++k) draw_digit(image.array(), ordering[k], glyph_box(rects[k], style), style);
    return image;
}

GrayImage render_glyph(int digit, const RenderStyle& style, int width, int height) {
    if (digit < 0 || digit > 9) throw DomainError("digit out of range");
    GrayImage image(width, height, style.background);
    draw_digit(image.array(), digit, glyph_box({0, 0, width, height}, style), style);
    return image;
}

Ordering shuffle_ordering(SeededRng& rng) {
    Ordering out = kRegularOrdering;
    for (int i = 9; i > 0; --i) std::swap(out[i], out[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    return out;
}

std::vector<GrayImage> segment_buttons(const GrayImage& image, const KeypadLayout& layout) {
    std::vector<GrayImage> out;
    out.reserve(10);
    for (const auto& r : layout.button_rects()) {
        if (r.x < 0 || r.y < 0 || r.width <= 0 || r.height <= 0 || r.x + r.width > image.width() ||
            r.y + r.height > image.height())
            throw DomainError("button rectangle lies outside the image");
        out.push_back(image.crop(r.x, r.y, r.width, r.height));
    }
    return out;
}

const std::vector<KeypadCategory>& keypad_categories() {
    static const std::vector<KeypadCategory> categories{
        {"c1", kDefaultSigmaLf, 145.0, 60.0},
        {"c2", kDefaultSigmaLf, 215.0, 45.0},
        {"c3", kDefaultSigmaLf, 305.0, 35.0},
        {"c4", kDefaultSigmaLf, 440.0, 25.0},
    };
    return categories;
}

const KeypadCategory& keypad_category(const std::string& name) {
    for (const auto& c : keypad_categories())
        if (c.name == name) return c;
    throw InputError("unknown keypad category '" + name + "' (expected c1, c2, c3 or c4)");
}

HybridKeypad make_hybrid_keypad(const DeviceProfile& device, double sigma_lf, double sigma_hf, SeededRng& rng,
                                const KeypadOptions& options) {
    const Ordering user = shuffle_ordering(rng);
    return make_hybrid_keypad(device, sigma_lf, sigma_hf, user, options);
}

HybridKeypad make_hybrid_keypad(const DeviceProfile& device, double sigma_lf, double sigma_hf,
                                const Ordering& user_ordering, const KeypadOptions& options) {
    device.validate();
    if (!(sigma_lf > 0) || !(sigma_hf > 0)) throw DomainError("hybrid sigmas must be positive");
    const int w = device.display.width_px;
    const int h = device.display.height_px;
    KeypadLayout layout = options.layout.value_or(KeypadLayout::standard(w, h));
    layout.ordering = kRegularOrdering;
    layout.validate(w, h);

    const GrayImage surfer = render_keypad(kRegularOrdering, options.style, w, h, layout);
    HybridKeypad keypad;
    if (options.include_user) {
        const GrayImage user = render_keypad(user_ordering, options.style, w, h, layout);
        keypad.hybrid = compose_hybrid(user, surfer, sigma_lf, sigma_hf, device.display.cycle_scale);
    } else {
        keypad.hybrid.surfer_low = apply_filter(surfer, {FilterKind::lowpass, sigma_lf / device.display.cycle_scale});
        keypad.hybrid.user_high = GrayImage(w, h, 0.0);
        keypad.hybrid.composed = keypad.hybrid.surfer_low;
        keypad.hybrid.sigma_lf = sigma_lf;
        keypad.hybrid.sigma_hf = sigma_hf;
    }
    keypad.user_ordering = user_ordering;
    keypad.surfer_ordering = kRegularOrdering;
    keypad.layout = layout;
    keypad.device = device;
    keypad.sigma_lf = sigma_lf;
    keypad.sigma_hf = sigma_hf;
    keypad.has_user_component = options.include_user;
    return keypad;
}

}  // namespace illusionpad
