#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "illusionpad/device.hpp"
#include "illusionpad/image.hpp"
#include "illusionpad/rng.hpp"
#include "illusionpad/spectral.hpp"

namespace illusionpad {

/// ordering[k] is the digit drawn on button k (row-major button index).
using Ordering = std::array<int, 10>;

constexpr Ordering kRegularOrdering{1, 2, 3, 4, 5, 6, 7, 8, 9, 0};

bool is_permutation_of_digits(const Ordering& ordering);

struct PixelRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

/// Grid of equal cells holding the ten buttons. Full rows are filled
/// row-major; the buttons of a partial last row are centered (digit 0
/// bottom-center on the usual 4 x 3 pad).
struct KeypadLayout {
    int rows = 4;
    int cols = 3;
    std::array<int, 2> origin_px{0, 0};
    std::array<int, 2> cell_px{0, 0};
    Ordering ordering = kRegularOrdering;

    /// Default pad: 4 x 3 flush cells over the lower 70% of a width x height image.
    static KeypadLayout standard(int width, int height);

    std::array<PixelRect, 10> button_rects() const;

    /// Throws DomainError when the grid is inconsistent or leaves the image.
    void validate(int image_width, int image_height) const;

    /// Same layout scaled to another pixel grid.
    KeypadLayout scaled(int from_width, int from_height, int to_width, int to_height) const;
};

nlohmann::json to_json(const KeypadLayout& layout);
KeypadLayout layout_from_json(const nlohmann::json& j);

/// Ink masks for the ten digits (1 = ink), indexed by digit.
using GlyphAtlas = std::array<GrayImage, 10>;

/// Loads digit_0.png ... digit_9.png from `dir`; the error lists every missing digit.
GlyphAtlas load_glyph_atlas(const std::filesystem::path& dir);

struct RenderStyle {
    double background = 0.1;
    double foreground = 0.9;
    double glyph_height = 0.65;  // fraction of cell height
    double glyph_aspect = 0.6;   // width / height
    double stroke = 0.16;        // stroke width as a fraction of glyph height
    std::optional<GlyphAtlas> atlas;  // replaces the built-in stroke font when set
};

constexpr int kMinRenderWidth = 300;
constexpr int kMinRenderHeight = 533;

/// Deterministic keypad raster with `ordering` placed on `layout`.
GrayImage render_keypad(const Ordering& ordering, const RenderStyle& style, int width, int height,
                        const std::optional<KeypadLayout>& layout = std::nullopt);

/// Draws one built-in glyph into a blank image of the given size, centered.
GrayImage render_glyph(int digit, const RenderStyle& style, int width, int height);

/// Uniform random permutation of the digits (Fisher-Yates).
Ordering shuffle_ordering(SeededRng& rng);

/// Exact crops of the ten buttons, index-aligned with the layout.
std::vector<GrayImage> segment_buttons(const GrayImage& image, const KeypadLayout& layout);

enum class ShuffleMode { per_attempt, per_digit };

struct KeypadCategory {
    std::string name;
    double sigma_lf;
    double sigma_hf;
    double scenario_distance_in;  // intended naked-eye safety distance
};

/// The four predefined hybrid keypads c1..c4.
const std::vector<KeypadCategory>& keypad_categories();
const KeypadCategory& keypad_category(const std::string& name);

struct HybridKeypad {
    HybridImage hybrid;
    Ordering user_ordering{};
    Ordering surfer_ordering = kRegularOrdering;
    KeypadLayout layout;
    DeviceProfile device;
    double sigma_lf = 0.0;
    double sigma_hf = 0.0;
    bool has_user_component = true;
};

struct KeypadOptions {
    RenderStyle style;
    std::optional<KeypadLayout> layout;
    /// When false the user component is dropped and the hybrid equals the surfer low-pass image.
    bool include_user = true;
};

/// Renders the user's keypad with a fresh shuffled ordering and the surfer's
/// keypad with the regular ordering at the device's pixel resolution, then composes them.
HybridKeypad make_hybrid_keypad(const DeviceProfile& device, double sigma_lf, double sigma_hf, SeededRng& rng,
                                const KeypadOptions& options = {});

/// Same, with an explicit user ordering.
HybridKeypad make_hybrid_keypad(const DeviceProfile& device, double sigma_lf, double sigma_hf,
                                const Ordering& user_ordering, const KeypadOptions& options = {});

}  // namespace illusionpad
