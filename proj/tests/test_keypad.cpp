#include <doctest.h>

#include <filesystem>
#include <set>

#include "illusionpad/error.hpp"
#include "illusionpad/keypad.hpp"
#include "oracles.hpp"

using namespace illusionpad;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("illusionpad_keypad_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("standard layout") {
    const KeypadLayout layout = KeypadLayout::standard(360, 640);
    CHECK(layout.rows == 4);
    CHECK(layout.cols == 3);
    CHECK_NOTHROW(layout.validate(360, 640));
    const auto rects = layout.button_rects();
    CHECK(rects[0].y + 0 == 640 - 4 * rects[0].height);
    CHECK(4 * rects[0].height == doctest::Approx(0.7 * 640).epsilon(0.01));
    for (int k = 0; k < 10; ++k) {
        CHECK(rects[k].width == rects[0].width);
        CHECK(rects[k].height == rects[0].height);
        for (int m = k + 1; m < 10; ++m) {
            const bool apart = rects[k].x + rects[k].width <= rects[m].x || rects[m].x + rects[m].width <= rects[k].x ||
                               rects[k].y + rects[k].height <= rects[m].y || rects[m].y + rects[m].height <= rects[k].y;
            CHECK(apart);
        }
    }
    CHECK(rects[1].x == rects[0].x + rects[0].width);
    CHECK(rects[3].y == rects[0].y + rects[0].height);
    CHECK(rects[9].x == rects[1].x);
    CHECK(rects[9].y == rects[6].y + rects[6].height);
    CHECK(kRegularOrdering[9] == 0);

    KeypadLayout off = layout;
    off.origin_px = {100, 300};
    CHECK_THROWS_AS(off.validate(360, 640), DomainError);
    KeypadLayout eleven = layout;
    eleven.rows = 5;
    CHECK_THROWS_AS(eleven.validate(360, 640), DomainError);
}

TEST_CASE("layout json round trip") {
    KeypadLayout layout = KeypadLayout::standard(1440, 2560);
    layout.ordering = {3, 1, 4, 0, 5, 9, 2, 6, 8, 7};
    const KeypadLayout back = layout_from_json(to_json(layout));
    CHECK(back.rows == layout.rows);
    CHECK(back.cols == layout.cols);
    CHECK(back.origin_px == layout.origin_px);
    CHECK(back.cell_px == layout.cell_px);
    CHECK(back.ordering == layout.ordering);
    auto j = to_json(layout);
    j["ordering"] = {1, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK_THROWS_AS(layout_from_json(j), DomainError);
    CHECK_THROWS_AS(layout_from_json(nlohmann::json{{"rows", 4}}), InputError);

    const KeypadLayout small = KeypadLayout::standard(1440, 2560).scaled(1440, 2560, 360, 640);
    CHECK_NOTHROW(small.validate(360, 640));
    CHECK(small.cell_px[0] == 120);
}

TEST_CASE("render is deterministic and sized") {
    const RenderStyle style;
    const GrayImage a = render_keypad(kRegularOrdering, style, 360, 640);
    const GrayImage b = render_keypad(kRegularOrdering, style, 360, 640);
    CHECK(a == b);
    CHECK(a.width() == 360);
    CHECK(a.height() == 640);
    CHECK(a.array().minCoeff() >= style.background - 1e-12);
    CHECK(a.array().maxCoeff() <= style.foreground + 1e-12);
    CHECK_THROWS_AS(render_keypad(kRegularOrdering, style, 299, 640), DomainError);
    CHECK_THROWS_AS(render_keypad(kRegularOrdering, style, 360, 532), DomainError);
    CHECK_THROWS_AS(render_keypad({0, 0, 1, 2, 3, 4, 5, 6, 7, 8}, style, 360, 640), DomainError);

    const auto crops = segment_buttons(a, KeypadLayout::standard(360, 640));
    CHECK(oracle::classify_digit(crops[0], style) == 1);
    CHECK(oracle::classify_digit(crops[9], style) == 0);
}

TEST_CASE("segmented buttons classify as their digits") {
    const RenderStyle style;
    const KeypadLayout layout = KeypadLayout::standard(360, 640);
    SeededRng rng(2024);
    int wrong = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Ordering ord = shuffle_ordering(rng);
        const auto crops = segment_buttons(render_keypad(ord, style, 360, 640, layout), layout);
        REQUIRE(crops.size() == 10);
        for (int k = 0; k < 10; ++k)
            if (oracle::classify_digit(crops[size_t(k)], style) != ord[size_t(k)]) ++wrong;
    }
    CHECK(wrong == 0);
}

TEST_CASE("each button holds exactly its own ink") {
    const RenderStyle style;
    const KeypadLayout layout = KeypadLayout::standard(360, 640);
    const GrayImage img = render_keypad({7, 2, 9, 0, 4, 1, 8, 3, 6, 5}, style, 360, 640, layout);
    const auto rects = layout.button_rects();
    const auto crops = segment_buttons(img, layout);
    const double mid = (style.background + style.foreground) / 2;
    double ink_inside = 0;
    for (int k = 0; k < 10; ++k) {
        const auto& c = crops[size_t(k)];
        CHECK(c.width() == rects[k].width);
        CHECK(c.height() == rects[k].height);
        CHECK(c == img.crop(rects[k].x, rects[k].y, rects[k].width, rects[k].height));
        double mass = 0, cx = 0, cy = 0;
        for (int y = 0; y < c.height(); ++y)
            for (int x = 0; x < c.width(); ++x)
                if (c(x, y) > mid) {
                    mass += 1;
                    cx += x;
                    cy += y;
                }
        REQUIRE(mass > 0);
        ink_inside += mass;
        cx /= mass;
        cy /= mass;
        CHECK(cx > 0.2 * c.width());
        CHECK(cx < 0.8 * c.width());
        CHECK(cy > 0.2 * c.height());
        CHECK(cy < 0.8 * c.height());
        // Ink never touches the cell border, so no glyph straddles two buttons.
        for (int x = 0; x < c.width(); ++x) {
            CHECK(c(x, 0) < mid);
            CHECK(c(x, c.height() - 1) < mid);
        }
    }
    double ink_total = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) ink_total += img(x, y) > mid;
    CHECK(ink_inside == ink_total);
    CHECK_THROWS_AS(segment_buttons(GrayImage(100, 100), layout), DomainError);
}

TEST_CASE("shuffle is uniform and reproducible") {
    SeededRng a(99), b(99);
    for (int i = 0; i < 20; ++i) CHECK(shuffle_ordering(a) == shuffle_ordering(b));

    SeededRng rng(123456);
    std::array<std::array<int, 10>, 10> counts{};
    std::set<Ordering> distinct;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const Ordering o = shuffle_ordering(rng);
        REQUIRE(is_permutation_of_digits(o));
        distinct.insert(o);
        for (int pos = 0; pos < 10; ++pos) ++counts[size_t(pos)][size_t(o[size_t(pos)])];
    }
    CHECK(distinct.size() > 9900);
    const double expected = draws / 10.0;
    for (int pos = 0; pos < 10; ++pos) {
        double chi = 0;
        for (int d = 0; d < 10; ++d) {
            const double diff = counts[size_t(pos)][size_t(d)] - expected;
            chi += diff * diff / expected;
        }
        CHECK(chi < oracle::kChiSquare9At99);
    }
}

TEST_CASE("glyph atlas") {
    TempDir dir;
    for (int d = 0; d < 10; ++d)
        if (d != 3 && d != 8) write_png(dir.path / ("digit_" + std::to_string(d) + ".png"), GrayImage(6, 10, 1.0));
    try {
        load_glyph_atlas(dir.path);
        FAIL("expected an error");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3, 8") != std::string::npos);
    }
    write_png(dir.path / "digit_3.png", GrayImage(6, 10, 1.0));
    write_png(dir.path / "digit_8.png", GrayImage(6, 10, 1.0));
    RenderStyle style;
    style.atlas = load_glyph_atlas(dir.path);
    const GrayImage img = render_keypad(kRegularOrdering, style, 360, 640);
    const auto rects = KeypadLayout::standard(360, 640).button_rects();
    const auto& r = rects[4];
    CHECK(img(r.x + r.width / 2, r.y + r.height / 2) == doctest::Approx(style.foreground));
    CHECK(img(r.x + 1, r.y + 1) == doctest::Approx(style.background));
}

TEST_CASE("categories") {
    const auto& cats = keypad_categories();
    REQUIRE(cats.size() == 4);
    CHECK(keypad_category("c1").sigma_hf == 145);
    CHECK(keypad_category("c2").sigma_hf == 215);
    CHECK(keypad_category("c3").sigma_hf == 305);
    CHECK(keypad_category("c4").sigma_hf == 440);
    for (const auto& c : cats) CHECK(c.sigma_lf == 35);
    CHECK(keypad_category("c2").scenario_distance_in == 45);
    CHECK_THROWS_AS(keypad_category("c5"), InputError);
}

TEST_CASE("hybrid keypad assembly") {
    const DeviceProfile dev = DeviceProfile::nexus6().at_working_width(360);
    SeededRng r1(7), r2(7);
    const HybridKeypad k1 = make_hybrid_keypad(dev, 35, 215, r1);
    const HybridKeypad k2 = make_hybrid_keypad(dev, 35, 215, r2);
    CHECK(k1.hybrid.composed == k2.hybrid.composed);
    CHECK(k1.user_ordering == k2.user_ordering);
    CHECK(is_permutation_of_digits(k1.user_ordering));
    CHECK(k1.surfer_ordering == kRegularOrdering);
    CHECK(k1.hybrid.composed.width() == 360);
    CHECK(k1.hybrid.composed.height() == 640);
    CHECK(k1.sigma_hf == 215);

    const HybridKeypad fixed = make_hybrid_keypad(dev, 35, 145, k1.user_ordering);
    const GrayImage user = render_keypad(k1.user_ordering, {}, 360, 640);
    const GrayImage surfer = render_keypad(kRegularOrdering, {}, 360, 640);
    const HybridImage ref = compose_hybrid(user, surfer, 35, 145, dev.display.cycle_scale);
    CHECK((fixed.hybrid.composed.array() - ref.composed.array()).abs().maxCoeff() < 1e-12);

    KeypadOptions none;
    none.include_user = false;
    const HybridKeypad empty = make_hybrid_keypad(dev, 35, 215, k1.user_ordering, none);
    CHECK(!empty.has_user_component);
    CHECK(empty.hybrid.composed == empty.hybrid.surfer_low);
    CHECK((empty.hybrid.surfer_low.array() - k1.hybrid.surfer_low.array()).abs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(make_hybrid_keypad(dev, 35, -1, k1.user_ordering), DomainError);
}

TEST_CASE("category c2 on the native panel") {
    SeededRng rng(1);
    const HybridKeypad k = make_hybrid_keypad(DeviceProfile::nexus6(), 35, 215, rng);
    CHECK(k.hybrid.composed.width() == 1440);
    CHECK(k.hybrid.composed.height() == 2560);
    CHECK(k.hybrid.sigma_hf == 215);
    CHECK(k.hybrid.sigma_lf == 35);
    CHECK_NOTHROW(k.layout.validate(1440, 2560));
}
