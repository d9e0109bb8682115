#include "illusionpad/serialize.hpp"

#include <charconv>
#include <cmath>

#include <openssl/evp.h>

#include "illusionpad/error.hpp"

namespace illusionpad {

nlohmann::json position_json(const ViewingPosition& pos) {
    return {{"r", pos.r0()},       {"theta", pos.theta0()}, {"phi", pos.phi0()},
            {"x", pos.x0()},       {"y", pos.y0()},         {"z", pos.z0()}};
}

nlohmann::json verdict_json(const VisibilityVerdict& verdict, const HybridKeypad& keypad) {
    return {{"schema_version", kSchemaVersion},
            {"v", verdict.index_v},
            {"v_th", verdict.threshold_v_th},
            {"visible", verdict.visible},
            {"position", position_json(verdict.position)},
            {"device", keypad.device.name},
            {"sigma_lf", keypad.sigma_lf},
            {"sigma_hf", keypad.sigma_hf},
            {"extrapolated_angles", verdict.extrapolated_angles}};
}

nlohmann::json cutoff_json(const CutoffAnalysis& c) {
    return {{"sigma_x_hf", c.sigma_x_hf}, {"sigma_y_hf", c.sigma_y_hf}, {"ellipse_a", c.axis_a},
            {"ellipse_b", c.axis_b},      {"fs_x", c.fs_x},             {"fs_y", c.fs_y},
            {"l_x_in", c.l_x},            {"l_y_in", c.l_y}};
}

nlohmann::json safety_json(const SafetyResult& result) {
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"mode", result.mode == SafetyMode::camera ? "camera" : "naked_eye"},
                        {"d_s_in", result.d_s},
                        {"unbounded", result.unbounded},
                        {"device", result.device},
                        {"sigma_hf", result.sigma_hf},
                        {"theta", result.theta0},
                        {"phi", result.phi0}};
    if (result.mode == SafetyMode::naked_eye) {
        j["sigma_lf"] = result.sigma_lf;
        j["v_th"] = result.v_th;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& s : result.trace) trace.push_back({{"r", s.r0}, {"v", s.v}});
        j["trace"] = std::move(trace);
    }
    if (result.cutoff) j["cutoff"] = cutoff_json(*result.cutoff);
    return j;
}

nlohmann::json keypad_metadata(const HybridKeypad& keypad, std::uint64_t seed, const std::string& category) {
    return {{"schema_version", kSchemaVersion},
            {"device", to_json(keypad.device)},
            {"category", category.empty() ? nlohmann::json(nullptr) : nlohmann::json(category)},
            {"sigma_lf", keypad.sigma_lf},
            {"sigma_hf", keypad.sigma_hf},
            {"sigma_x_lf", GaussianFilterSpec{FilterKind::lowpass, keypad.sigma_lf}.sigma_x(
                               keypad.device.display.width_px, keypad.device.display.height_px)},
            {"sigma_x_hf", GaussianFilterSpec{FilterKind::highpass, keypad.sigma_hf}.sigma_x(
                               keypad.device.display.width_px, keypad.device.display.height_px)},
            {"seed", seed},
            {"user_ordering", keypad.user_ordering},
            {"surfer_ordering", keypad.surfer_ordering},
            {"has_user_component", keypad.has_user_component},
            {"width_px", keypad.hybrid.composed.width()},
            {"height_px", keypad.hybrid.composed.height()},
            {"user_high_png_offset", 0.5}};
}

nlohmann::json region_summary_json(const VisibilityRegion& region) {
    size_t visible = 0;
    for (const auto& c : region.cells) visible += c.visible ? 1 : 0;
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"cells", region.cells.size()},
                        {"visible_cells", visible},
                        {"v_th", region.v_th}};
    if (region.farthest_visible) {
        const auto& c = *region.farthest_visible;
        const ViewingPosition p(c.x, c.y, c.z);
        j["farthest_visible"] = {{"position", position_json(p)}, {"v", c.v}};
    } else {
        j["farthest_visible"] = nullptr;
    }
    return j;
}

double parse_angle(const std::string& text) {
    std::string_view v = text;
    bool deg = false;
    if (v.ends_with("deg")) {
        deg = true;
        v.remove_suffix(3);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (v.empty() || ec != std::errc{} || end != v.data() + v.size() || !std::isfinite(value))
        throw InputError("malformed angle '" + text + "' (use radians or a 'deg' suffix)");
    return deg ? radians(value) : value;
}

double angle_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_angle(j.get<std::string>());
    throw InputError("angle must be a number (radians) or a string like \"30deg\"");
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace

ViewingPosition position_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("position must be an object");
    if (j.contains("r")) {
        if (!j.contains("theta") || !j.contains("phi")) throw InputError("position needs r, theta and phi");
        return spherical_to_cartesian(number_field(j, "r"), angle_from_json(j["theta"]), angle_from_json(j["phi"]));
    }
    if (j.contains("x") || j.contains("y") || j.contains("z"))
        return {number_field(j, "x"), number_field(j, "y"), number_field(j, "z")};
    throw InputError("position needs {r, theta, phi} or {x, y, z}");
}

KeypadRequest keypad_request_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("keypad request must be an object");
    KeypadRequest req;
    try {
        if (j.contains("device")) req.device = j["device"].get<std::string>();
        if (j.contains("category")) {
            req.category = j["category"].get<std::string>();
            const auto& cat = keypad_category(req.category);
            req.sigma_lf = cat.sigma_lf;
            req.sigma_hf = cat.sigma_hf;
        }
        if (j.contains("sigma_lf")) req.sigma_lf = j["sigma_lf"].get<double>();
        if (j.contains("sigma_hf")) {
            req.sigma_hf = j["sigma_hf"].get<double>();
        } else if (req.category.empty()) {
            throw InputError("give either a category or sigma_hf");
        }
        if (j.contains("seed")) req.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("width")) req.width = j["width"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed keypad request: ") + e.what());
    }
    return req;
}

HybridKeypad build_keypad(const KeypadRequest& request) {
    DeviceProfile device = resolve_device(request.device);
    if (request.width) device = device.at_working_width(*request.width);
    SeededRng rng(request.seed);
    return make_hybrid_keypad(device, request.sigma_lf, request.sigma_hf, rng);
}

HybridKeypad keypad_from_metadata(const nlohmann::json& metadata, int width) {
    try {
        const DeviceProfile device = device_from_json(metadata.at("device")).at_working_width(width);
        const auto user = metadata.at("user_ordering").get<Ordering>();
        if (!is_permutation_of_digits(user)) throw InputError("metadata user_ordering is not a digit permutation");
        KeypadOptions options;
        options.include_user = metadata.value("has_user_component", true);
        return make_hybrid_keypad(device, metadata.at("sigma_lf").get<double>(), metadata.at("sigma_hf").get<double>(),
                                  user, options);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed keypad metadata: ") + e.what());
    }
}

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<size_t>(n));
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw InputError("base64 length must be a multiple of 4");
    std::vector<unsigned char> out(text.size() / 4 * 3);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw InputError("malformed base64");
    size_t padding = 0;
    if (!text.empty() && text.back() == '=') ++padding;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<size_t>(n) - padding);
    return out;
}

}  // namespace illusionpad
