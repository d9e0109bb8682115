#pragma once

// JSON shapes shared by the CLI and the HTTP service.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "illusionpad/keypad.hpp"
#include "illusionpad/safety.hpp"
#include "illusionpad/visibility.hpp"

namespace illusionpad {

constexpr int kSchemaVersion = 1;

nlohmann::json position_json(const ViewingPosition& pos);

/// {v, v_th, visible, position:{r,theta,phi}, device, sigma_lf, sigma_hf, extrapolated_angles}
nlohmann::json verdict_json(const VisibilityVerdict& verdict, const HybridKeypad& keypad);

nlohmann::json safety_json(const SafetyResult& result);

nlohmann::json cutoff_json(const CutoffAnalysis& cutoff);

/// Everything needed to regenerate a keypad bit-for-bit.
nlohmann::json keypad_metadata(const HybridKeypad& keypad, std::uint64_t seed, const std::string& category);

nlohmann::json region_summary_json(const VisibilityRegion& region);

/// "90deg" is degrees, a bare number is radians. Throws InputError.
double parse_angle(const std::string& text);
double angle_from_json(const nlohmann::json& j);

/// {r, theta, phi} (angles as numbers in radians or "..deg" strings) or {x, y, z}.
ViewingPosition position_from_json(const nlohmann::json& j);

/// Everything that determines a generated keypad.
struct KeypadRequest {
    std::string device = "nexus6";
    std::string category;  // empty when the sigmas were given explicitly
    double sigma_lf = kDefaultSigmaLf;
    double sigma_hf = 0.0;
    std::uint64_t seed = 0;
    std::optional<int> width;  // pixel grid; native when unset
};

/// Reads {device, category | sigma_lf + sigma_hf, seed, width}. Throws InputError.
KeypadRequest keypad_request_from_json(const nlohmann::json& j);

HybridKeypad build_keypad(const KeypadRequest& request);

/// Rebuilds a keypad from generate metadata on a `width` pixel grid.
HybridKeypad keypad_from_metadata(const nlohmann::json& metadata, int width);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace illusionpad
