#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "illusionpad/geometry.hpp"

namespace illusionpad {

/// Camera optics; both lengths in millimetres.
struct CameraProfile {
    double focal_length_mm = 0.0;
    double pixel_size_mm = 0.0;
};

struct DeviceProfile {
    std::string name;
    DisplayGeometry display;
    std::optional<CameraProfile> camera;

    void validate() const;

    /// Same panel rendered at a coarser pixel grid `width` wide (aspect kept).
    DeviceProfile at_working_width(int width) const;

    static DeviceProfile nexus6();
    static DeviceProfile iphone6();
};

/// Built-in profile names.
std::vector<std::string> preset_device_names();

/// Directory searched for `<name>.json` profiles: $ILLUSIONPAD_PROFILES, else the bundled profiles/.
std::filesystem::path profile_directory();

/// Resolve `spec` as an existing file path, then `<profile_directory>/<spec>.json`,
/// then a built-in preset. Throws InputError when nothing matches.
DeviceProfile resolve_device(const std::string& spec);

DeviceProfile load_device(const std::filesystem::path& path);

nlohmann::json to_json(const DeviceProfile& device);
DeviceProfile device_from_json(const nlohmann::json& j);

}  // namespace illusionpad
