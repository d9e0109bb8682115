#include "illusionpad/device.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "illusionpad/error.hpp"

namespace illusionpad {

void DeviceProfile::validate() const {
    display.validate();
    if (camera && (!(camera->focal_length_mm > 0) || !(camera->pixel_size_mm > 0)))
        throw DomainError("camera focal length and pixel size must be positive");
}

DeviceProfile DeviceProfile::at_working_width(int width) const {
    if (width <= 0) throw DomainError("working width must be positive");
    if (width == display.width_px) return *this;
    const int height = static_cast<int>(std::lround(double(width) * display.height_px / display.width_px));
    DeviceProfile out = *this;
    out.display = display.resampled(width, height);
    return out;
}

DeviceProfile DeviceProfile::nexus6() {
    DeviceProfile d;
    d.name = "nexus6";
    d.display = {1440.0 / 493.0, 2560.0 / 493.0, 1440, 2560, 493.0};
    d.camera = CameraProfile{3.8, 0.001127};
    return d;
}

DeviceProfile DeviceProfile::iphone6() {
    DeviceProfile d;
    d.name = "iphone6";
    d.display = {750.0 / 326.0, 1334.0 / 326.0, 750, 1334, 326.0};
    d.camera = CameraProfile{4.15, 0.0015};
    return d;
}

std::vector<std::string> preset_device_names() { return {"nexus6", "iphone6"}; }

std::filesystem::path profile_directory() {
    if (const char* env = std::getenv("ILLUSIONPAD_PROFILES"); env && *env) return env;
    return ILLUSIONPAD_DEFAULT_PROFILE_DIR;
}

nlohmann::json to_json(const DeviceProfile& device) {
    nlohmann::json j = {
        {"name", device.name},
        {"display",
         {{"width_in", device.display.width_in},
          {"height_in", device.display.height_in},
          {"width_px", device.display.width_px},
          {"height_px", device.display.height_px},
          {"ppi", device.display.ppi},
          {"cycle_scale", device.display.cycle_scale}}},
    };
    if (device.camera)
        j["camera"] = {{"focal_length_mm", device.camera->focal_length_mm},
                       {"pixel_size_mm", device.camera->pixel_size_mm}};
    return j;
}

DeviceProfile device_from_json(const nlohmann::json& j) {
    try {
        DeviceProfile d;
        d.name = j.at("name").get<std::string>();
        const auto& disp = j.at("display");
        d.display.width_px = disp.at("width_px").get<int>();
        d.display.height_px = disp.at("height_px").get<int>();
        d.display.ppi = disp.at("ppi").get<double>();
        d.display.cycle_scale = disp.value("cycle_scale", 1.0);
        d.display.width_in = disp.contains("width_in") ? disp["width_in"].get<double>() : d.display.width_px / d.display.ppi;
        d.display.height_in =
            disp.contains("height_in") ? disp["height_in"].get<double>() : d.display.height_px / d.display.ppi;
        if (j.contains("camera") && !j["camera"].is_null())
            d.camera = CameraProfile{j["camera"].at("focal_length_mm").get<double>(),
                                     j["camera"].at("pixel_size_mm").get<double>()};
        d.validate();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed device profile: ") + e.what());
    }
}

DeviceProfile load_device(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open device profile " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("device profile " + path.string() + " is not valid JSON: " + e.what());
    }
    return device_from_json(j);
}

DeviceProfile resolve_device(const std::string& spec) {
    if (spec.empty()) throw InputError("no device profile given");
    namespace fs = std::filesystem;
    if (fs::is_regular_file(spec)) return load_device(spec);
    const bool looks_like_path = spec.find('/') != std::string::npos || fs::path(spec).has_extension();
    if (!looks_like_path) {
        const fs::path candidate = profile_directory() / (spec + ".json");
        if (fs::is_regular_file(candidate)) return load_device(candidate);
        if (spec == "nexus6") return DeviceProfile::nexus6();
        if (spec == "iphone6") return DeviceProfile::iphone6();
    }
    std::string known;
    for (const auto& n : preset_device_names()) known += (known.empty() ? "" : ", ") + n;
    throw InputError("unknown device profile '" + spec + "' (known: " + known + ")");
}

}  // namespace illusionpad
