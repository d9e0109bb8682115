#include "illusionpad/service.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "illusionpad/error.hpp"
#include "illusionpad/perception.hpp"
#include "illusionpad/serialize.hpp"
#include "illusionpad/visibility.hpp"

namespace illusionpad {

namespace {

using json = nlohmann::json;
using Digest = std::array<unsigned char, 32>;

struct HttpError : std::runtime_error {
    int status;
    HttpError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

class ComputeSlot {
public:
    explicit ComputeSlot(std::counting_semaphore<>& slots) : slots_(slots) { slots_.acquire(); }
    ~ComputeSlot() { slots_.release(); }
    ComputeSlot(const ComputeSlot&) = delete;
    ComputeSlot& operator=(const ComputeSlot&) = delete;

private:
    std::counting_semaphore<>& slots_;
};

ServiceResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

ServiceResponse error_response(int status, const std::string& message) {
    return json_response(status, {{"schema_version", kSchemaVersion}, {"error", message}});
}

ServiceResponse png_response(const GrayImage& image, double offset = 0.0) {
    const auto bytes = encode_png(image, offset);
    return {200, "image/png", std::string(bytes.begin(), bytes.end())};
}

std::string png_base64(const GrayImage& image, double offset = 0.0) { return base64_encode(encode_png(image, offset)); }

template <size_t N>
std::array<unsigned char, N> random_bytes() {
    std::array<unsigned char, N> out{};
    if (RAND_bytes(out.data(), static_cast<int>(N)) != 1) throw std::runtime_error("system random source failed");
    return out;
}

std::string hex(const unsigned char* data, size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xf]);
    }
    return out;
}

Digest pin_digest(const std::array<unsigned char, 16>& salt, const std::vector<int>& digits) {
    std::string message(salt.begin(), salt.end());
    for (int d : digits) message.push_back(static_cast<char>('0' + d));
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(message.data(), message.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw std::runtime_error("SHA-256 failed");
    OPENSSL_cleanse(message.data(), message.size());
    return out;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(path.substr(0, path.find('?')));
    while (std::getline(in, part, '/'))
        if (!part.empty()) parts.push_back(part);
    return parts;
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw HttpError(400, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

struct Service::Session {
    std::mutex mutex;
    std::string device_name;
    std::string category;
    DeviceProfile device;
    double sigma_lf = 0.0;
    double sigma_hf = 0.0;
    ShuffleMode mode = ShuffleMode::per_attempt;
    SeededRng rng{0};
    Ordering ordering{};
    std::array<unsigned char, 16> salt{};
    Digest digest{};
    size_t pin_length = 0;
    std::vector<int> entered;
    int attempts = 0;
    int failures = 0;
    bool locked = false;
    std::chrono::steady_clock::time_point created;
};

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    if (options_.working_width <= 0) throw DomainError("working width must be positive");
    const unsigned n = options_.workers ? options_.workers : std::max(1u, std::thread::hardware_concurrency());
    compute_slots_ = std::make_unique<std::counting_semaphore<>>(n);
}

Service::~Service() = default;

ServiceResponse Service::handle(const ServiceRequest& request) {
    const auto parts = split_path(request.path);
    const bool raw_png = request.accept.find("image/png") != std::string::npos;
    try {
        if (request.method == "GET") {
            if (parts == std::vector<std::string>{"spec"}) return json_response(200, openapi());
            if (parts == std::vector<std::string>{"health"}) return json_response(200, {{"status", "ok"}});
            if (parts == std::vector<std::string>{"devices"})
                return json_response(200, {{"schema_version", kSchemaVersion}, {"devices", preset_device_names()}});
        } else if (request.method == "POST") {
            if (parts == std::vector<std::string>{"hybrid"}) return post_hybrid(parse_body(request.body), raw_png);
            if (parts == std::vector<std::string>{"simulate"}) return post_simulate(parse_body(request.body), raw_png);
            if (parts == std::vector<std::string>{"session"}) return post_session(parse_body(request.body));
            if (parts.size() == 3 && parts[0] == "session" && parts[2] == "press")
                return post_press(parts[1], parse_body(request.body));
            if (parts.size() == 3 && parts[0] == "session" && parts[2] == "submit") return post_submit(parts[1]);
        }
        return error_response(404, "no route for " + request.method + " " + request.path);
    } catch (const HttpError& e) {
        return error_response(e.status, e.what());
    } catch (const InputError& e) {
        return error_response(400, e.what());
    } catch (const DomainError& e) {
        return error_response(422, e.what());
    } catch (const SearchError& e) {
        return error_response(422, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

ServiceResponse Service::post_hybrid(const json& body, bool raw_png) {
    const KeypadRequest req = keypad_request_from_json(body);
    ComputeSlot slot(*compute_slots_);
    const HybridKeypad keypad = build_keypad(req);
    if (raw_png) return png_response(keypad.hybrid.composed);
    return json_response(200, {{"schema_version", kSchemaVersion},
                               {"metadata", keypad_metadata(keypad, req.seed, req.category)},
                               {"layout", to_json(keypad.layout)},
                               {"images",
                                {{"hybrid", png_base64(keypad.hybrid.composed)},
                                 {"user_high", png_base64(keypad.hybrid.user_high, 0.5)},
                                 {"surfer_low", png_base64(keypad.hybrid.surfer_low)}}}});
}

ServiceResponse Service::post_simulate(const json& body, bool raw_png) {
    if (!body.contains("position")) throw InputError("missing position");
    const ViewingPosition pos = position_from_json(body["position"]);
    double v_th = kDefaultVisibilityThreshold;
    if (body.contains("v_th")) {
        if (!body["v_th"].is_number()) throw InputError("v_th must be a number");
        v_th = body["v_th"].get<double>();
    }
    std::optional<int> width;
    if (body.contains("width")) {
        if (!body["width"].is_number_integer()) throw InputError("width must be an integer");
        width = body["width"].get<int>();
    }

    ComputeSlot slot(*compute_slots_);
    if (body.contains("keypad")) {
        KeypadRequest req = keypad_request_from_json(body["keypad"]);
        req.width = width.value_or(req.width.value_or(options_.working_width));
        const HybridKeypad keypad = build_keypad(req);
        const VisibilityEvaluator evaluator(keypad);
        const VisibilityDetail detail = evaluator.evaluate(pos);
        const GrayImage perceived = simulate_perception(keypad.hybrid.composed, keypad.device.display, pos);
        if (raw_png) return png_response(perceived);
        const VisibilityVerdict v = verdict(detail.index_v, v_th, pos, detail.perception.extrapolated);
        return json_response(200, {{"schema_version", kSchemaVersion},
                                   {"verdict", verdict_json(v, keypad)},
                                   {"per_button", detail.per_button},
                                   {"perception",
                                    {{"f1", detail.perception.f1},
                                     {"f0", detail.perception.f0},
                                     {"theta_x", detail.perception.angle.theta_x},
                                     {"theta_y", detail.perception.angle.theta_y}}},
                                   {"perceived_png", png_base64(perceived)}});
    }
    if (body.contains("png")) {
        if (!body["png"].is_string()) throw InputError("png must be a base64 string");
        const GrayImage image = decode_png(base64_decode(body["png"].get<std::string>()));
        const std::string device_name = body.value("device", std::string("nexus6"));
        const DeviceProfile device = resolve_device(device_name).at_working_width(width.value_or(image.width()));
        const PerceptionParams params = perception_params(device.display, pos, DafSpec{});
        const GrayImage perceived = simulate_perception(image, device.display, pos);
        if (raw_png) return png_response(perceived);
        return json_response(200, {{"schema_version", kSchemaVersion},
                                   {"position", position_json(pos)},
                                   {"perception",
                                    {{"f1", params.f1},
                                     {"f0", params.f0},
                                     {"theta_x", params.angle.theta_x},
                                     {"theta_y", params.angle.theta_y},
                                     {"extrapolated_angles", params.extrapolated}}},
                                   {"perceived_png", png_base64(perceived)}});
    }
    throw InputError("give either a keypad description or a base64 png");
}

json Service::keypad_view(const Session& s) const {
    const HybridKeypad keypad = make_hybrid_keypad(s.device, s.sigma_lf, s.sigma_hf, s.ordering);
    return {{"ordering", s.ordering}, {"layout", to_json(keypad.layout)}, {"hybrid_png", png_base64(keypad.hybrid.composed)}};
}

ServiceResponse Service::post_session(const json& body) {
    auto session = std::make_shared<Session>();
    std::vector<int> pin;
    try {
        if (!body.contains("pin") || !body["pin"].is_string()) throw InputError("pin must be a string of digits");
        const auto text = body["pin"].get<std::string>();
        if (text.size() < 4 || text.size() > 12) throw InputError("pin must have 4 to 12 digits");
        for (char c : text) {
            if (c < '0' || c > '9') throw InputError("pin must contain digits only");
            pin.push_back(c - '0');
        }
        session->device_name = body.value("device", std::string("nexus6"));
        session->category = body.value("category", std::string("c2"));
        const std::string mode = body.value("shuffle_mode", std::string("per_attempt"));
        if (mode == "per_attempt")
            session->mode = ShuffleMode::per_attempt;
        else if (mode == "per_digit")
            session->mode = ShuffleMode::per_digit;
        else
            throw InputError("shuffle_mode must be per_attempt or per_digit");
        std::uint64_t seed = 0;
        if (body.contains("seed")) {
            seed = body["seed"].get<std::uint64_t>();
        } else {
            const auto b = random_bytes<8>();
            for (auto byte : b) seed = (seed << 8) | byte;
        }
        session->rng = SeededRng(seed);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed session request: ") + e.what());
    }
    const auto& cat = keypad_category(session->category);
    session->sigma_lf = cat.sigma_lf;
    session->sigma_hf = cat.sigma_hf;
    session->device = resolve_device(session->device_name).at_working_width(options_.working_width);
    session->ordering = shuffle_ordering(session->rng);
    session->salt = random_bytes<16>();
    session->digest = pin_digest(session->salt, pin);
    session->pin_length = pin.size();
    session->created = options_.clock();

    const auto id_bytes = random_bytes<16>();
    const std::string id = hex(id_bytes.data(), id_bytes.size());
    json view = keypad_view(*session);
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_[id] = session;
    }
    return json_response(201, {{"schema_version", kSchemaVersion},
                               {"session_id", id},
                               {"device", session->device_name},
                               {"category", session->category},
                               {"shuffle_mode", session->mode == ShuffleMode::per_digit ? "per_digit" : "per_attempt"},
                               {"pin_length", session->pin_length},
                               {"max_failures", options_.max_failures},
                               {"expires_in_s", options_.session_ttl.count()},
                               {"keypad", std::move(view)}});
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    const auto now = options_.clock();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second->created >= options_.session_ttl)
            it = sessions_.erase(it);
        else
            ++it;
    }
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError(404, "unknown or expired session");
    return it->second;
}

ServiceResponse Service::post_press(const std::string& id, const json& body) {
    const auto session = find_session(id);
    std::lock_guard lock(session->mutex);
    if (session->locked) throw HttpError(423, "session locked after too many failed attempts");
    if (!body.contains("button") || !body["button"].is_number_integer()) throw InputError("button must be an integer");
    const int button = body["button"].get<int>();
    if (button < 0 || button > 9) throw InputError("button must lie in [0, 9]");
    if (session->entered.size() >= session->pin_length) throw DomainError("PIN already complete; submit it");
    session->entered.push_back(session->ordering[static_cast<size_t>(button)]);
    json out = {{"schema_version", kSchemaVersion},
                {"button", button},
                {"presses", session->entered.size()},
                {"pin_length", session->pin_length}};
    if (session->mode == ShuffleMode::per_digit) {
        session->ordering = shuffle_ordering(session->rng);
        out["keypad"] = keypad_view(*session);
    }
    return json_response(200, out);
}

ServiceResponse Service::post_submit(const std::string& id) {
    const auto session = find_session(id);
    std::lock_guard lock(session->mutex);
    if (session->locked) throw HttpError(423, "session locked after too many failed attempts");
    const bool accepted = session->entered.size() == session->pin_length &&
                          CRYPTO_memcmp(pin_digest(session->salt, session->entered).data(), session->digest.data(),
                                        session->digest.size()) == 0;
    std::fill(session->entered.begin(), session->entered.end(), 0);
    session->entered.clear();
    ++session->attempts;
    session->failures = accepted ? 0 : session->failures + 1;
    session->ordering = shuffle_ordering(session->rng);
    if (session->failures >= options_.max_failures) {
        session->locked = true;
        return json_response(423, {{"schema_version", kSchemaVersion},
                                   {"accepted", false},
                                   {"locked", true},
                                   {"attempts", session->attempts},
                                   {"error", "session locked after too many failed attempts"}});
    }
    return json_response(200, {{"schema_version", kSchemaVersion},
                               {"accepted", accepted},
                               {"locked", false},
                               {"attempts", session->attempts},
                               {"failures_remaining", options_.max_failures - session->failures},
                               {"keypad", keypad_view(*session)}});
}

json Service::openapi() {
    const json error_ref = {{"$ref", "#/components/schemas/Error"}};
    const auto responses = [&](json ok) {
        ok["400"] = {{"description", "validation error"}, {"content", {{"application/json", {{"schema", error_ref}}}}}};
        ok["422"] = {{"description", "domain error"}, {"content", {{"application/json", {{"schema", error_ref}}}}}};
        return ok;
    };
    const json position = {{"type", "object"},
                           {"description", "{r, theta, phi} with angles in radians or \"<n>deg\", or {x, y, z} in inches"}};
    const json keypad = {{"type", "object"},
                         {"properties",
                          {{"device", {{"type", "string"}}},
                           {"category", {{"type", "string"}, {"enum", {"c1", "c2", "c3", "c4"}}}},
                           {"sigma_lf", {{"type", "number"}}},
                           {"sigma_hf", {{"type", "number"}}},
                           {"seed", {{"type", "integer"}}},
                           {"width", {{"type", "integer"}}}}}};
    json doc = {{"openapi", "3.0.3"},
                {"info", {{"title", "illusionpad"}, {"version", std::to_string(kSchemaVersion)}}},
                {"components",
                 {{"schemas",
                   {{"Error", {{"type", "object"}, {"properties", {{"error", {{"type", "string"}}}}}}},
                    {"Position", position},
                    {"Keypad", keypad}}}}}};
    json& paths = doc["paths"];
    paths["/hybrid"]["post"] = {
        {"summary", "Generate a hybrid keypad bundle (Accept: image/png returns the hybrid PNG)"},
        {"requestBody", {{"content", {{"application/json", {{"schema", {{"$ref", "#/components/schemas/Keypad"}}}}}}}}},
        {"responses", responses({{"200", {{"description", "metadata, layout and base64 PNGs"}}}})}};
    paths["/simulate"]["post"] = {
        {"summary", "Perceived keypad and visibility verdict from a viewing position"},
        {"requestBody",
         {{"content",
           {{"application/json",
             {{"schema",
               {{"type", "object"},
                {"required", {"position"}},
                {"properties",
                 {{"keypad", {{"$ref", "#/components/schemas/Keypad"}}},
                  {"png", {{"type", "string"}, {"format", "byte"}}},
                  {"device", {{"type", "string"}}},
                  {"position", {{"$ref", "#/components/schemas/Position"}}},
                  {"v_th", {{"type", "number"}}},
                  {"width", {{"type", "integer"}}}}}}}}}}}}},
        {"responses", responses({{"200", {{"description", "verdict, perception parameters and perceived PNG"}}}})}};
    paths["/session"]["post"] = {
        {"summary", "Start a demo PIN session"},
        {"requestBody",
         {{"content",
           {{"application/json",
             {{"schema",
               {{"type", "object"},
                {"required", {"pin"}},
                {"properties",
                 {{"pin", {{"type", "string"}}},
                  {"device", {{"type", "string"}}},
                  {"category", {{"type", "string"}}},
                  {"shuffle_mode", {{"type", "string"}, {"enum", {"per_attempt", "per_digit"}}}},
                  {"seed", {{"type", "integer"}}}}}}}}}}}}},
        {"responses", responses({{"201", {{"description", "session id and the first keypad"}}}})}};
    const json id_param = {{"name", "id"}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}};
    paths["/session/{id}/press"]["post"] = {
        {"summary", "Record a button index"},
        {"parameters", {id_param}},
        {"requestBody",
         {{"content",
           {{"application/json",
             {{"schema", {{"type", "object"}, {"properties", {{"button", {{"type", "integer"}}}}}}}}}}}}},
        {"responses",
         responses({{"200", {{"description", "press count; a new keypad in per_digit mode"}}},
                    {"404", {{"description", "unknown or expired session"}}},
                    {"423", {{"description", "locked"}}}})}};
    paths["/session/{id}/submit"]["post"] = {
        {"summary", "Check the entered PIN and re-shuffle"},
        {"parameters", {id_param}},
        {"responses",
         responses({{"200", {{"description", "accepted flag and the next keypad"}}},
                    {"404", {{"description", "unknown or expired session"}}},
                    {"423", {{"description", "locked after too many failures"}}}})}};
    paths["/spec"]["get"] = {{"summary", "This document"}, {"responses", {{"200", {{"description", "OpenAPI"}}}}}};
    paths["/devices"]["get"] = {{"summary", "Built-in device profiles"},
                                {"responses", {{"200", {{"description", "device names"}}}}}};
    return doc;
}

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
    const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        const ServiceResponse out =
            service.handle({req.method, req.path, req.body, req.get_header_value("Accept")});
        res.status = out.status;
        res.set_content(out.body, out.content_type);
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    auto& server = impl_->server;
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, Accept");
        res.status = 204;
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace illusionpad
