#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include <json.hpp>

#include "illusionpad/keypad.hpp"

namespace illusionpad {

struct ServiceRequest {
    std::string method;
    std::string path;
    std::string body;
    std::string accept;
};

struct ServiceResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceOptions {
    int working_width = 360;
    std::chrono::seconds session_ttl{15 * 60};
    int max_failures = 5;
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Routes requests for the HTTP facade. Transport-free so it can be driven
/// directly; serve() binds it to a socket.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();

    ServiceResponse handle(const ServiceRequest& request);

    static nlohmann::json openapi();

private:
    struct Session;

    ServiceResponse post_hybrid(const nlohmann::json& body, bool raw_png);
    ServiceResponse post_simulate(const nlohmann::json& body, bool raw_png);
    ServiceResponse post_session(const nlohmann::json& body);
    ServiceResponse post_press(const std::string& id, const nlohmann::json& body);
    ServiceResponse post_submit(const std::string& id);

    std::shared_ptr<Session> find_session(const std::string& id);
    nlohmann::json keypad_view(const Session& session) const;

    ServiceOptions options_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::unique_ptr<std::counting_semaphore<>> compute_slots_;
};

/// Socket binding for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    /// Port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace illusionpad
