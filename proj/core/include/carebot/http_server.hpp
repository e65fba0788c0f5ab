#pragma once

#include "carebot/error.hpp"
#include "carebot/gateway.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace carebot::http {

// HTTP status for an error code: 404 for unknown things, 400 for bad input,
// 503 when the store refuses a write, 500 otherwise.
int status_for(ErrorCode code);

// {"error": "<code>", "message": "...", "subject": "..."}
std::string error_body(const Error& error);

struct ServerOptions {
    // How often an idle notification stream sends a keep-alive comment.
    std::chrono::milliseconds keepalive{15000};
};

// JSON endpoints over a gateway service:
//   POST /v1/sessions                          create a session
//   GET  /v1/sessions/{id}                     state summary and last response
//   GET  /v1/sessions/{id}/response            last response document
//   POST /v1/sessions/{id}/events              post a user event
//   POST /v1/sessions/{id}/instruments/{kind}  score a questionnaire
//   POST /v1/sessions/{id}/feedback            rate a myth correction
//   GET  /v1/sessions/{id}/notifications       server-sent events
//   GET  /v1/content/{section}                 verified content section
//   GET  /v1/feedback                          feedback tallies
//   GET  /v1/health
class Server {
public:
    explicit Server(gateway::Service& service, ServerOptions options = {});
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds to `port` (0 picks a free one) and returns the bound port;
    // throws Error(load_error) when binding fails.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind().
    void run();
    void stop();
    bool running() const;
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace carebot::http
