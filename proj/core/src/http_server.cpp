#include "carebot/http_server.hpp"

#include "wire_json.hpp"

#include <httplib.h>

namespace carebot::http {

namespace {

using detail::json;

constexpr const char* json_type = "application/json";

void send_error(httplib::Response& res, const Error& e) {
    res.status = status_for(e.code());
    res.set_content(error_body(e), json_type);
}

// Runs a handler, turning exceptions into error documents.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const json::exception& e) {
            send_error(res, Error(ErrorCode::decode_error, e.what()));
        } catch (const std::exception& e) {
            send_error(res, Error(ErrorCode::invariant_violation, e.what()));
        }
    };
}

json body_object(const httplib::Request& req) {
    auto body = detail::parse_json(req.body);
    if (!body.is_object()) {
        throw Error(ErrorCode::decode_error, "request body must be a JSON object");
    }
    return body;
}

} // namespace

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found:
    case ErrorCode::unknown_user:
    case ErrorCode::unknown_session:
    case ErrorCode::unknown_section:
    case ErrorCode::unknown_item:
        return 404;
    case ErrorCode::malformed_event:
    case ErrorCode::not_eligible:
    case ErrorCode::unknown_value_tag:
    case ErrorCode::decode_error:
    case ErrorCode::invalid_answer_range:
    case ErrorCode::wrong_length:
    case ErrorCode::missing_dimension:
    case ErrorCode::validation_error:
        return 400;
    case ErrorCode::store_failure:
        return 503;
    default:
        return 500;
    }
}

std::string error_body(const Error& error) {
    return detail::dump(
        {{"error", std::string(to_string(error.code()))}, {"message", error.what()}, {"subject", error.subject()}});
}

struct Server::Impl {
    gateway::Service* service = nullptr;
    httplib::Server server;
};

Server::Server(gateway::Service& service, ServerOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->service = &service;
    auto& srv = impl_->server;
    auto* svc = &service;

    srv.Get("/v1/health", guarded([svc](const httplib::Request&, httplib::Response& res) {
                res.set_content(detail::dump({{"status", "ok"}, {"sessions", svc->session_ids().size()}}), json_type);
            }));

    srv.Post("/v1/sessions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                 const auto handle = svc->create_session(gateway::decode_session_request(req.body));
                 res.status = 201;
                 res.set_content(handle.to_json(), json_type);
             }));

    srv.Get(R"(/v1/sessions/([^/]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                const auto view = svc->get_state(req.matches[1]);
                res.set_content(detail::dump({{"summary", json::parse(view.summary)},
                                              {"response", json::parse(view.response)}}),
                                json_type);
            }));

    srv.Get(R"(/v1/sessions/([^/]+)/response)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                res.set_content(svc->get_state(req.matches[1]).response, json_type);
            }));

    srv.Post(R"(/v1/sessions/([^/]+)/events)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(svc->post_event_json(req.matches[1], req.body), json_type);
             }));

    srv.Post(R"(/v1/sessions/([^/]+)/instruments/([^/]+))",
             guarded([svc](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(svc->submit_instrument(req.matches[1], req.matches[2], req.body), json_type);
             }));

    srv.Post(R"(/v1/sessions/([^/]+)/feedback)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                 const auto body = body_object(req);
                 const auto item = body.find("item_id");
                 const auto helpful = body.find("helpful");
                 if (item == body.end() || !item->is_string() || helpful == body.end() || !helpful->is_boolean()) {
                     throw Error(ErrorCode::validation_error, "feedback needs a string item_id and a boolean helpful");
                 }
                 const auto tally = svc->submit_feedback(req.matches[1], item->get<std::string>(), helpful->get<bool>());
                 res.set_content(detail::dump({{"item_id", tally.item_id},
                                               {"helpful", tally.helpful_count},
                                               {"not_helpful", tally.not_helpful_count}}),
                                 json_type);
             }));

    srv.Get(R"(/v1/sessions/([^/]+)/notifications)",
            guarded([svc, keepalive = options.keepalive](const httplib::Request& req, httplib::Response& res) {
                auto sub = svc->subscribe(req.matches[1]);
                res.set_header("Cache-Control", "no-cache");
                res.set_chunked_content_provider(
                    "text/event-stream",
                    [sub, keepalive](std::size_t, httplib::DataSink& sink) {
                        const auto doc = sub->next(keepalive);
                        if (sub->closed() || !sink.is_writable()) {
                            return false;
                        }
                        const std::string chunk =
                            doc ? "event: notification\ndata: " + *doc + "\n\n" : std::string(": keep-alive\n\n");
                        return sink.write(chunk.data(), chunk.size());
                    },
                    [sub](bool) { sub->close(); });
            }));

    srv.Get(R"(/v1/content/([^/]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                res.set_content(svc->section(req.matches[1].str()), json_type);
            }));

    srv.Get("/v1/feedback", guarded([svc](const httplib::Request&, httplib::Response& res) {
                res.set_content(svc->feedback_report(), json_type);
            }));
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    if (port == 0) {
        const int bound = srv.bind_to_any_port(host);
        if (bound < 0) {
            throw Error(ErrorCode::load_error, "cannot bind " + host);
        }
        return bound;
    }
    if (!srv.bind_to_port(host, port)) {
        throw Error(ErrorCode::load_error, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void Server::run() { impl_->server.listen_after_bind(); }

void Server::stop() {
    impl_->service->notifications().close_all();
    impl_->server.stop();
}

bool Server::running() const { return impl_->server.is_running(); }

void Server::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace carebot::http
