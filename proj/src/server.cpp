#include "httplib.h"

#include "cnr/errors.hpp"
#include "cnr/session.hpp"

namespace cnr {

struct HttpServer::Impl {
    SessionManager& sessions;
    ServeOptions opt;
    httplib::Server server;
    int port = -1;

    Impl(SessionManager& s, ServeOptions o) : sessions(s), opt(std::move(o)) { routes(); }

    static void reply(httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    static std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
        if (req.body.empty()) return json::object();
        try {
            return json::parse(req.body);
        } catch (const json::exception& e) {
            reply(res, {400, {{"error", std::string("malformed JSON: ") + e.what()}}});
            return std::nullopt;
        }
    }

    void routes() {
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            reply(res, {500, {{"error", what}}});
        });
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto body = parse_body(req, res)) reply(res, sessions.create(*body));
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, sessions.get(req.matches[1]));
        });
        server.Post(R"(/sessions/([^/]+)/move)", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto body = parse_body(req, res)) reply(res, sessions.move(req.matches[1], *body));
        });
        server.Post(R"(/sessions/([^/]+)/auto)", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, sessions.advance(req.matches[1]));
        });
        server.Get(R"(/sessions/([^/]+)/belief)", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, sessions.belief(req.matches[1]));
        });
        server.Get(R"(/sessions/([^/]+)/replay)", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, sessions.replay(req.matches[1]));
        });
        if (!opt.static_dir.empty() && !server.set_mount_point("/", opt.static_dir))
            throw InputError("static dir not found: " + opt.static_dir);
    }
};

HttpServer::HttpServer(SessionManager& sessions, const ServeOptions& opt)
    : impl_(std::make_unique<Impl>(sessions, opt)) {}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
    if (impl_->opt.port == 0) {
        impl_->port = impl_->server.bind_to_any_port(impl_->opt.bind);
    } else if (impl_->server.bind_to_port(impl_->opt.bind, impl_->opt.port)) {
        impl_->port = impl_->opt.port;
    }
    if (impl_->port < 0) throw InputError("cannot bind " + impl_->opt.bind + ":" + std::to_string(impl_->opt.port));
    return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace cnr
