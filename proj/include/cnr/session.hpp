#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "cnr/io.hpp"

namespace cnr {

struct ApiResponse {
    int status = 200;
    json body;
};

/// In-memory play sessions: a human plays one team, the server plays the
/// other. Transport independent; serve() maps these calls onto HTTP routes.
///
/// When the human plays the environment team the server plays the solved
/// strategy (the knowledge-game strategy under zone-of-interest info). When
/// the human plays the system team the server plays the optimal adversary.
class SessionManager {
public:
    SessionManager();
    ~SessionManager();

    /// Body {scenario, human: "cops" | "robbers"}. 201 with the session view.
    ApiResponse create(const json& body);
    /// Session view: state, turn, legal moves for the human, status.
    ApiResponse get(const std::string& id);
    /// Body {destinations: [[x,y], ...]}. 409 out of turn, 422 with the
    /// violated clause for illegal moves.
    ApiResponse move(const std::string& id, const json& body);
    /// Plays one controller move. 409 when it is the human's turn.
    ApiResponse advance(const std::string& id);
    /// Possible opponent cells for the human team and the controller.
    ApiResponse belief(const std::string& id);
    /// Replays the history from the initial state and compares.
    ApiResponse replay(const std::string& id);

    std::size_t size() const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;

    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

struct ServeOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

class HttpServer {
public:
    explicit HttpServer(SessionManager& sessions, const ServeOptions& opt = {});
    ~HttpServer();

    /// Binds; returns the bound port (useful with port 0). Throws InputError
    /// when binding fails.
    int bind();
    /// Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cnr
