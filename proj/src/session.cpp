#include "cnr/session.hpp"

#include <algorithm>
#include <set>

#include "cnr/errors.hpp"

namespace cnr {

struct SessionManager::Session {
    std::mutex mu;
    std::string id;
    Scenario scenario;
    SolveInput input;
    Team human = Team::Cops;
    GameGraph graph;
    Solution sol;
    std::unique_ptr<Policy> controller;  // perfect-information controller
    std::size_t rr = 0;

    // Zone-of-interest controller for the system team.
    std::optional<KnowledgeGame> kg;
    Solution ksol;
    StateId kv = 0;
    std::size_t krr = 0;

    std::optional<BeliefState> human_belief;
    GameState state;
    std::vector<JointMove> history;

    const Arena& arena() const { return input.arena; }
    const GameConfig& cfg() const { return input.config; }
    Team controller_team() const { return other(human); }
    bool knowledge_controller() const { return kg.has_value(); }

    std::string status() const {
        if (state.violation) return "violation";
        if (is_capture(arena(), state)) return "capture";
        if (legal_joint_moves(arena(), cfg(), state).empty()) return "stuck";
        return "playing";
    }

    void observe_step(Team moved) {
        if (!human_belief) return;
        human_belief = update_belief(arena(), cfg(), *human_belief, observe(arena(), state, human, cfg().info.obs_radius),
                                     moved);
    }

    /// Applies a legal move and keeps every tracker in step.
    void apply(const JointMove& m) {
        const Team sys = cfg().system_team;
        const int radius = cfg().info.obs_radius;
        const Sighting before = kg ? sight(arena(), state.team(sys), state.team(other(sys)), radius) : Sighting{};
        const auto v = graph.find(state);
        if (!v) throw ContractViolation("session state fell outside the game graph");
        rr = sol.strategy.advance(*v, rr);
        state = apply_joint_move(arena(), cfg(), state, m);
        history.push_back(m);
        if (kg && !kg->is_sink(kv)) {
            if (m.team == sys) {
                for (StateId t : kg->topo.successors(kv)) {
                    if (kg->move(kv, t) == m) {
                        krr = ksol.strategy.advance(kv, krr);
                        kv = t;
                        break;
                    }
                }
            } else if (!is_capture(arena(), state)) {
                const Sighting after = sight(arena(), state.team(sys), state.team(other(sys)), radius);
                if (auto next = kg->env_successor(kv, before, after)) {
                    krr = ksol.strategy.advance(kv, krr);
                    kv = *next;
                }
            }
        }
        if (!state.violation && !is_capture(arena(), state)) observe_step(m.team);
    }

    std::optional<JointMove> controller_move() {
        if (kg && controller_team() == cfg().system_team && !kg->is_sink(kv)) {
            std::optional<StateId> t = ksol.strategy.choose(kv, krr);
            if (!t) {
                const auto succ = kg->topo.successors(kv);
                if (succ.empty()) return std::nullopt;
                t = succ.front();
            }
            return kg->move(kv, *t);
        }
        return controller->choose(arena(), cfg(), state, rr);
    }
};

namespace {

ApiResponse error(int status, const std::string& msg, json extra = json::object()) {
    extra["error"] = msg;
    return {status, extra};
}

json obligations_json(const Arena& arena, const GameState& s) {
    json out = json::array();
    const int zones = arena.zone_count();
    for (std::size_t r = 0; r < s.monitor.size(); ++r) {
        const ObligationState& o = s.monitor[r];
        json b = {{"robber", r}, {"inside", o.inside}, {"lastZone", o.last_zone}};
        std::optional<int> owed = o.owed_zone(zones);
        if (!owed && o.inside > 0 && zones == 2) owed = 3 - o.last_zone;
        b["owedZone"] = owed ? json(*owed) : json(nullptr);
        // Robber turns left before the robber must be out of the zone.
        b["countdown"] = o.inside > 0 ? json(3 - o.inside) : json(nullptr);
        out.push_back(b);
    }
    return out;
}

}  // namespace

SessionManager::SessionManager() = default;
SessionManager::~SessionManager() = default;

std::size_t SessionManager::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

namespace {

json session_view(const std::string& id, const Scenario& sc, const SolveInput& in, Team human, const GameState& s,
                  const std::string& status, const Verdict& verdict, std::size_t steps) {
    json j;
    j["id"] = id;
    j["human"] = team_key(human);
    j["controller"] = team_key(other(human));
    j["systemTeam"] = team_key(in.config.system_team);
    j["variant"] = to_string(in.config.variant);
    j["moveRule"] = to_string(in.config.move_rule);
    j["infoMode"] = info_mode_to_json(in.config.info);
    j["arena"] = arena_to_json(in.arena, {}, {});
    j["arena"].erase("cops");
    j["arena"].erase("robbers");
    if (in.window) j["windowOrigin"] = to_json(in.window->origin);
    j["name"] = sc.name;
    j["state"] = state_to_json(s);
    j["status"] = status;
    j["step"] = steps;
    j["verdict"] = verdict_to_json(verdict);
    j["obligations"] = obligations_json(in.arena, s);
    const bool playing = status == "playing";
    j["turn"] = !playing ? json(nullptr) : json(s.mover == human ? "human" : "controller");
    json legal = json::array();
    if (playing && s.mover == human)
        for (const JointMove& m : legal_joint_moves(in.arena, in.config, s)) legal.push_back(coords_to_json(m.destinations));
    j["legalMoves"] = legal;
    if (status == "capture") j["outcome"] = "RobberCaught";
    if (status == "violation") {
        j["outcome"] = "Violation";
        j["clause"] = to_string(*s.violation);
    }
    if (status == "stuck") j["outcome"] = team_key(s.mover) + " stuck";
    return j;
}

}  // namespace

ApiResponse SessionManager::create(const json& body) {
    if (!body.is_object()) return error(400, "body must be a JSON object");
    auto session = std::make_shared<Session>();
    try {
        if (!body.contains("scenario")) throw InputError("missing field 'scenario'");
        if (!body.contains("human") || !body["human"].is_string()) throw InputError("missing field 'human'");
        session->scenario = scenario_from_json(body["scenario"]);
        session->human = team_from_string(body["human"].get<std::string>());
        session->input = solve_input(session->scenario);
    } catch (const InputError& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(400, e.what());
    }

    Session& s = *session;
    try {
        s.graph = build_game_graph(s.arena(), s.cfg(), s.input.initial);
        s.graph.window_relative = s.input.window.has_value();
        s.sol = solve(s.graph);
        const bool human_is_system = s.human == s.cfg().system_team;
        if (human_is_system) {
            s.controller = optimal_adversary(s.graph, s.sol);
        } else {
            s.controller = strategy_player(s.graph, s.sol);
            if (!s.cfg().info.perfect()) {
                s.kg = build_knowledge_game(s.arena(), {s.cfg(), s.cfg().info.obs_radius, s.cfg().info.memory},
                                            s.input.initial);
                s.ksol = solve(*s.kg);
                s.kv = s.kg->initial;
            }
        }
    } catch (const CapExceeded& e) {
        return error(422, e.what(), {{"lowerBound", e.lower_bound()}});
    } catch (const InputError& e) {
        return error(400, e.what());
    }
    s.state = s.input.initial;
    if (!s.cfg().info.perfect()) {
        const auto obs = observe(s.arena(), s.state, s.human, s.cfg().info.obs_radius);
        s.human_belief = initial_belief(s.arena(), s.cfg(), s.state, s.human, obs);
    }

    {
        std::lock_guard lock(mu_);
        s.id = std::to_string(next_id_++);
        sessions_[s.id] = session;
    }
    ApiResponse r = get(s.id);
    r.status = 201;
    return r;
}

ApiResponse SessionManager::get(const std::string& id) {
    auto session = find(id);
    if (!session) return error(404, "unknown session " + id);
    std::lock_guard lock(session->mu);
    const Session& s = *session;
    const Verdict& v = s.kg ? s.ksol.verdict : s.sol.verdict;
    return {200, session_view(s.id, s.scenario, s.input, s.human, s.state, s.status(), v, s.history.size())};
}

ApiResponse SessionManager::move(const std::string& id, const json& body) {
    auto session = find(id);
    if (!session) return error(404, "unknown session " + id);
    std::unique_lock lock(session->mu);
    Session& s = *session;
    if (s.status() != "playing") return error(409, "the game is over");
    if (s.state.mover != s.human) return error(409, "not the human's turn");
    JointMove m;
    try {
        if (!body.is_object()) throw InputError("body must be a JSON object");
        m = move_from_json(body, s.human);
    } catch (const InputError& e) {
        return error(400, e.what());
    }
    if (auto clause = diagnose_move(s.arena(), s.cfg(), s.state, m)) {
        const std::string name = clause_name(*clause, m.team);
        return error(422, name, {{"clause", name}});
    }
    s.apply(m);
    lock.unlock();
    return get(id);
}

ApiResponse SessionManager::advance(const std::string& id) {
    auto session = find(id);
    if (!session) return error(404, "unknown session " + id);
    std::unique_lock lock(session->mu);
    Session& s = *session;
    if (s.status() != "playing") return error(409, "the game is over");
    if (s.state.mover == s.human) return error(409, "it is the human's turn");
    const auto m = s.controller_move();
    if (!m) return error(409, "controller has no move");
    s.apply(*m);
    lock.unlock();
    ApiResponse r = get(id);
    r.body["controllerMove"] = move_to_json(*m);
    return r;
}

ApiResponse SessionManager::belief(const std::string& id) {
    auto session = find(id);
    if (!session) return error(404, "unknown session " + id);
    std::lock_guard lock(session->mu);
    const Session& s = *session;
    json j = {{"id", s.id}, {"perfect", s.cfg().info.perfect()}};
    auto cells_of = [](const std::vector<Config>& configs) {
        std::map<Coord, int> count;
        for (const Config& c : configs) {
            std::set<Coord> seen(c.begin(), c.end());
            for (Coord x : seen) ++count[x];
        }
        json out = json::array();
        for (auto [c, n] : count) out.push_back({{"cell", to_json(c)}, {"configs", n}});
        return out;
    };
    if (s.human_belief) {
        const BeliefState& b = *s.human_belief;
        std::vector<Config> configs(b.opponents.begin(), b.opponents.end());
        json walls = json::array();
        for (Coord w : b.known_walls) walls.push_back(to_json(w));
        j["human"] = {{"observer", team_key(b.observer)},
                      {"configurations", configs.size()},
                      {"cells", cells_of(configs)},
                      {"knownWalls", walls}};
    }
    if (s.kg && !s.kg->is_sink(s.kv)) {
        const auto& configs = s.kg->belief(s.kg->vertex(s.kv).belief);
        j["controller"] = {{"observer", team_key(s.cfg().system_team)},
                           {"configurations", configs.size()},
                           {"cells", cells_of(configs)}};
    }
    return {200, j};
}

ApiResponse SessionManager::replay(const std::string& id) {
    auto session = find(id);
    if (!session) return error(404, "unknown session " + id);
    std::lock_guard lock(session->mu);
    const Session& s = *session;
    GameState g = s.input.initial;
    for (const JointMove& m : s.history) g = apply_joint_move(s.arena(), s.cfg(), g, m);
    return {200, {{"consistent", g == s.state}, {"steps", s.history.size()}}};
}

}  // namespace cnr
