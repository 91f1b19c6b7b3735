#include "cnr/belief.hpp"

#include <algorithm>
#include <deque>

#include "cnr/errors.hpp"

namespace cnr {

namespace {

bool within(const Arena& arena, const std::vector<Coord>& sources, Coord c, int radius) {
    for (Coord s : sources)
        if (arena.distance(s, c) <= radius) return true;
    return false;
}

bool coord_less(Coord a, Coord b) { return std::pair(a.y, a.x) < std::pair(b.y, b.x); }

Observation make_observation(const Arena& arena, const GameState& s, Team team, std::vector<Coord> sources,
                             int radius) {
    Observation o;
    o.observer = team;
    o.radius = radius;
    o.own = s.team(team);
    o.sources = std::move(sources);
    std::vector<Coord> seen;
    if (arena.finite()) {
        for (int i = 0; i < arena.cell_count(); ++i) {
            const Coord c = arena.coord(i);
            if (arena.cell_at(i).is_zone() || within(arena, o.sources, c, radius)) seen.push_back(c);
        }
    } else {
        for (Coord src : o.sources)
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -(radius - std::abs(dy)); dx <= radius - std::abs(dy); ++dx)
                    seen.push_back({src.x + dx, src.y + dy});
        std::sort(seen.begin(), seen.end(), coord_less);
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    }
    for (Coord c : seen) o.cells.push_back({c, arena.cell(c)});
    o.opponents = sight(arena, o.sources, s.team(other(team)), radius);
    return o;
}

GameState compose(Team observer, const std::vector<Coord>& own, const Config& opp, Team mover,
                  const std::vector<ObligationState>& monitor = {}) {
    GameState s;
    s.team(observer) = own;
    s.team(other(observer)) = opp;
    s.mover = mover;
    s.monitor = monitor;
    return s;
}

bool agrees(const Arena& arena, const Observation& obs, const Config& c) {
    return sight(arena, obs.sources, c, obs.radius) == obs.opponents;
}

std::set<Coord> merge_walls(const BeliefState& b, const Observation& obs) {
    std::set<Coord> walls;
    if (b.map_memory) walls = b.known_walls;
    for (Coord w : obs.walls()) walls.insert(w);
    return walls;
}

}  // namespace

Sighting sight(const Arena& arena, const std::vector<Coord>& sources, const std::vector<Coord>& opponents,
               int radius) {
    Sighting out;
    for (std::size_t j = 0; j < opponents.size(); ++j)
        if (within(arena, sources, opponents[j], radius)) out.push_back({static_cast<int>(j), opponents[j]});
    return out;
}

bool Observation::sees(const Arena& arena, Coord c) const { return within(arena, sources, c, radius); }

std::vector<Coord> Observation::walls() const {
    std::vector<Coord> out;
    for (const auto& [c, k] : cells)
        if (k.is_wall()) out.push_back(c);
    return out;
}

Observation observe(const Arena& arena, const GameState& s, Team team, int radius) {
    return make_observation(arena, s, team, s.team(team), radius);
}

Observation observe_member(const Arena& arena, const GameState& s, Team team, int member, int radius,
                           std::optional<int> sharing_radius) {
    const auto& members = s.team(team);
    const Coord me = members.at(static_cast<std::size_t>(member));
    std::vector<Coord> sources{me};
    if (sharing_radius) {
        for (std::size_t i = 0; i < members.size(); ++i)
            if (static_cast<int>(i) != member && arena.distance(me, members[i]) <= *sharing_radius)
                sources.push_back(members[i]);
    }
    return make_observation(arena, s, team, std::move(sources), radius);
}

BeliefState initial_belief(const Arena&, const GameConfig& cfg, const GameState& s, Team observer,
                           const Observation& obs) {
    BeliefState b;
    b.observer = observer;
    b.own = s.team(observer);
    b.opponents.insert(s.team(other(observer)));
    b.memory = cfg.info.memory;
    b.map_memory = cfg.info.map_memory;
    for (Coord w : obs.walls()) b.known_walls.insert(w);
    return b;
}

std::set<Config> consistent_placements(const Arena& arena, const GameConfig& cfg, const Observation& obs,
                                       std::size_t cap) {
    if (!arena.finite()) throw ContractViolation("consistent_placements needs a finite arena");
    const Team opp = other(obs.observer);
    const int n = opp == Team::Cops ? cfg.cop_count : cfg.robber_count;
    Config pinned(static_cast<std::size_t>(n), Coord{-1, -1});
    for (const auto& [j, c] : obs.opponents) pinned[static_cast<std::size_t>(j)] = c;

    std::vector<Coord> free_cells;
    for (int i = 0; i < arena.cell_count(); ++i) {
        const Coord c = arena.coord(i);
        const CellKind k = arena.cell_at(i);
        if (k.is_wall() || (opp == Team::Cops && k.is_zone()) || obs.sees(arena, c)) continue;
        if (std::find(obs.own.begin(), obs.own.end(), c) != obs.own.end()) continue;
        free_cells.push_back(c);
    }

    std::set<Config> out;
    Config cur = pinned;
    auto rec = [&](auto&& self, std::size_t j) -> void {
        if (j == cur.size()) {
            out.insert(cur);
            if (out.size() > cap) throw CapExceeded("belief placements exceed the cap", out.size());
            return;
        }
        if (pinned[j].x != -1 || pinned[j].y != -1) {
            self(self, j + 1);
            return;
        }
        for (Coord c : free_cells) {
            if (std::find(cur.begin(), cur.end(), c) != cur.end()) continue;
            cur[j] = c;
            self(self, j + 1);
            cur[j] = Coord{-1, -1};
        }
    };
    rec(rec, 0);
    return out;
}

BeliefState update_belief(const Arena& arena, const GameConfig& cfg, const BeliefState& b, const Observation& obs,
                          Team moved) {
    BeliefState next = b;
    next.own = obs.own;
    next.known_walls = merge_walls(b, obs);
    next.opponents.clear();
    if (b.memory == Memory::Amnesic) {
        next.opponents = consistent_placements(arena, cfg, obs);
    } else if (moved == b.observer) {
        for (const Config& c : b.opponents) {
            const GameState s = compose(b.observer, obs.own, c, other(b.observer));
            if (is_capture(arena, s) || check_state(arena, s)) continue;
            if (agrees(arena, obs, c)) next.opponents.insert(c);
        }
    } else {
        const Team opp = other(b.observer);
        for (const Config& c : b.opponents) {
            GameState s = compose(b.observer, b.own, c, opp);
            s.monitor.assign(static_cast<std::size_t>(cfg.monitor_count()), {});
            for (const JointMove& m : legal_joint_moves(arena, cfg, s)) {
                GameState t = s;
                t.team(opp) = m.destinations;
                if (is_capture(arena, t)) continue;
                if (agrees(arena, obs, m.destinations)) next.opponents.insert(m.destinations);
            }
        }
    }
    if (next.opponents.empty()) throw ContractViolation("belief became empty: the true configuration was filtered out");
    return next;
}

// ---------------------------------------------------------------------------

class KnowledgeBuilder {
public:
    KnowledgeBuilder(const Arena& arena, const KnowledgeSpec& spec, KnowledgeGame& g)
        : arena_(arena), spec_(spec), cfg_(spec.base), g_(g), sys_(cfg_.system_team), env_(other(sys_)) {}

    void run(const GameState& init) {
        // Sinks first: 0 capture, 1 violation.
        g_.vertices_.resize(2);
        std::uint32_t b0;
        if (spec_.memory == Memory::Persistent) {
            b0 = intern_belief({init.team(env_)});
        } else {
            const auto all = consistent_placements(arena_, cfg_, observe(arena_, init, sys_, spec_.obs_radius));
            b0 = intern_belief(std::vector<Config>(all.begin(), all.end()));
        }
        g_.initial = intern({init.team(sys_), init.monitor, init.mover, b0});
        for (StateId v = 0; v < g_.vertices_.size(); ++v) expand(v);
        g_.topo.finalize();
        g_.capture = {KnowledgeGame::kCaptureSink};
        g_.violation = {KnowledgeGame::kViolationSink};
        add_acceptance();
    }

private:
    StateId intern(KnowledgeGame::Vertex v) {
        auto [it, fresh] = index_.try_emplace(v, static_cast<StateId>(g_.vertices_.size()));
        if (fresh) {
            if (g_.vertices_.size() >= cfg_.state_cap)
                throw CapExceeded("knowledge game exceeds the state cap", g_.vertices_.size() + 1);
            g_.vertices_.push_back(std::move(v));
        }
        return it->second;
    }

    std::uint32_t intern_belief(std::vector<Config> b) {
        std::sort(b.begin(), b.end());
        auto [it, fresh] = beliefs_.try_emplace(b, static_cast<std::uint32_t>(g_.beliefs_.size()));
        if (fresh) {
            if (g_.beliefs_.size() >= spec_.belief_cap)
                throw CapExceeded("knowledge game exceeds the belief cap", g_.beliefs_.size() + 1);
            g_.beliefs_.push_back(std::move(b));
        }
        return it->second;
    }

    void edge(StateId to, const JointMove& m) {
        const auto begin = g_.topo.succ.begin() + g_.topo.succ_offsets.back();
        if (std::find(begin, g_.topo.succ.end(), to) != g_.topo.succ.end()) return;
        g_.topo.add_edge(to);
        g_.edge_moves_.push_back(m);
    }

    void expand(StateId v) {
        if (v < 2) {
            g_.topo.add_vertex(Player::Environment, true);
            g_.topo.end_vertex();
            return;
        }
        const KnowledgeGame::Vertex kv = g_.vertices_[v];
        g_.topo.add_vertex(cfg_.player_of(kv.mover), false);
        if (kv.mover == sys_) expand_system(kv);
        else expand_environment(v, kv);
        g_.topo.end_vertex();
    }

    void expand_system(const KnowledgeGame::Vertex& kv) {
        const std::vector<Config> belief = g_.beliefs_[kv.belief];  // copy: interning may reallocate
        const GameState first = compose(sys_, kv.own, belief.front(), sys_, kv.monitor);
        for (const JointMove& m : legal_joint_moves(arena_, cfg_, first)) {
            bool everywhere = true;
            for (std::size_t i = 1; i < belief.size() && everywhere; ++i)
                everywhere = !diagnose_move(arena_, cfg_, compose(sys_, kv.own, belief[i], sys_, kv.monitor), m);
            if (!everywhere) continue;
            const GameState next = apply_joint_move(arena_, cfg_, first, m);
            if (next.violation) {
                edge(KnowledgeGame::kViolationSink, m);
                continue;
            }
            std::vector<Config> pre;
            for (const Config& c : belief)
                if (!is_capture(arena_, compose(sys_, m.destinations, c, env_))) pre.push_back(c);
            if (pre.empty()) {
                edge(KnowledgeGame::kCaptureSink, m);
                continue;
            }
            edge(intern({m.destinations, next.monitor, env_, intern_belief(std::move(pre))}), m);
        }
    }

    void expand_environment(StateId v, const KnowledgeGame::Vertex& kv) {
        const std::vector<Config> belief = g_.beliefs_[kv.belief];  // copy: interning may reallocate
        std::map<std::pair<Sighting, Sighting>, std::set<Config>> groups;
        bool capture = false;
        for (const Config& c : belief) {
            GameState s = compose(sys_, kv.own, c, env_, kv.monitor);
            const Sighting o1 = sight(arena_, kv.own, c, spec_.obs_radius);
            for (const JointMove& m : legal_joint_moves(arena_, cfg_, s)) {
                GameState t = s;
                t.team(env_) = m.destinations;
                if (is_capture(arena_, t)) {
                    capture = true;
                    continue;
                }
                groups[{o1, sight(arena_, kv.own, m.destinations, spec_.obs_radius)}].insert(m.destinations);
            }
        }
        if (capture) edge(KnowledgeGame::kCaptureSink, {});
        for (auto& [key, configs] : groups) {
            std::vector<Config> next;
            if (spec_.memory == Memory::Persistent) {
                next.assign(configs.begin(), configs.end());
            } else {
                const GameState t = compose(sys_, kv.own, *configs.begin(), sys_, kv.monitor);
                const auto all = consistent_placements(arena_, cfg_, observe(arena_, t, sys_, spec_.obs_radius));
                next.assign(all.begin(), all.end());
            }
            const StateId to = intern({kv.own, kv.monitor, sys_, intern_belief(std::move(next))});
            g_.env_edges_[{v, key}] = to;
            edge(to, {});
        }
    }

    void add_acceptance() {
        if (!cfg_.monitored()) return;
        const int zones = arena_.zone_count();
        const bool team = cfg_.obligations == ObligationScope::TeamGlobal;
        const int groups = team ? 1 : cfg_.robber_count;
        for (int r = 0; r < groups; ++r) {
            for (int k = 1; k <= zones; ++k) {
                AcceptanceSet set;
                set.name = "SZ" + std::to_string(k) + "Visit_" + (team ? std::string("team") : "r" + std::to_string(r));
                for (StateId s = 2; s < g_.size(); ++s) {
                    const auto& own = g_.vertices_[s].own;
                    bool in = false;
                    for (int q = 0; q < cfg_.robber_count; ++q)
                        if (team || q == r) in |= arena_.cell(own[static_cast<std::size_t>(q)]).zone == k;
                    if (in) set.members.push_back(s);
                }
                g_.acceptance.push_back(std::move(set));
            }
        }
    }

    const Arena& arena_;
    const KnowledgeSpec& spec_;
    const GameConfig& cfg_;
    KnowledgeGame& g_;
    Team sys_;
    Team env_;
    std::map<KnowledgeGame::Vertex, StateId> index_;
    std::map<std::vector<Config>, std::uint32_t> beliefs_;
};

JointMove KnowledgeGame::move(StateId from, StateId to) const {
    const auto succ = topo.successors(from);
    for (std::size_t i = 0; i < succ.size(); ++i)
        if (succ[i] == to) return edge_moves_[topo.succ_offsets[from] + i];
    throw ContractViolation("no edge between the given knowledge vertices");
}

std::optional<StateId> KnowledgeGame::env_successor(StateId v, const Sighting& after_own,
                                                    const Sighting& after_env) const {
    auto it = env_edges_.find({v, {after_own, after_env}});
    if (it == env_edges_.end()) return std::nullopt;
    return it->second;
}

KnowledgeGame build_knowledge_game(const Arena& arena, const KnowledgeSpec& spec, const GameState& init) {
    spec.base.validate();
    if (!arena.finite()) throw ContractViolation("knowledge games need a finite arena");
    if (spec.obs_radius < 1) throw InputError("obsRadius must be at least 1");
    validate_starts(arena, init.cops, init.robbers);
    KnowledgeGame g;
    g.arena_ = &arena;
    g.radius_ = spec.obs_radius;
    g.config = spec.base;
    g.config.info.kind = InfoMode::Kind::ZoneOfInterest;
    g.config.info.obs_radius = spec.obs_radius;
    g.config.info.memory = spec.memory;
    KnowledgeBuilder(arena, spec, g).run(init);
    return g;
}

KnowledgePlayout run_knowledge_playout(const KnowledgeGame& kg, const Solution& sol, const GameState& init,
                                       Policy& adversary, std::size_t max_steps) {
    const Arena& arena = kg.arena();
    const GameConfig& cfg = kg.config;
    const Team sys = cfg.system_team;
    const Team env = other(sys);
    const int radius = kg.obs_radius();
    KnowledgePlayout out;
    Playout& play = out.play;
    play.zone_visits.assign(static_cast<std::size_t>(cfg.robber_count),
                            std::vector<std::size_t>(static_cast<std::size_t>(std::max(arena.zone_count(), 2)), 0));
    play.trace.states.push_back(init);
    StateId kv = kg.initial;
    std::size_t rr = 0;

    auto push = [&](const JointMove& m) -> bool {
        const GameState& s = play.trace.states.back();
        if (auto c = diagnose_move(arena, cfg, s, m))
            throw IllegalMove(*c, m.team, "knowledge playout step " + std::to_string(play.steps + 1));
        play.trace.states.push_back(apply_joint_move(arena, cfg, s, m));
        play.moves.push_back(m);
        ++play.steps;
        const GameState& t = play.trace.states.back();
        if (t.violation) {
            play.outcome = Outcome::Violation;
            return false;
        }
        if (is_capture(arena, t)) {
            ++play.captures;
            play.outcome = Outcome::Capture;
            return false;
        }
        return true;
    };

    while (play.steps < max_steps) {
        const GameState s = play.trace.states.back();
        if (s.mover == sys) {
            out.beliefs.push_back(kg.belief(kg.vertex(kv).belief));
            out.truth.push_back(s.team(env));
            std::optional<StateId> t = sol.strategy.choose(kv, rr);
            if (!t) {
                const auto succ = kg.topo.successors(kv);
                if (succ.empty()) {
                    play.outcome = Outcome::SystemStuck;
                    return out;
                }
                t = succ.front();
            }
            const JointMove m = kg.move(kv, *t);
            rr = sol.strategy.advance(kv, rr);
            kv = *t;
            if (!push(m)) return out;
            if (kg.is_sink(kv)) throw ContractViolation("knowledge game ended but the real play did not");
        } else {
            const Sighting o1 = sight(arena, s.team(sys), s.team(env), radius);
            const auto m = adversary.choose(arena, cfg, s, rr);
            if (!m) {
                play.outcome = Outcome::EnvironmentStuck;
                return out;
            }
            if (!push(*m)) return out;
            const GameState& t = play.trace.states.back();
            const auto next = kg.env_successor(kv, o1, sight(arena, t.team(sys), t.team(env), radius));
            if (!next) throw ContractViolation("observed environment move is missing from the knowledge game");
            rr = sol.strategy.advance(kv, rr);
            kv = *next;
        }
    }
    play.outcome = Outcome::MaxSteps;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

/// AND-OR search over world sets for observation_strategy_oracle.
class ObservationSearch {
public:
    using Worlds = std::set<GameState>;

    ObservationSearch(const Arena& arena, const GameConfig& cfg, int radius, std::size_t bound)
        : arena_(arena), cfg_(cfg), radius_(radius), bound_(bound), sys_(cfg.system_team),
          reach_(cfg.variant == Variant::CopPursuit) {}

    Player decide(const GameState& init) {
        Worlds root{init};
        count(root, init.mover == sys_);
        const int depth = static_cast<int>(known_.size()) + 1;
        const bool win = init.mover == sys_ ? system_turn(root, depth) : env_turn(root, depth);
        return win ? Player::System : Player::Environment;
    }

private:
    Sighting view(const GameState& w) const {
        Sighting out;
        const auto& opp = w.team(other(sys_));
        for (std::size_t j = 0; j < opp.size(); ++j)
            for (Coord o : w.team(sys_))
                if (arena_.distance(o, opp[j]) <= radius_) {
                    out.push_back({static_cast<int>(j), opp[j]});
                    break;
                }
        return out;
    }

    std::vector<JointMove> common_moves(const Worlds& w) const {
        std::vector<JointMove> out;
        for (const JointMove& m : legal_joint_moves(arena_, cfg_, *w.begin())) {
            bool ok = true;
            for (const GameState& x : w) ok = ok && !diagnose_move(arena_, cfg_, x, m);
            if (ok) out.push_back(m);
        }
        return out;
    }

    /// World sets after the system's move `m`; nullopt if the move already decides the game.
    std::optional<bool> after_system(const Worlds& w, const JointMove& m, Worlds& out) const {
        for (const GameState& x : w) {
            GameState y = apply_joint_move(arena_, cfg_, x, m);
            if (y.violation) return false;
            if (is_capture(arena_, y)) continue;  // only cops can capture on their own move
            out.insert(std::move(y));
        }
        if (out.empty()) return true;
        return std::nullopt;
    }

    /// Splits the environment's replies by what the system sees. Sets `lost`
    /// when some reply captures a system robber.
    std::map<std::pair<Sighting, Sighting>, Worlds> replies(const Worlds& w, bool& lost) const {
        std::map<std::pair<Sighting, Sighting>, Worlds> groups;
        for (const GameState& x : w) {
            const Sighting o1 = view(x);
            for (const JointMove& m : legal_joint_moves(arena_, cfg_, x)) {
                GameState y = apply_joint_move(arena_, cfg_, x, m);
                if (is_capture(arena_, y)) {
                    if (!reach_) lost = true;
                    continue;
                }
                groups[{o1, view(y)}].insert(std::move(y));
            }
        }
        return groups;
    }

    void count(const Worlds& root, bool system_first) {
        std::deque<Worlds> todo;
        auto visit_env = [&](const Worlds& w) {
            bool lost = false;
            for (auto& [k, next] : replies(w, lost)) {
                if (known_.insert(next).second) {
                    if (known_.size() > bound_) throw CapExceeded("observation oracle bound exceeded", known_.size());
                    todo.push_back(next);
                }
            }
        };
        if (system_first) {
            known_.insert(root);
            todo.push_back(root);
        } else {
            visit_env(root);
        }
        while (!todo.empty()) {
            const Worlds w = todo.front();
            todo.pop_front();
            for (const JointMove& m : common_moves(w)) {
                Worlds after;
                if (after_system(w, m, after)) continue;
                visit_env(after);
            }
        }
    }

    bool system_turn(const Worlds& w, int depth) {
        if (depth == 0) return !reach_;
        auto key = std::make_pair(w, depth);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool win = false;
        for (const JointMove& m : common_moves(w)) {
            Worlds after;
            if (auto decided = after_system(w, m, after)) {
                win = *decided;
            } else {
                win = env_turn(after, depth);
            }
            if (win) break;
        }
        memo_[key] = win;
        return win;
    }

    bool env_turn(const Worlds& w, int depth) {
        bool lost = false;
        const auto groups = replies(w, lost);
        if (lost) return false;
        for (const auto& [k, next] : groups)
            if (!system_turn(next, depth - 1)) return false;
        return true;
    }

    const Arena& arena_;
    const GameConfig& cfg_;
    int radius_;
    std::size_t bound_;
    Team sys_;
    bool reach_;
    std::set<Worlds> known_;
    std::map<std::pair<Worlds, int>, bool> memo_;
};

}  // namespace

Player observation_strategy_oracle(const Arena& arena, const GameConfig& cfg, const GameState& init, int radius,
                                   std::size_t bound) {
    if (cfg.variant == Variant::SafeZoneLiveness)
        throw ContractViolation("observation_strategy_oracle covers reachability and safety only");
    return ObservationSearch(arena, cfg, radius, bound).decide(init);
}

BeliefTrace track_beliefs(const Arena& arena, const GameConfig& cfg, const GameState& init, Policy& system,
                          Policy& environment, std::size_t steps) {
    const Team team = cfg.system_team;
    const int radius = cfg.info.obs_radius;
    const int members = team == Team::Cops ? cfg.cop_count : cfg.robber_count;
    BeliefTrace out;
    out.states.push_back(init);
    out.team_beliefs.push_back(initial_belief(arena, cfg, init, team, observe(arena, init, team, radius)));
    std::vector<BeliefState> per;
    for (int m = 0; m < members; ++m)
        per.push_back(initial_belief(arena, cfg, init, team,
                                     observe_member(arena, init, team, m, radius, cfg.info.info_sharing_radius)));
    out.member_beliefs.push_back(per);

    for (std::size_t i = 0; i < steps; ++i) {
        const GameState& s = out.states.back();
        if (is_terminal(arena, s)) break;
        Policy& p = cfg.player_of(s.mover) == Player::System ? system : environment;
        const auto m = p.choose(arena, cfg, s, 0);
        if (!m) break;
        const GameState t = apply_joint_move(arena, cfg, s, *m);
        if (is_terminal(arena, t)) break;
        out.team_beliefs.push_back(
            update_belief(arena, cfg, out.team_beliefs.back(), observe(arena, t, team, radius), s.mover));
        std::vector<BeliefState> next;
        for (int k = 0; k < members; ++k)
            next.push_back(update_belief(
                arena, cfg, out.member_beliefs.back()[static_cast<std::size_t>(k)],
                observe_member(arena, t, team, k, radius, cfg.info.info_sharing_radius), s.mover));
        out.member_beliefs.push_back(std::move(next));
        out.states.push_back(t);
    }
    return out;
}

}  // namespace cnr
