#include "cnr/sim.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cnr/errors.hpp"

namespace cnr {

std::string to_string(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::RandomLegal: return "random";
        case AdversaryKind::GreedyDistance: return "greedy";
        case AdversaryKind::Optimal: return "optimal";
        case AdversaryKind::Scripted: return "scripted";
    }
    return "?";
}

std::optional<AdversaryKind> adversary_from_string(const std::string& s) {
    for (AdversaryKind k : {AdversaryKind::RandomLegal, AdversaryKind::GreedyDistance, AdversaryKind::Optimal,
                            AdversaryKind::Scripted})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Capture: return "Capture";
        case Outcome::Violation: return "Violation";
        case Outcome::SystemStuck: return "SystemStuck";
        case Outcome::EnvironmentStuck: return "EnvironmentStuck";
        case Outcome::MaxSteps: return "MaxSteps";
        case Outcome::Cycle: return "Cycle";
        case Outcome::WindowOverflow: return "WindowOverflow";
    }
    return "?";
}

namespace {

class RandomLegal final : public Policy {
public:
    explicit RandomLegal(std::uint64_t seed) : rng_(seed) {}
    std::optional<JointMove> choose(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    std::size_t) override {
        auto moves = legal_joint_moves(arena, cfg, s);
        if (moves.empty()) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
        return moves[pick(rng_)];
    }
    std::string name() const override { return "random"; }

private:
    std::mt19937_64 rng_;
};

long spread(const Arena& arena, const GameState& s, Team team, const std::vector<Coord>& moved) {
    const auto& opp = s.team(other(team));
    if (opp.empty()) return 0;
    long total = 0;
    for (Coord c : moved) {
        int best = std::numeric_limits<int>::max();
        for (Coord o : opp) best = std::min(best, arena.distance(c, o));
        total += best;
    }
    return total;
}

/// Index of the best move under the greedy distance rule.
std::optional<std::size_t> greedy_pick(const Arena& arena, const GameState& s, const std::vector<JointMove>& moves) {
    if (moves.empty()) return std::nullopt;
    const bool cops = s.mover == Team::Cops;
    std::size_t best = 0;
    long best_score = 0;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const long score = spread(arena, s, s.mover, moves[i].destinations);
        if (i == 0 || (cops ? score < best_score : score > best_score)) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

class Greedy final : public Policy {
public:
    std::optional<JointMove> choose(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    std::size_t) override {
        const auto moves = legal_joint_moves(arena, cfg, s);
        if (auto i = greedy_pick(arena, s, moves)) return moves[*i];
        return std::nullopt;
    }
    std::string name() const override { return "greedy"; }
};

StateId locate(const GameGraph& g, const GameState& s) {
    if (auto id = g.find(s)) return *id;
    throw ContractViolation("state is not part of the solved game");
}

class OptimalAdversary final : public Policy {
public:
    OptimalAdversary(const GameGraph& g, const Solution& sol) : g_(g), sol_(sol) {}

    std::optional<JointMove> choose(const Arena& arena, const GameConfig&, const GameState& s,
                                    std::size_t rr) override {
        const StateId v = locate(g_, s);
        const auto succ = g_.topo.successors(v);
        if (succ.empty()) return std::nullopt;
        const std::size_t k = sol_.rr_count;
        const std::size_t pv = v * k + rr;
        const std::size_t next_rr = sol_.strategy.advance(v, rr);
        auto pw = [&](StateId w) { return w * k + next_rr; };

        std::optional<StateId> pick;
        const std::uint32_t layer = sol_.env_layer[pv];
        if (layer != kUnranked) {
            const std::uint32_t rank = sol_.env_rank[pv];
            for (StateId w : succ) {
                const std::uint32_t lw = sol_.env_layer[pw(w)];
                if (lw == kUnranked) continue;
                const std::uint32_t rw = sol_.env_rank[pw(w)];
                const bool good = rank == 0 ? lw <= layer : (lw < layer || (lw == layer && rw < rank));
                if (good) {
                    pick = w;
                    break;
                }
            }
        } else if (sol_.objective != Objective::Safety) {
            // Losing anyway: postpone the system's goal as long as possible.
            std::uint32_t best = 0;
            for (StateId w : succ) {
                const std::uint32_t r = sol_.rank[pw(w)];
                if (!pick || (r != kUnranked && r > best)) {
                    pick = w;
                    best = r == kUnranked ? 0 : r;
                }
            }
        } else {
            std::vector<JointMove> moves;
            for (StateId w : succ) moves.push_back(g_.move(v, w));
            return moves[*greedy_pick(arena, s, moves)];
        }
        if (!pick) pick = succ.front();
        return g_.move(v, *pick);
    }
    std::string name() const override { return "optimal"; }

private:
    const GameGraph& g_;
    const Solution& sol_;
};

class Scripted final : public Policy {
public:
    explicit Scripted(std::vector<JointMove> moves) : moves_(std::move(moves)) {}
    std::optional<JointMove> choose(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    std::size_t) override {
        if (next_ < moves_.size()) {
            const JointMove& m = moves_[next_++];
            if (auto c = diagnose_move(arena, cfg, s, m))
                throw IllegalMove(*c, m.team, "scripted move " + std::to_string(next_ - 1));
            return m;
        }
        auto legal = legal_joint_moves(arena, cfg, s);
        if (legal.empty()) return std::nullopt;
        return legal.front();
    }
    std::string name() const override { return "scripted"; }

private:
    std::vector<JointMove> moves_;
    std::size_t next_ = 0;
};

class StrategyPlayer final : public Policy {
public:
    StrategyPlayer(const GameGraph& g, const Solution& sol) : g_(g), sol_(sol) {}
    std::optional<JointMove> choose(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    std::size_t rr) override {
        const StateId v = locate(g_, s);
        if (auto w = sol_.strategy.choose(v, rr)) return g_.move(v, *w);
        auto legal = legal_joint_moves(arena, cfg, s);
        if (legal.empty()) return std::nullopt;
        return legal.front();
    }
    std::string name() const override { return "strategy"; }

private:
    const GameGraph& g_;
    const Solution& sol_;
};

}  // namespace

std::unique_ptr<Policy> random_legal(std::uint64_t seed) { return std::make_unique<RandomLegal>(seed); }
std::unique_ptr<Policy> greedy_distance() { return std::make_unique<Greedy>(); }
std::unique_ptr<Policy> optimal_adversary(const GameGraph& graph, const Solution& sol) {
    return std::make_unique<OptimalAdversary>(graph, sol);
}
std::unique_ptr<Policy> scripted(std::vector<JointMove> moves) { return std::make_unique<Scripted>(std::move(moves)); }
std::unique_ptr<Policy> strategy_player(const GameGraph& graph, const Solution& sol) {
    return std::make_unique<StrategyPlayer>(graph, sol);
}

std::optional<Trace> Playout::lasso() const {
    if (!first_repeat) return std::nullopt;
    Trace t;
    t.states.assign(trace.states.begin(), trace.states.begin() + static_cast<std::ptrdiff_t>(first_repeat->second) + 1);
    t.cycle_start = first_repeat->first;
    return t;
}

namespace {

/// Shared stepping logic of finite and windowed playouts.
class Recorder {
public:
    Recorder(const Arena& arena, const GameConfig& cfg, Playout& out) : arena_(arena), cfg_(cfg), out_(out) {
        out_.zone_visits.assign(static_cast<std::size_t>(cfg.robber_count),
                                std::vector<std::size_t>(static_cast<std::size_t>(std::max(arena.zone_count(), 2)), 0));
    }

    void start(const GameState& s) { out_.trace.states.push_back(s); }

    /// Applies `m` and records it. Returns the outcome if the play ended.
    std::optional<Outcome> step(const JointMove& m) {
        const GameState& s = out_.trace.states.back();
        if (auto c = diagnose_move(arena_, cfg_, s, m))
            throw IllegalMove(*c, m.team, "policy produced an illegal move at step " + std::to_string(out_.steps + 1));
        GameState next = apply_joint_move(arena_, cfg_, s, m);
        if (m.team == Team::Robbers) {
            for (std::size_t r = 0; r < next.robbers.size(); ++r) {
                const int z = arena_.cell(next.robbers[r]).zone;
                if (z > 0 && arena_.cell(s.robbers[r]).zone != z)
                    ++out_.zone_visits[r][static_cast<std::size_t>(z - 1)];
            }
        }
        out_.moves.push_back(m);
        out_.trace.states.push_back(std::move(next));
        ++out_.steps;
        const GameState& t = out_.trace.states.back();
        if (t.violation) return Outcome::Violation;
        if (is_capture(arena_, t)) {
            ++out_.captures;
            return Outcome::Capture;
        }
        return std::nullopt;
    }

    /// Outcome when the mover has no move.
    Outcome stuck(const GameState& s) const {
        return cfg_.player_of(s.mover) == Player::System ? Outcome::SystemStuck : Outcome::EnvironmentStuck;
    }

private:
    const Arena& arena_;
    const GameConfig& cfg_;
    Playout& out_;
};

}  // namespace

Playout run_playout(const GameGraph& graph, const Solution& sol, Policy& system, Policy& adversary,
                    const PlayoutOptions& opt) {
    const Arena& arena = graph.arena();
    const GameConfig& cfg = graph.config;
    Playout out;
    Recorder rec(arena, cfg, out);
    rec.start(graph.state(graph.initial));
    std::size_t rr = 0;
    std::map<std::pair<StateId, std::size_t>, std::size_t> seen;
    StateId v = graph.initial;
    seen[{v, rr}] = 0;

    while (out.steps < opt.max_steps) {
        const GameState& s = out.trace.states.back();
        Policy& p = cfg.player_of(s.mover) == Player::System ? system : adversary;
        const auto m = p.choose(arena, cfg, s, rr);
        if (!m) {
            out.outcome = rec.stuck(s);
            return out;
        }
        const std::size_t next_rr = sol.strategy.advance(v, rr);
        if (auto end = rec.step(*m)) {
            out.outcome = *end;
            return out;
        }
        v = locate(graph, out.trace.states.back());
        rr = next_rr;
        auto [it, fresh] = seen.try_emplace({v, rr}, out.trace.states.size() - 1);
        if (!fresh && !out.first_repeat) {
            out.first_repeat = {it->second, out.trace.states.size() - 1};
            if (opt.stop_on_repeat) {
                out.trace.cycle_start = it->second;
                out.outcome = Outcome::Cycle;
                return out;
            }
        }
    }
    out.outcome = Outcome::MaxSteps;
    return out;
}

Playout run_playout(const GameGraph& graph, const Solution& sol, Policy& adversary, const PlayoutOptions& opt) {
    auto system = strategy_player(graph, sol);
    return run_playout(graph, sol, *system, adversary, opt);
}

PlayoutSummary summarize(const Playout& p) { return {to_string(p.outcome), p.steps, p.captures, p.zone_visits}; }

namespace {

Coord centroid(const std::vector<Coord>& a, const std::vector<Coord>& b = {}) {
    long sx = 0;
    long sy = 0;
    std::size_t n = 0;
    for (const auto* v : {&a, &b}) {
        for (Coord c : *v) {
            sx += c.x;
            sy += c.y;
            ++n;
        }
    }
    auto floor_div = [](long x, long d) { return x >= 0 ? x / d : -((-x + d - 1) / d); };
    return {static_cast<int>(floor_div(sx, static_cast<long>(n))), static_cast<int>(floor_div(sy, static_cast<long>(n)))};
}

int edge_distance(const Window& w, Coord global) {
    const Coord l = w.to_local(global);
    const int n = w.arena.width();
    return std::min({l.x, l.y, n - 1 - l.x, n - 1 - l.y});
}

bool fits(const Window& w, const GameState& s) {
    for (Team t : {Team::Cops, Team::Robbers})
        for (Coord c : s.team(t))
            if (edge_distance(w, c) < 1) return false;
    return true;
}

GameState to_local(const Window& w, const GameState& s) {
    GameState l = s;
    for (Team t : {Team::Cops, Team::Robbers})
        for (Coord& c : l.team(t)) c = w.to_local(c);
    return l;
}

JointMove to_global(const Window& w, JointMove m) {
    for (Coord& c : m.destinations) c = w.to_global(c);
    return m;
}

}  // namespace

RecedingResult receding_horizon_play(const TilingSpec& tiling, Connectivity conn, const GameConfig& cfg,
                                     std::vector<Coord> cops, std::vector<Coord> robbers,
                                     const RecedingOptions& opt) {
    cfg.validate();
    const Arena world = Arena::tiled(tiling, conn);
    validate_starts(world, cops, robbers);
    RecedingResult res;
    Playout& out = res.play;
    Recorder rec(world, cfg, out);
    rec.start(initial_state(cfg, std::move(cops), std::move(robbers)));
    std::mt19937_64 seeds(opt.seed);

    while (out.steps < opt.max_steps) {
        const GameState global = out.trace.states.back();
        Coord center = centroid(global.team(cfg.system_team));
        Window w = extract_window(tiling, center, opt.window_size, conn);
        if (!fits(w, global)) {
            center = centroid(global.cops, global.robbers);
            w = extract_window(tiling, center, opt.window_size, conn);
            if (!fits(w, global)) {
                out.outcome = Outcome::WindowOverflow;
                return res;
            }
        }

        GameGraph g;
        try {
            g = build_game_graph(w.arena, cfg, to_local(w, global));
        } catch (const CapExceeded& e) {
            throw CapExceeded("window centered at " + to_string(center) + ": " + e.what(), e.lower_bound());
        }
        g.window_relative = true;
        const Solution sol = solve(g);
        res.windows.push_back({center, w.origin, out.steps, sol.verdict});

        auto system = strategy_player(g, sol);
        std::unique_ptr<Policy> adversary;
        switch (opt.adversary) {
            case AdversaryKind::RandomLegal: adversary = random_legal(seeds()); break;
            case AdversaryKind::GreedyDistance: adversary = greedy_distance(); break;
            case AdversaryKind::Optimal: adversary = optimal_adversary(g, sol); break;
            case AdversaryKind::Scripted: throw ContractViolation("scripted adversaries are not supported in windows");
        }

        StateId v = g.initial;
        std::size_t rr = 0;
        bool first = true;
        const std::size_t window_start = out.steps;
        while (out.steps < opt.max_steps) {
            const GameState& gs = out.trace.states.back();
            if (!first) {
                bool near_edge = false;
                for (Team t : {Team::Cops, Team::Robbers})
                    for (Coord c : gs.team(t)) near_edge |= edge_distance(w, c) <= opt.replan_margin;
                if (near_edge) break;
            }
            first = false;
            const GameState local = to_local(w, gs);
            Policy& p = cfg.player_of(gs.mover) == Player::System ? *system : *adversary;
            const auto m = p.choose(w.arena, cfg, local, rr);
            if (!m) {
                // Stuck inside the window; a re-centered window may offer more room.
                if (out.steps > window_start) break;
                out.outcome = rec.stuck(gs);
                return res;
            }
            const std::size_t next_rr = sol.strategy.advance(v, rr);
            if (auto end = rec.step(to_global(w, *m))) {
                out.outcome = *end;
                return res;
            }
            v = locate(g, to_local(w, out.trace.states.back()));
            rr = next_rr;
        }
    }
    out.outcome = Outcome::MaxSteps;
    return res;
}

}  // namespace cnr
