#pragma once

#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/game.hpp"
#include "cnr/graph.hpp"
#include "cnr/solver.hpp"

namespace cnr::test {

/// Fig. 2: cop - middle - robber path.
inline ParsedArena fig2() { return parse_arena("C.R"); }

/// Fig. 3: 4-cycle left(0) - top(1) - right(2) - bottom(3).
inline Arena four_cycle() { return Arena::graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }

inline GameConfig robber_safety(int cops = 1, int robbers = 1, MoveRule rule = MoveRule::MustMove) {
    GameConfig cfg;
    cfg.cop_count = cops;
    cfg.robber_count = robbers;
    cfg.system_team = Team::Robbers;
    cfg.variant = Variant::ClassicPursuit;
    cfg.move_rule = rule;
    return cfg;
}

inline GameConfig cop_pursuit(int cops = 1, int robbers = 1, MoveRule rule = MoveRule::MustMove,
                              Player first = Player::Environment) {
    GameConfig cfg;
    cfg.cop_count = cops;
    cfg.robber_count = robbers;
    cfg.system_team = Team::Cops;
    cfg.variant = Variant::CopPursuit;
    cfg.move_rule = rule;
    cfg.first = first;
    return cfg;
}

inline GameConfig safe_zone(int cops = 1, int robbers = 1, MoveRule rule = MoveRule::MustMove) {
    GameConfig cfg;
    cfg.cop_count = cops;
    cfg.robber_count = robbers;
    cfg.system_team = Team::Robbers;
    cfg.variant = Variant::SafeZoneLiveness;
    cfg.move_rule = rule;
    return cfg;
}

inline Coord v(int id) { return {id, 0}; }

/// Reachable states by plain BFS over legal_joint_moves; the reference the
/// graph builder is checked against.
struct Enumerated {
    std::map<GameState, std::vector<GameState>> succ;
};

inline Enumerated enumerate_states(const Arena& arena, const GameConfig& cfg, const GameState& init) {
    Enumerated e;
    std::deque<GameState> todo{init};
    e.succ[init];
    while (!todo.empty()) {
        GameState s = todo.front();
        todo.pop_front();
        if (is_terminal(arena, s)) continue;
        std::vector<GameState> next;
        for (const JointMove& m : legal_joint_moves(arena, cfg, s)) {
            GameState t = apply_joint_move(arena, cfg, s, m);
            next.push_back(t);
            if (e.succ.try_emplace(t).second) todo.push_back(t);
        }
        e.succ[s] = std::move(next);
    }
    return e;
}

/// Random grid scenario: `w` x `h`, wall density `walls`, distinct starts on open cells.
struct RandomScenario {
    Arena arena;
    std::vector<Coord> cops;
    std::vector<Coord> robbers;
};

inline RandomScenario random_scenario(std::mt19937& rng, int w, int h, int cops, int robbers,
                                      double walls = 0.2, int zones = 0,
                                      Connectivity conn = Connectivity::EightWay) {
    while (true) {
        std::vector<CellKind> cells(static_cast<std::size_t>(w * h), CellKind::open());
        std::bernoulli_distribution wall(walls);
        for (auto& c : cells)
            if (wall(rng)) c = CellKind::wall();
        std::vector<int> open;
        for (int i = 0; i < w * h; ++i)
            if (cells[static_cast<std::size_t>(i)].is_open()) open.push_back(i);
        if (static_cast<int>(open.size()) < cops + robbers + zones) continue;
        std::shuffle(open.begin(), open.end(), rng);
        RandomScenario sc;
        std::size_t k = 0;
        for (int z = 1; z <= zones; ++z) cells[static_cast<std::size_t>(open[k++])] = CellKind::safe_zone(z);
        auto at = [&](int i) { return Coord{i % w, i / w}; };
        for (int i = 0; i < cops; ++i) sc.cops.push_back(at(open[k++]));
        for (int i = 0; i < robbers; ++i) sc.robbers.push_back(at(open[k++]));
        sc.arena = Arena::grid(w, h, std::move(cells), conn);
        return sc;
    }
}

/// One of the 8 symmetries of a square grid: bit 0 mirrors x, bit 1 mirrors
/// y, bit 2 transposes (applied last).
inline Coord apply_symmetry(int sym, int n, Coord c) {
    if (sym & 1) c.x = n - 1 - c.x;
    if (sym & 2) c.y = n - 1 - c.y;
    if (sym & 4) std::swap(c.x, c.y);
    return c;
}

inline RandomScenario transform(const RandomScenario& sc, int sym) {
    const int n = sc.arena.width();
    std::vector<CellKind> cells(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n * n; ++i) {
        const Coord c = apply_symmetry(sym, n, sc.arena.coord(i));
        cells[static_cast<std::size_t>(c.y * n + c.x)] = sc.arena.cell_at(i);
    }
    RandomScenario out{Arena::grid(n, n, std::move(cells), sc.arena.connectivity()), {}, {}};
    for (Coord c : sc.cops) out.cops.push_back(apply_symmetry(sym, n, c));
    for (Coord c : sc.robbers) out.robbers.push_back(apply_symmetry(sym, n, c));
    return out;
}

/// Walks every adversary choice against the extracted reachability strategy
/// and returns the largest number of system moves before capture, or -1 when
/// some branch escapes (cycle, stuck system vertex, missing choice).
inline int worst_case_capture(const GameCore& g, const Solution& sol) {
    std::map<StateId, int> memo;
    std::set<StateId> on_path;
    auto walk = [&](auto&& self, StateId s) -> int {
        if (g.topo.terminal[s]) return std::binary_search(g.capture.begin(), g.capture.end(), s) ? 0 : -1;
        if (auto it = memo.find(s); it != memo.end()) return it->second;
        if (!on_path.insert(s).second) return -1;
        int result = 0;
        if (g.topo.owner[s] == Player::System) {
            const auto t = sol.strategy.choose(s, 0);
            const int sub = t ? self(self, *t) : -1;
            result = sub < 0 ? -1 : sub + 1;
        } else {
            for (StateId t : g.topo.successors(s)) {
                const int sub = self(self, t);
                if (sub < 0) {
                    result = -1;
                    break;
                }
                result = std::max(result, sub);
            }
            // A stuck environment vertex is a win needing no further moves.
        }
        on_path.erase(s);
        memo[s] = result;
        return result;
    };
    return walk(walk, g.initial);
}

/// Strategy-restricted product reachable from (initial, 0). Returns false if
/// it reaches a terminal vertex, a system vertex without a choice, or a
/// cycle avoiding some acceptance set.
inline bool buchi_strategy_sound(const GameCore& g, const Solution& sol) {
    const std::size_t k = sol.rr_count;
    using Node = std::pair<StateId, std::size_t>;
    std::map<Node, std::vector<Node>> succ;
    std::deque<Node> todo{{g.initial, 0}};
    succ[{g.initial, 0}];
    while (!todo.empty()) {
        const Node n = todo.front();
        todo.pop_front();
        const auto [s, i] = n;
        if (g.topo.terminal[s]) return false;
        const std::size_t next = sol.strategy.advance(s, i);
        std::vector<Node> out;
        if (g.topo.owner[s] == Player::System) {
            const auto t = sol.strategy.choose(s, i);
            if (!t) return false;
            out.push_back({*t, next});
        } else {
            for (StateId t : g.topo.successors(s)) out.push_back({t, next});
        }
        for (const Node& m : out)
            if (succ.try_emplace(m).second) todo.push_back(m);
        succ[n] = std::move(out);
    }
    // For each set, the restricted graph minus that set's members must be acyclic.
    for (const AcceptanceSet& set : g.acceptance) {
        std::set<StateId> members(set.members.begin(), set.members.end());
        std::map<Node, int> color;  // 0 white, 1 grey, 2 black
        bool cyclic = false;
        auto dfs = [&](auto&& self, const Node& n) -> void {
            color[n] = 1;
            for (const Node& m : succ[n]) {
                if (members.count(m.first)) continue;
                const int c = color[m];
                if (c == 1) cyclic = true;
                if (c == 0) self(self, m);
                if (cyclic) return;
            }
            color[n] = 2;
        };
        for (const auto& [n, _] : succ) {
            if (members.count(n.first) || color[n] != 0) continue;
            dfs(dfs, n);
            if (cyclic) return false;
        }
    }
    return true;
}

}  // namespace cnr::test
