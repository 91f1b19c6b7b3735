#include "cnr/oracle.hpp"

#include <chrono>
#include <deque>
#include <map>

namespace cnr {

namespace {

struct Node {
    GameState state;
    std::size_t counter = 0;
    bool terminal = false;
    bool capture = false;
    std::vector<std::size_t> next;
};

/// Which robber-visit sets the state belongs to, in builder order (robber-major, zone-minor).
std::vector<bool> visit_sets(const Arena& arena, const GameConfig& cfg, const GameState& s) {
    const int zones = arena.zone_count();
    const bool team = cfg.obligations == ObligationScope::TeamGlobal;
    const int groups = team ? 1 : cfg.robber_count;
    std::vector<bool> in(static_cast<std::size_t>(groups * zones), false);
    if (is_terminal(arena, s)) return in;
    for (int q = 0; q < cfg.robber_count; ++q) {
        const int z = arena.cell(s.robbers[static_cast<std::size_t>(q)]).zone;
        if (z == 0) continue;
        const int g = team ? 0 : q;
        in[static_cast<std::size_t>(g * zones + z - 1)] = true;
    }
    return in;
}

}  // namespace

Verdict brute_force_oracle(const Arena& arena, const GameConfig& cfg, const GameState& init, std::size_t bound) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool buchi = cfg.variant == Variant::SafeZoneLiveness;
    const std::size_t sets = buchi ? static_cast<std::size_t>(
                                         (cfg.obligations == ObligationScope::TeamGlobal ? 1 : cfg.robber_count) *
                                         arena.zone_count())
                                   : 1;
    if (buchi && sets == 0) throw ContractViolation("oracle: no acceptance sets");

    std::vector<Node> nodes;
    std::map<std::pair<GameState, std::size_t>, std::size_t> ids;
    std::deque<std::size_t> todo;
    auto intern = [&](const GameState& s, std::size_t counter) {
        auto [it, fresh] = ids.try_emplace({s, counter}, nodes.size());
        if (fresh) {
            if (nodes.size() >= bound) throw CapExceeded("oracle state bound exceeded", nodes.size() + 1);
            Node n;
            n.state = s;
            n.counter = counter;
            n.capture = is_capture(arena, s);
            n.terminal = n.capture || s.violation.has_value();
            nodes.push_back(std::move(n));
            todo.push_back(it->second);
        }
        return it->second;
    };
    const std::size_t root = intern(init, 0);
    while (!todo.empty()) {
        const std::size_t i = todo.front();
        todo.pop_front();
        if (nodes[i].terminal) continue;
        const GameState s = nodes[i].state;
        std::size_t counter = nodes[i].counter;
        if (buchi && visit_sets(arena, cfg, s)[counter]) counter = (counter + 1) % sets;
        std::vector<std::size_t> next;
        for (const JointMove& m : legal_joint_moves(arena, cfg, s))
            next.push_back(intern(apply_joint_move(arena, cfg, s, m), counter));
        nodes[i].next = std::move(next);
    }

    const Team sys = cfg.system_team;
    bool sys_wins = false;
    std::size_t sweeps = 0;
    if (!buchi) {
        // 0 = undecided, 1 = cops win, 2 = robbers win.
        std::vector<int> label(nodes.size(), 0);
        auto win_code = [](Team t) { return t == Team::Cops ? 1 : 2; };
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].terminal) label[i] = 1;
            else if (nodes[i].next.empty()) label[i] = win_code(other(nodes[i].state.mover));
        }
        for (bool changed = true; changed; ++sweeps) {
            changed = false;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (label[i] != 0) continue;
                const int mine = win_code(nodes[i].state.mover);
                const int theirs = win_code(other(nodes[i].state.mover));
                bool any_mine = false, all_theirs = true;
                for (std::size_t j : nodes[i].next) {
                    any_mine |= label[j] == mine;
                    all_theirs &= label[j] == theirs;
                }
                if (any_mine) label[i] = mine;
                else if (all_theirs) label[i] = theirs;
                if (label[i] != 0) changed = true;
            }
        }
        const int root_label = label[root] == 0 ? 2 : label[root];  // endless play: robbers survive
        sys_wins = root_label == win_code(sys);
    } else {
        const std::size_t n = nodes.size();
        auto accepting = [&](std::size_t i) {
            return nodes[i].counter == sets - 1 && visit_sets(arena, cfg, nodes[i].state)[sets - 1];
        };
        auto pre = [&](std::size_t i, const std::vector<bool>& x) {
            if (nodes[i].terminal) return false;
            const bool mine = nodes[i].state.mover == sys;
            if (mine) {
                for (std::size_t j : nodes[i].next)
                    if (x[j]) return true;
                return false;
            }
            for (std::size_t j : nodes[i].next)
                if (!x[j]) return false;
            return true;
        };
        std::vector<bool> z(n, true);
        while (true) {
            std::vector<bool> y(n, false);
            for (bool changed = true; changed; ++sweeps) {
                changed = false;
                for (std::size_t i = 0; i < n; ++i) {
                    if (y[i]) continue;
                    if ((accepting(i) && pre(i, z)) || pre(i, y)) {
                        y[i] = true;
                        changed = true;
                    }
                }
            }
            if (y == z) break;
            z = std::move(y);
        }
        sys_wins = z[root];
    }

    Verdict v;
    v.winner = sys_wins ? Player::System : Player::Environment;
    v.states = nodes.size();
    v.iterations = sweeps;
    v.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

}  // namespace cnr
