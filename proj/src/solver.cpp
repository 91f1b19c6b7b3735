#include "cnr/solver.hpp"

#include <chrono>
#include <deque>
#include <map>

namespace cnr {

namespace {

constexpr StateId kNoChoice = std::numeric_limits<StateId>::max();

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::uint8_t> to_mask(std::size_t n, std::span<const StateId> ids) {
    std::vector<std::uint8_t> m(n, 0);
    for (StateId s : ids) m[s] = 1;
    return m;
}

std::vector<StateId> bad_states(const GameCore& g) {
    std::vector<StateId> bad = g.capture;
    bad.insert(bad.end(), g.violation.begin(), g.violation.end());
    return bad;
}

/// Degeneralized product: vertex (s, i) is s * k + i.
TwoPlayerGraph product(const TwoPlayerGraph& g, const std::vector<std::vector<std::uint8_t>>& accept) {
    const std::size_t k = accept.size();
    TwoPlayerGraph p;
    p.owner.reserve(g.size() * k);
    p.terminal.reserve(g.size() * k);
    p.succ.reserve(g.edge_count() * k);
    for (StateId s = 0; s < g.size(); ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            p.add_vertex(g.owner[s], g.terminal[s] != 0);
            const std::size_t next = accept[i][s] ? (i + 1) % k : i;
            for (StateId t : g.successors(s)) p.add_edge(static_cast<StateId>(t * k + next));
            p.end_vertex();
        }
    }
    p.finalize();
    return p;
}

/// Controllable predecessor test used by the naive sweeps.
bool cpre(const TwoPlayerGraph& g, StateId s, Player player, const std::vector<std::uint8_t>& x) {
    if (g.terminal[s]) return false;
    auto succ = g.successors(s);
    if (g.owner[s] == player) {
        for (StateId t : succ)
            if (x[t]) return true;
        return false;
    }
    for (StateId t : succ)
        if (!x[t]) return false;
    return true;
}

/// Greatest set avoiding `avoid` that `player` can stay in, by repeated sweeps.
std::vector<std::uint8_t> naive_safe_region(const TwoPlayerGraph& g, const std::vector<std::uint8_t>& avoid,
                                            Player player) {
    std::vector<std::uint8_t> y(g.size());
    for (StateId s = 0; s < g.size(); ++s) y[s] = avoid[s] ? 0 : 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId s = 0; s < g.size(); ++s) {
            if (!y[s] || g.terminal[s]) continue;
            if (!cpre(g, s, player, y)) {
                y[s] = 0;
                changed = true;
            }
        }
    }
    return y;
}

/// νZ. μY. (Acc ∩ CPre(Z)) ∪ CPre(Y) for the system, by repeated sweeps.
std::vector<std::uint8_t> naive_buchi_region(const TwoPlayerGraph& g, const std::vector<std::uint8_t>& acc) {
    const std::size_t n = g.size();
    std::vector<std::uint8_t> z(n, 1);
    while (true) {
        std::vector<std::uint8_t> y(n, 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (StateId s = 0; s < n; ++s) {
                if (y[s]) continue;
                if ((acc[s] && cpre(g, s, Player::System, z)) || cpre(g, s, Player::System, y)) {
                    y[s] = 1;
                    changed = true;
                }
            }
        }
        if (y == z) return z;
        z = std::move(y);
    }
}

struct BuchiResult {
    std::vector<std::uint8_t> env_win;  // per product vertex
    std::vector<std::uint32_t> env_layer;
    std::vector<std::uint32_t> env_rank;
    Attractor reach;                    // final system attractor to accepting vertices
    std::size_t iterations = 0;
};

BuchiResult solve_buchi_product(const TwoPlayerGraph& p, const std::vector<StateId>& accepting,
                                const std::vector<StateId>& bad) {
    BuchiResult r;
    r.env_win.assign(p.size(), 0);
    r.env_layer.assign(p.size(), kUnranked);
    r.env_rank.assign(p.size(), kUnranked);
    std::uint32_t layer = 0;
    auto absorb = [&](const Attractor& env) {
        for (StateId s = 0; s < p.size(); ++s) {
            if (!env.in[s] || r.env_win[s]) continue;
            r.env_win[s] = 1;
            r.env_layer[s] = layer;
            r.env_rank[s] = env.rank[s];
        }
        r.iterations += env.iterations;
        ++layer;
    };
    absorb(attractor(p, bad, Player::Environment));
    while (true) {
        std::vector<StateId> target;
        for (StateId s : accepting)
            if (!r.env_win[s]) target.push_back(s);
        r.reach = attractor(p, target, Player::System, &r.env_win);
        r.iterations += r.reach.iterations;
        std::vector<StateId> trap;
        for (StateId s = 0; s < p.size(); ++s)
            if (!r.env_win[s] && !r.reach.in[s]) trap.push_back(s);
        if (trap.empty()) return r;
        for (StateId s = 0; s < p.size(); ++s)
            if (r.env_win[s]) trap.push_back(s);
        absorb(attractor(p, trap, Player::Environment));
    }
}

std::vector<std::vector<std::uint8_t>> acceptance_masks(const GameCore& g, const std::vector<AcceptanceSet>& sets) {
    std::vector<std::vector<std::uint8_t>> out;
    for (const AcceptanceSet& a : sets) out.push_back(to_mask(g.size(), a.members));
    return out;
}

std::vector<StateId> accepting_product(const std::vector<std::vector<std::uint8_t>>& accept, std::size_t n) {
    const std::size_t k = accept.size();
    std::vector<StateId> out;
    for (StateId s = 0; s < n; ++s)
        if (accept[k - 1][s]) out.push_back(static_cast<StateId>(s * k + k - 1));
    return out;
}

void require(const GameCore& g, Variant v, const char* op) {
    if (g.config.variant != v)
        throw ContractViolation(std::string(op) + " does not apply to variant " + to_string(g.config.variant));
}

}  // namespace

Attractor attractor(const TwoPlayerGraph& g, std::span<const StateId> target, Player player,
                    const std::vector<std::uint8_t>* blocked) {
    const std::size_t n = g.size();
    Attractor a;
    a.in.assign(n, 0);
    a.rank.assign(n, kUnranked);
    std::vector<std::uint32_t> missing(n);
    for (StateId s = 0; s < n; ++s)
        missing[s] = g.succ_offsets[s + 1] - g.succ_offsets[s];

    std::vector<StateId> layer;
    for (StateId s : target) {
        if (a.in[s] || (blocked && (*blocked)[s])) continue;
        a.in[s] = 1;
        a.rank[s] = 0;
        layer.push_back(s);
    }
    // Stuck opponent vertices are won vacuously: they join at the first iteration.
    std::vector<StateId> next;
    for (StateId s = 0; s < n; ++s) {
        if (!a.in[s] && g.owner[s] != player && g.stuck(s) && !(blocked && (*blocked)[s])) {
            a.in[s] = 1;
            a.rank[s] = 1;
            next.push_back(s);
        }
    }
    std::uint32_t r = 0;
    while (!layer.empty() || !next.empty()) {
        if (!layer.empty()) a.iterations = r + 1;
        for (std::size_t i = 0; i < layer.size(); ++i) {
            const StateId t = layer[i];
            for (StateId s : g.predecessors(t)) {
                if (a.in[s] || g.terminal[s] || (blocked && (*blocked)[s])) continue;
                if (g.owner[s] == player || --missing[s] == 0) {
                    a.in[s] = 1;
                    a.rank[s] = r + 1;
                    next.push_back(s);
                }
            }
        }
        layer.swap(next);
        next.clear();
        ++r;
    }
    return a;
}

Objective objective_of(Variant v) {
    switch (v) {
        case Variant::CopPursuit: return Objective::Reachability;
        case Variant::ClassicPursuit: return Objective::Safety;
        case Variant::SafeZoneLiveness: return Objective::GeneralizedBuchi;
    }
    return Objective::Safety;
}

Strategy::Strategy(std::size_t states, std::size_t rr_count, std::vector<std::vector<std::uint8_t>> accept)
    : states_(states), rr_count_(rr_count), accept_(std::move(accept)), choice_(states * rr_count, kNoChoice) {}

std::size_t Strategy::advance(StateId s, std::size_t rr) const {
    if (accept_.empty()) return 0;
    return accept_[rr][s] ? (rr + 1) % rr_count_ : rr;
}

std::optional<StateId> Strategy::choose(StateId s, std::size_t rr) const {
    const StateId t = choice_[s * rr_count_ + rr];
    if (t == kNoChoice) return std::nullopt;
    return t;
}

void Strategy::set_choice(StateId s, std::size_t rr, StateId t) { choice_[s * rr_count_ + rr] = t; }

Solution solve_reachability(const GameCore& g) {
    require(g, Variant::CopPursuit, "solve_reachability");
    const auto t0 = Clock::now();
    Solution sol;
    sol.objective = Objective::Reachability;
    Attractor a = attractor(g.topo, g.capture, Player::System);
    sol.strategy = Strategy(g.size(), 1, {});
    for (StateId s = 0; s < g.size(); ++s) {
        if (g.topo.owner[s] != Player::System || !a.in[s] || a.rank[s] == 0) continue;
        // Successor lists are in move order, so the first rank-decreasing
        // successor is the lexicographically smallest such move.
        for (StateId t : g.topo.successors(s)) {
            if (a.rank[t] < a.rank[s]) {
                sol.strategy.set_choice(s, 0, t);
                break;
            }
        }
    }
    sol.system_region = a.in;
    sol.env_layer.assign(g.size(), kUnranked);
    sol.env_rank.assign(g.size(), kUnranked);
    for (StateId s = 0; s < g.size(); ++s)
        if (!a.in[s]) sol.env_layer[s] = sol.env_rank[s] = 0;
    sol.rank = std::move(a.rank);
    sol.verdict = {sol.system_region[g.initial] ? Player::System : Player::Environment, g.window_relative,
                   g.size(), a.iterations, elapsed_ms(t0)};
    return sol;
}

Solution solve_safety(const GameCore& g) {
    require(g, Variant::ClassicPursuit, "solve_safety");
    const auto t0 = Clock::now();
    Solution sol;
    sol.objective = Objective::Safety;
    const std::vector<StateId> bad = bad_states(g);
    Attractor a = attractor(g.topo, bad, Player::Environment);
    sol.strategy = Strategy(g.size(), 1, {});
    sol.system_region.assign(g.size(), 0);
    for (StateId s = 0; s < g.size(); ++s) {
        sol.system_region[s] = a.in[s] ? 0 : 1;
        if (a.in[s] || g.topo.owner[s] != Player::System) continue;
        for (StateId t : g.topo.successors(s)) {
            if (!a.in[t]) {
                sol.strategy.set_choice(s, 0, t);
                break;
            }
        }
    }
    sol.env_rank = a.rank;
    sol.env_layer.assign(g.size(), kUnranked);
    for (StateId s = 0; s < g.size(); ++s)
        if (a.in[s]) sol.env_layer[s] = 0;
    sol.rank = std::move(a.rank);
    sol.verdict = {sol.system_region[g.initial] ? Player::System : Player::Environment, g.window_relative,
                   g.size(), a.iterations, elapsed_ms(t0)};
    return sol;
}

Solution solve_generalized_buchi(const GameCore& g, const std::vector<AcceptanceSet>& sets) {
    require(g, Variant::SafeZoneLiveness, "solve_generalized_buchi");
    if (sets.empty()) throw ContractViolation("solve_generalized_buchi: no acceptance sets");
    const auto t0 = Clock::now();
    const std::size_t k = sets.size();
    auto accept = acceptance_masks(g, sets);
    const TwoPlayerGraph p = product(g.topo, accept);

    std::vector<StateId> bad;
    for (StateId s : bad_states(g))
        for (std::size_t i = 0; i < k; ++i) bad.push_back(static_cast<StateId>(s * k + i));
    BuchiResult r = solve_buchi_product(p, accepting_product(accept, g.size()), bad);

    Solution sol;
    sol.objective = Objective::GeneralizedBuchi;
    sol.rr_count = k;
    sol.strategy = Strategy(g.size(), k, accept);
    sol.system_region.assign(g.size(), 0);
    for (StateId s = 0; s < g.size(); ++s) sol.system_region[s] = r.env_win[s * k] ? 0 : 1;
    for (StateId v = 0; v < p.size(); ++v) {
        if (p.owner[v] != Player::System || r.env_win[v]) continue;
        const std::uint32_t rk = r.reach.rank[v];
        for (StateId w : p.successors(v)) {
            const bool good = rk == 0 ? !r.env_win[w] : r.reach.rank[w] < rk;
            if (good) {
                sol.strategy.set_choice(static_cast<StateId>(v / k), v % k, static_cast<StateId>(w / k));
                break;
            }
        }
    }
    sol.rank = std::move(r.reach.rank);
    sol.env_layer = std::move(r.env_layer);
    sol.env_rank = std::move(r.env_rank);
    sol.verdict = {sol.system_region[g.initial] ? Player::System : Player::Environment, g.window_relative,
                   g.size(), r.iterations, elapsed_ms(t0)};
    return sol;
}

Solution solve(const GameCore& g) {
    switch (objective_of(g.config.variant)) {
        case Objective::Reachability: return solve_reachability(g);
        case Objective::Safety: return solve_safety(g);
        case Objective::GeneralizedBuchi: return solve_generalized_buchi(g, g.acceptance);
    }
    throw ContractViolation("unknown variant");
}

Regions winning_regions(const GameCore& g) {
    Regions out;
    const std::size_t n = g.size();
    switch (objective_of(g.config.variant)) {
        case Objective::Reachability: {
            out.system = attractor(g.topo, g.capture, Player::System).in;
            out.environment = naive_safe_region(g.topo, to_mask(n, g.capture), Player::Environment);
            break;
        }
        case Objective::Safety: {
            const auto bad = bad_states(g);
            out.environment = attractor(g.topo, bad, Player::Environment).in;
            out.system = naive_safe_region(g.topo, to_mask(n, bad), Player::System);
            break;
        }
        case Objective::GeneralizedBuchi: {
            if (g.acceptance.empty()) throw ContractViolation("winning_regions: no acceptance sets");
            const std::size_t k = g.acceptance.size();
            auto accept = acceptance_masks(g, g.acceptance);
            const TwoPlayerGraph p = product(g.topo, accept);
            const auto accepting = accepting_product(accept, n);
            std::vector<StateId> bad;
            for (StateId s : bad_states(g))
                for (std::size_t i = 0; i < k; ++i) bad.push_back(static_cast<StateId>(s * k + i));
            const BuchiResult r = solve_buchi_product(p, accepting, bad);
            const auto sys = naive_buchi_region(p, to_mask(p.size(), accepting));
            out.system.assign(n, 0);
            out.environment.assign(n, 0);
            for (StateId s = 0; s < n; ++s) {
                out.system[s] = sys[s * k];
                out.environment[s] = r.env_win[s * k];
            }
            break;
        }
    }
    return out;
}

StrategyMachine expand_strategy(const GameCore& g, const Solution& sol) {
    StrategyMachine m;
    std::map<std::pair<StateId, std::size_t>, std::size_t> index;
    std::deque<std::size_t> todo;
    auto intern = [&](StateId v, std::size_t rr) {
        auto [it, fresh] = index.try_emplace({v, rr}, m.states.size());
        if (fresh) {
            m.states.push_back({v, rr});
            todo.push_back(it->second);
        }
        return it->second;
    };
    m.q0 = intern(g.initial, 0);
    const Strategy& st = sol.strategy;

    // System reply from vertex `e` with index `rr`; fills the transition tail.
    auto reply = [&](StrategyMachine::Transition& tr, StateId e, std::size_t rr) {
        if (g.topo.terminal[e] || g.topo.owner[e] != Player::System) return;
        if (auto u = st.choose(e, rr)) {
            tr.sys_vertex = *u;
            tr.to = intern(*u, st.advance(e, rr));
        }
    };

    while (!todo.empty()) {
        const std::size_t qi = todo.front();
        todo.pop_front();
        const ControllerState q = m.states[qi];
        if (g.topo.terminal[q.vertex]) continue;
        if (g.topo.owner[q.vertex] == Player::System) {
            StrategyMachine::Transition tr{qi, std::nullopt, std::nullopt, std::nullopt};
            reply(tr, q.vertex, q.rr);
            m.transitions.push_back(tr);
            continue;
        }
        const std::size_t rr1 = st.advance(q.vertex, q.rr);
        for (StateId e : g.topo.successors(q.vertex)) {
            StrategyMachine::Transition tr{qi, e, std::nullopt, std::nullopt};
            reply(tr, e, rr1);
            m.transitions.push_back(tr);
        }
    }
    return m;
}

}  // namespace cnr
