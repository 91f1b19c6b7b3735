#include "cnr/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <sstream>

namespace cnr {

StateId TwoPlayerGraph::add_vertex(Player p, bool is_terminal) {
    owner.push_back(p);
    terminal.push_back(is_terminal ? 1 : 0);
    return static_cast<StateId>(owner.size() - 1);
}

void TwoPlayerGraph::finalize() {
    const std::size_t n = size();
    pred_offsets.assign(n + 1, 0);
    for (StateId t : succ) ++pred_offsets[t + 1];
    for (std::size_t i = 0; i < n; ++i) pred_offsets[i + 1] += pred_offsets[i];
    pred.assign(succ.size(), 0);
    std::vector<std::uint32_t> fill(pred_offsets.begin(), pred_offsets.end() - 1);
    for (StateId s = 0; s < n; ++s)
        for (StateId t : successors(s)) pred[fill[t]++] = s;
}

namespace {

constexpr int kMaxAgents = 8;
constexpr double kDenseLimit = double(1u << 25);

int violation_code(const std::optional<Clause>& v) {
    if (!v) return 0;
    return *v == Clause::ExitDeadline ? 1 : 2;
}

std::optional<Clause> violation_from_code(int c) {
    if (c == 0) return std::nullopt;
    return c == 1 ? Clause::ExitDeadline : Clause::ReturnBeforeAlternate;
}

}  // namespace

StateCodec::StateCodec(const Arena& arena, const GameConfig& cfg)
    : arena_(&arena),
      cops_(cfg.cop_count),
      robbers_(cfg.robber_count),
      monitors_(cfg.monitor_count()),
      zones_(arena.zone_count()),
      cells_(static_cast<std::uint64_t>(arena.cell_count())),
      monitor_base_(static_cast<std::uint64_t>(2 * (arena.zone_count() + 1) * 3)) {
    if (!arena.finite()) throw ContractViolation("game graphs need a finite arena");
    if (cops_ + robbers_ > 2 * kMaxAgents || cops_ > kMaxAgents || robbers_ > kMaxAgents)
        throw ContractViolation("at most 8 agents per team");
    key_space_ = std::pow(double(cells_), cops_ + robbers_) * 2.0 *
                 std::pow(double(monitor_base_), monitors_) * 3.0;
    if (key_space_ >= 0x1p63)
        throw CapExceeded("state encoding does not fit in 64 bits", 0);
}

std::uint64_t StateCodec::encode(const GameState& s) const {
    std::uint64_t key = 0;
    // Most significant first: cops, robbers, mover, monitors, violation.
    for (const Coord& c : s.cops) key = key * cells_ + static_cast<std::uint64_t>(arena_->index(c));
    for (const Coord& c : s.robbers) key = key * cells_ + static_cast<std::uint64_t>(arena_->index(c));
    key = key * 2 + (s.mover == Team::Cops ? 0 : 1);
    for (const ObligationState& o : s.monitor) {
        const std::uint64_t m = ((o.owes ? 1u : 0u) * static_cast<std::uint64_t>(zones_ + 1) + o.last_zone) * 3 + o.inside;
        key = key * monitor_base_ + m;
    }
    return key * 3 + static_cast<std::uint64_t>(violation_code(s.violation));
}

GameState StateCodec::decode(std::uint64_t key) const {
    GameState s;
    s.violation = violation_from_code(static_cast<int>(key % 3));
    key /= 3;
    s.monitor.resize(static_cast<std::size_t>(monitors_));
    for (int i = monitors_ - 1; i >= 0; --i) {
        std::uint64_t m = key % monitor_base_;
        key /= monitor_base_;
        ObligationState& o = s.monitor[static_cast<std::size_t>(i)];
        o.inside = static_cast<std::uint8_t>(m % 3);
        m /= 3;
        o.last_zone = static_cast<std::uint8_t>(m % static_cast<std::uint64_t>(zones_ + 1));
        o.owes = m / static_cast<std::uint64_t>(zones_ + 1) != 0;
    }
    s.mover = key % 2 == 0 ? Team::Cops : Team::Robbers;
    key /= 2;
    s.robbers.resize(static_cast<std::size_t>(robbers_));
    for (int i = robbers_ - 1; i >= 0; --i) {
        s.robbers[static_cast<std::size_t>(i)] = arena_->coord(static_cast<int>(key % cells_));
        key /= cells_;
    }
    s.cops.resize(static_cast<std::size_t>(cops_));
    for (int i = cops_ - 1; i >= 0; --i) {
        s.cops[static_cast<std::size_t>(i)] = arena_->coord(static_cast<int>(key % cells_));
        key /= cells_;
    }
    return s;
}

/// Allocation-free expansion on dense cell indices. Mirrors the rules of
/// legal_joint_moves/apply_joint_move; the unit tests check that they agree.
class GraphBuilder {
public:
    GraphBuilder(const Arena& arena, const GameConfig& cfg, GameGraph& g)
        : arena_(arena), cfg_(cfg), g_(g), codec_(g.codec_) {
        const int n = arena.cell_count();
        zone_of_.resize(static_cast<std::size_t>(n));
        options_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            zone_of_[static_cast<std::size_t>(i)] = arena.cell_at(i).zone;
            auto& opts = options_[static_cast<std::size_t>(i)];
            opts.assign(arena.adjacent(i).begin(), arena.adjacent(i).end());
            if (cfg.move_rule == MoveRule::AllowStay) {
                opts.push_back(i);
                std::sort(opts.begin(), opts.end(), [&](int a, int b) {
                    const Coord ca = arena.coord(a), cb = arena.coord(b);
                    return std::pair(ca.y, ca.x) < std::pair(cb.y, cb.x);
                });
            }
        }
    }

    void run(const GameState& init) {
        g_.initial = intern(raw_of(init));
        for (StateId id = 0; id < g_.keys_.size(); ++id) {
            Raw r = unpack(g_.keys_[id]);
            if (!g_.topo.terminal[id]) expand(r);
            g_.topo.end_vertex();
        }
        g_.topo.finalize();
    }

private:
    struct Raw {
        std::array<int, kMaxAgents> cop{};
        std::array<int, kMaxAgents> rob{};
        Team mover = Team::Cops;
        std::array<ObligationState, kMaxAgents> mon{};
        int violation = 0;
    };

    Raw raw_of(const GameState& s) const {
        Raw r;
        for (std::size_t i = 0; i < s.cops.size(); ++i) r.cop[i] = arena_.index(s.cops[i]);
        for (std::size_t i = 0; i < s.robbers.size(); ++i) r.rob[i] = arena_.index(s.robbers[i]);
        r.mover = s.mover;
        for (std::size_t i = 0; i < s.monitor.size(); ++i) r.mon[i] = s.monitor[i];
        r.violation = violation_code(s.violation);
        return r;
    }

    std::uint64_t pack(const Raw& r) const {
        const std::uint64_t cells = codec_.cells_;
        std::uint64_t key = 0;
        for (int i = 0; i < codec_.cops_; ++i) key = key * cells + static_cast<std::uint64_t>(r.cop[static_cast<std::size_t>(i)]);
        for (int i = 0; i < codec_.robbers_; ++i) key = key * cells + static_cast<std::uint64_t>(r.rob[static_cast<std::size_t>(i)]);
        key = key * 2 + (r.mover == Team::Cops ? 0 : 1);
        const auto zp1 = static_cast<std::uint64_t>(codec_.zones_ + 1);
        for (int i = 0; i < codec_.monitors_; ++i) {
            const ObligationState& o = r.mon[static_cast<std::size_t>(i)];
            key = key * codec_.monitor_base_ + ((o.owes ? 1u : 0u) * zp1 + o.last_zone) * 3 + o.inside;
        }
        return key * 3 + static_cast<std::uint64_t>(r.violation);
    }

    Raw unpack(std::uint64_t key) const { return raw_of(codec_.decode(key)); }

    bool captured(const Raw& r) const {
        for (int i = 0; i < codec_.cops_; ++i)
            for (int j = 0; j < codec_.robbers_; ++j)
                if (r.cop[static_cast<std::size_t>(i)] == r.rob[static_cast<std::size_t>(j)]) return true;
        return false;
    }

    StateId intern(const Raw& r) {
        const std::uint64_t key = pack(r);
        if (!g_.dense_.empty()) {
            StateId& slot = g_.dense_[key];
            if (slot != 0) return slot - 1;
            slot = static_cast<StateId>(g_.keys_.size()) + 1;
        } else {
            auto [it, fresh] = g_.sparse_.try_emplace(key, static_cast<StateId>(g_.keys_.size()));
            if (!fresh) return it->second;
        }
        if (g_.keys_.size() >= cfg_.state_cap)
            throw CapExceeded("state cap of " + std::to_string(cfg_.state_cap) + " exceeded",
                              g_.keys_.size() + 1);
        const StateId id = static_cast<StateId>(g_.keys_.size());
        g_.keys_.push_back(key);
        const bool cap = captured(r);
        const bool terminal = cap || r.violation != 0;
        g_.topo.add_vertex(cfg_.player_of(r.mover), terminal);
        if (cap) g_.capture.push_back(id);
        if (r.violation != 0) g_.violation.push_back(id);
        return id;
    }

    void expand(const Raw& r) {
        const bool cops = r.mover == Team::Cops;
        const int members = cops ? codec_.cops_ : codec_.robbers_;
        src_ = cops ? r.cop : r.rob;
        base_ = r;
        members_ = members;
        recurse(0);
    }

    void recurse(int k) {
        const bool cops = base_.mover == Team::Cops;
        if (k == members_) {
            emit();
            return;
        }
        for (int c : options_[static_cast<std::size_t>(src_[static_cast<std::size_t>(k)])]) {
            if (cops && zone_of_[static_cast<std::size_t>(c)] != 0) continue;
            if (!cops) {
                bool on_cop = false;
                for (int i = 0; i < codec_.cops_; ++i) on_cop |= base_.cop[static_cast<std::size_t>(i)] == c;
                if (on_cop) continue;
            }
            bool ok = true;
            for (int j = 0; j < k && ok; ++j) {
                const int dj = dest_[static_cast<std::size_t>(j)];
                if (dj == c) ok = false;
                if (dj == src_[static_cast<std::size_t>(k)] && c == src_[static_cast<std::size_t>(j)]) ok = false;
            }
            if (!ok) continue;
            dest_[static_cast<std::size_t>(k)] = c;
            recurse(k + 1);
        }
    }

    void emit() {
        Raw next = base_;
        const bool cops = base_.mover == Team::Cops;
        for (int i = 0; i < members_; ++i) {
            if (cops) next.cop[static_cast<std::size_t>(i)] = dest_[static_cast<std::size_t>(i)];
            else next.rob[static_cast<std::size_t>(i)] = dest_[static_cast<std::size_t>(i)];
        }
        next.mover = cops ? Team::Robbers : Team::Cops;
        if (!cops && codec_.monitors_ > 0) step_monitors(next);
        g_.topo.add_edge(intern(next));
    }

    void step_monitors(Raw& next) const {
        auto kind = [&](int cell) {
            const int z = zone_of_[static_cast<std::size_t>(cell)];
            return z ? CellKind::safe_zone(z) : CellKind::open();
        };
        if (cfg_.obligations == ObligationScope::PerRobber) {
            for (int r = 0; r < codec_.robbers_; ++r) {
                const auto ri = static_cast<std::size_t>(r);
                const MonitorVerdict v = monitor_step(next.mon[ri], kind(next.rob[ri]));
                if (v.violation) {
                    if (next.violation == 0) next.violation = violation_code(v.violation);
                } else {
                    next.mon[ri] = v.next;
                }
            }
        } else {
            CellKind team_cell = CellKind::open();
            for (int r = 0; r < codec_.robbers_; ++r) {
                const int z = zone_of_[static_cast<std::size_t>(next.rob[static_cast<std::size_t>(r)])];
                if (z) {
                    team_cell = CellKind::safe_zone(z);
                    break;
                }
            }
            const MonitorVerdict v = monitor_step(next.mon[0], team_cell);
            if (v.violation) next.violation = violation_code(v.violation);
            else next.mon[0] = v.next;
        }
    }

    const Arena& arena_;
    const GameConfig& cfg_;
    GameGraph& g_;
    const StateCodec& codec_;
    std::vector<int> zone_of_;
    std::vector<std::vector<int>> options_;
    Raw base_;
    std::array<int, kMaxAgents> src_{};
    std::array<int, kMaxAgents> dest_{};
    int members_ = 0;
};

GameGraph build_game_graph(const Arena& arena, const GameConfig& cfg, const GameState& init) {
    cfg.validate();
    if (static_cast<int>(init.cops.size()) != cfg.cop_count ||
        static_cast<int>(init.robbers.size()) != cfg.robber_count ||
        static_cast<int>(init.monitor.size()) != cfg.monitor_count())
        throw ContractViolation("initial state does not match the configured team sizes");
    if (auto bad = check_state(arena, init))
        throw ContractViolation("initial state breaks " + to_string(*bad));

    GameGraph g;
    g.config = cfg;
    g.arena_ = &arena;
    g.codec_ = StateCodec(arena, cfg);
    if (g.codec_.key_space() <= kDenseLimit)
        g.dense_.assign(static_cast<std::size_t>(g.codec_.key_space()), 0);
    else
        g.sparse_.reserve(std::min<std::size_t>(cfg.state_cap, 1u << 20));

    GraphBuilder(arena, cfg, g).run(init);

    if (cfg.monitored()) {
        const int zones = arena.zone_count();
        const bool team = cfg.obligations == ObligationScope::TeamGlobal;
        const int groups = team ? 1 : cfg.robber_count;
        for (int r = 0; r < groups; ++r) {
            for (int k = 1; k <= zones; ++k) {
                AcceptanceSet set;
                set.name = "SZ" + std::to_string(k) + "Visit_" + (team ? std::string("team") : "r" + std::to_string(r));
                for (StateId s = 0; s < g.size(); ++s) {
                    if (g.topo.terminal[s]) continue;
                    const GameState st = g.state(s);
                    bool in = false;
                    for (int q = 0; q < cfg.robber_count; ++q) {
                        if (!team && q != r) continue;
                        in |= arena.cell(st.robbers[static_cast<std::size_t>(q)]).zone == k;
                    }
                    if (in) set.members.push_back(s);
                }
                g.acceptance.push_back(std::move(set));
            }
        }
    }
    return g;
}

std::optional<StateId> GameGraph::find(const GameState& s) const {
    if (s.cops.size() != config.cop_count + 0u || s.robbers.size() != config.robber_count + 0u ||
        s.monitor.size() != static_cast<std::size_t>(config.monitor_count()))
        return std::nullopt;
    for (const Coord& c : s.cops)
        if (!arena_->contains(c)) return std::nullopt;
    for (const Coord& c : s.robbers)
        if (!arena_->contains(c)) return std::nullopt;
    const std::uint64_t key = codec_.encode(s);
    if (!dense_.empty()) {
        if (key >= dense_.size() || dense_[key] == 0) return std::nullopt;
        return dense_[key] - 1;
    }
    auto it = sparse_.find(key);
    if (it == sparse_.end()) return std::nullopt;
    return it->second;
}

JointMove GameGraph::move(StateId from, StateId to) const {
    const GameState a = state(from);
    const GameState b = state(to);
    return {a.mover, b.team(a.mover)};
}

std::optional<StateId> GameGraph::successor_by_move(StateId from, const JointMove& m) const {
    for (StateId t : topo.successors(from))
        if (move(from, t) == m) return t;
    return std::nullopt;
}

std::string dump_graph(const GameGraph& g) {
    std::ostringstream os;
    for (StateId s = 0; s < g.size(); ++s) {
        const GameState st = g.state(s);
        os << s << ' ' << (g.topo.owner[s] == Player::System ? 'S' : 'E');
        for (const Coord& c : st.cops) os << " c" << to_string(c);
        for (const Coord& c : st.robbers) os << " r" << to_string(c);
        for (const ObligationState& o : st.monitor)
            os << " m[" << (o.owes ? 1 : 0) << ',' << int(o.last_zone) << ',' << int(o.inside) << ']';
        if (std::binary_search(g.capture.begin(), g.capture.end(), s)) os << " capture";
        if (st.violation) os << " violation:" << to_string(*st.violation);
        if (g.topo.stuck(s)) os << " stuck";
        if (s == g.initial) os << " initial";
        os << '\n';
    }
    return os.str();
}

}  // namespace cnr
