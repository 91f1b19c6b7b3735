#include "cnr/game.hpp"

#include <algorithm>
#include <set>

namespace cnr {

std::string to_string(Player p) { return p == Player::System ? "System" : "Environment"; }

std::string to_string(Variant v) {
    switch (v) {
        case Variant::ClassicPursuit: return "ClassicPursuit";
        case Variant::SafeZoneLiveness: return "SafeZoneLiveness";
        case Variant::CopPursuit: return "CopPursuit";
    }
    return "?";
}

std::string to_string(MoveRule r) { return r == MoveRule::MustMove ? "MustMove" : "AllowStay"; }

void GameConfig::validate() const {
    if (variant == Variant::SafeZoneLiveness && system_team != Team::Robbers)
        throw InputError("SafeZoneLiveness requires the robbers as system team");
    if (variant == Variant::CopPursuit && system_team != Team::Cops)
        throw InputError("CopPursuit requires the cops as system team");
    if (variant == Variant::ClassicPursuit && system_team != Team::Robbers)
        throw InputError("ClassicPursuit requires the robbers as system team");
    if (robber_count < 1) throw InputError("need at least one robber");
    // A cop-free world only makes sense when the robbers chase zones.
    if (cop_count < (variant == Variant::SafeZoneLiveness ? 0 : 1))
        throw InputError("need at least one cop");
    if (!info.perfect() && info.obs_radius < 1) throw InputError("obsRadius must be >= 1");
    if (info.info_sharing_radius && *info.info_sharing_radius < 0)
        throw InputError("infoSharing radius must be >= 0");
}

int GameConfig::monitor_count() const {
    if (!monitored()) return 0;
    return obligations == ObligationScope::PerRobber ? robber_count : 1;
}

bool move_less(const JointMove& a, const JointMove& b) {
    const std::size_t n = std::min(a.destinations.size(), b.destinations.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Coord& x = a.destinations[i];
        const Coord& y = b.destinations[i];
        if (x.y != y.y) return x.y < y.y;
        if (x.x != y.x) return x.x < y.x;
    }
    return a.destinations.size() < b.destinations.size();
}

GameState initial_state(const GameConfig& cfg, std::vector<Coord> cops, std::vector<Coord> robbers) {
    GameState s;
    s.cops = std::move(cops);
    s.robbers = std::move(robbers);
    s.mover = cfg.team_of(cfg.first);
    s.monitor.assign(static_cast<std::size_t>(cfg.monitor_count()), ObligationState{});
    return s;
}

namespace {

bool contains(const std::vector<Coord>& v, const Coord& c) {
    return std::find(v.begin(), v.end(), c) != v.end();
}

bool geometric_adjacent(const Arena& arena, Coord a, Coord b) {
    if (arena.kind() == Arena::Kind::Graph) {
        const auto& e = arena.edges();
        return std::binary_search(e.begin(), e.end(), std::pair(std::min(a.x, b.x), std::max(a.x, b.x)));
    }
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    if (arena.connectivity() == Connectivity::EightWay) return std::max(dx, dy) == 1;
    return dx + dy == 1;
}

std::vector<Coord> candidates(const Arena& arena, const GameConfig& cfg, const GameState& s,
                              Team team, const Coord& src) {
    std::vector<Coord> out;
    for (const Coord& c : arena.neighbors(src)) {
        if (team == Team::Cops && arena.cell(c).is_zone()) continue;
        if (team == Team::Robbers && contains(s.cops, c)) continue;
        out.push_back(c);
    }
    if (cfg.move_rule == MoveRule::AllowStay) {
        out.push_back(src);
        std::sort(out.begin(), out.end(), [](const Coord& a, const Coord& b) {
            return std::pair(a.y, a.x) < std::pair(b.y, b.x);
        });
    }
    return out;
}

void enumerate(const std::vector<Coord>& src, const std::vector<std::vector<Coord>>& cand,
               std::vector<Coord>& dest, Team team, std::vector<JointMove>& out) {
    const std::size_t k = dest.size();
    if (k == src.size()) {
        out.push_back({team, dest});
        return;
    }
    for (const Coord& c : cand[k]) {
        bool ok = true;
        for (std::size_t j = 0; j < k && ok; ++j) {
            if (dest[j] == c) ok = false;                        // collide
            if (dest[j] == src[k] && c == src[j]) ok = false;    // swap
        }
        if (!ok) continue;
        dest.push_back(c);
        enumerate(src, cand, dest, team, out);
        dest.pop_back();
    }
}

}  // namespace

std::vector<JointMove> legal_joint_moves(const Arena& arena, const GameConfig& cfg, const GameState& s) {
    const auto& src = s.team(s.mover);
    std::vector<std::vector<Coord>> cand;
    cand.reserve(src.size());
    for (const Coord& c : src) cand.push_back(candidates(arena, cfg, s, s.mover, c));
    std::vector<JointMove> out;
    std::vector<Coord> dest;
    enumerate(src, cand, dest, s.mover, out);
    return out;
}

std::optional<Clause> diagnose_move(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    const JointMove& m) {
    if (m.team != s.mover) return Clause::WrongTeam;
    const auto& src = s.team(m.team);
    if (m.destinations.size() != src.size()) return Clause::WrongArity;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Coord& d = m.destinations[i];
        if (!arena.contains(d)) return Clause::NotAdjacent;
        if (arena.cell(d).is_wall()) return Clause::WallCollision;
        if (d == src[i]) {
            if (cfg.move_rule == MoveRule::MustMove) return Clause::StayedPut;
        } else if (!geometric_adjacent(arena, src[i], d)) {
            return Clause::NotAdjacent;
        }
        if (m.team == Team::Cops && arena.cell(d).is_zone()) return Clause::CopEntersSafeZone;
        if (m.team == Team::Robbers && contains(s.cops, d)) return Clause::RobberEntersCop;
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = i + 1; j < src.size(); ++j) {
            if (m.destinations[i] == m.destinations[j]) return Clause::TeamCollision;
            if (m.destinations[i] == src[j] && m.destinations[j] == src[i]) return Clause::TeamSwap;
        }
    }
    return std::nullopt;
}

GameState apply_joint_move(const Arena& arena, const GameConfig& cfg, const GameState& s,
                           const JointMove& m) {
    if (auto bad = diagnose_move(arena, cfg, s, m)) throw IllegalMove(*bad, m.team, "illegal joint move");
    GameState next = s;
    next.team(m.team) = m.destinations;
    next.mover = other(s.mover);
    if (m.team != Team::Robbers || !cfg.monitored() || s.violation) return next;

    if (cfg.obligations == ObligationScope::PerRobber) {
        for (std::size_t r = 0; r < next.robbers.size(); ++r) {
            const MonitorVerdict v = monitor_step(next.monitor[r], arena.cell(next.robbers[r]));
            if (v.violation) {
                if (!next.violation) next.violation = v.violation;
            } else {
                next.monitor[r] = v.next;
            }
        }
    } else {
        CellKind team_cell = CellKind::open();
        for (const Coord& c : next.robbers) {
            if (arena.cell(c).is_zone()) {
                team_cell = arena.cell(c);
                break;
            }
        }
        const MonitorVerdict v = monitor_step(next.monitor.front(), team_cell);
        if (v.violation) next.violation = v.violation;
        else next.monitor.front() = v.next;
    }
    return next;
}

bool is_capture(const Arena& arena, const GameState& s) {
    for (const Coord& r : s.robbers) {
        if (contains(s.cops, r) && !arena.cell(r).is_zone()) return true;
    }
    return false;
}

bool is_terminal(const Arena& arena, const GameState& s) {
    return s.violation.has_value() || is_capture(arena, s);
}

std::optional<Clause> check_state(const Arena& arena, const GameState& s) {
    for (Team t : {Team::Cops, Team::Robbers}) {
        const auto& v = s.team(t);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!arena.contains(v[i]) || arena.cell(v[i]).is_wall()) return Clause::WallCollision;
            if (t == Team::Cops && arena.cell(v[i]).is_zone()) return Clause::CopEntersSafeZone;
            for (std::size_t j = i + 1; j < v.size(); ++j)
                if (v[i] == v[j]) return Clause::TeamCollision;
        }
    }
    return std::nullopt;
}

}  // namespace cnr
