#include "cnr/trace.hpp"

#include "cnr/errors.hpp"

namespace cnr {

std::string to_string(Liveness l) {
    switch (l) {
        case Liveness::NotApplicable: return "n/a";
        case Liveness::Undetermined: return "undetermined";
        case Liveness::Satisfied: return "satisfied";
        case Liveness::Violated: return "violated";
    }
    return "?";
}

std::vector<std::string> acceptance_names(const GameConfig& cfg, int zone_count) {
    std::vector<std::string> out;
    if (!cfg.monitored()) return out;
    const bool team = cfg.obligations == ObligationScope::TeamGlobal;
    const int groups = team ? 1 : cfg.robber_count;
    for (int r = 0; r < groups; ++r)
        for (int k = 1; k <= zone_count; ++k)
            out.push_back("SZ" + std::to_string(k) + "Visit_" + (team ? std::string("team") : "r" + std::to_string(r)));
    return out;
}

std::string TraceVerdict::summary() const {
    std::string s;
    if (violation) s = "violation " + violation->clause + " at state " + std::to_string(violation->index);
    else s = "clean";
    if (capture_step)
        s += std::string("; robber captured at step ") + std::to_string(*capture_step) + (cornered ? " (cornered)" : "");
    if (cops_stuck) s += "; cops stuck";
    s += "; liveness " + to_string(liveness);
    for (std::size_t i = 0; i < unmet.size(); ++i) s += (i ? ", " : " (unmet: ") + unmet[i];
    if (!unmet.empty()) s += ")";
    return s;
}

namespace {

Team offending_team(const Arena& arena, const GameState& s, Clause c) {
    if (c == Clause::CopEntersSafeZone) return Team::Cops;
    for (Team t : {Team::Cops, Team::Robbers}) {
        GameState probe;
        probe.team(t) = s.team(t);
        if (check_state(arena, probe) == c) return t;
    }
    return s.mover;
}

bool same_positions(const GameState& a, const GameState& b) {
    return a.cops == b.cops && a.robbers == b.robbers && a.mover == b.mover;
}

}  // namespace

TraceVerdict check_trace(const Arena& arena, const GameConfig& cfg, const Trace& trace) {
    TraceVerdict out;
    if (trace.states.empty()) throw InputError("empty trace");
    const std::size_t n = trace.states.size();
    if (trace.cycle_start && *trace.cycle_start + 1 >= n)
        throw InputError("cycleStart " + std::to_string(*trace.cycle_start) + " out of range");
    for (std::size_t i = 0; i < n; ++i) {
        const GameState& s = trace.states[i];
        if (s.cops.size() != static_cast<std::size_t>(cfg.cop_count) ||
            s.robbers.size() != static_cast<std::size_t>(cfg.robber_count))
            throw InputError("state " + std::to_string(i) + " has the wrong number of agents");
    }

    const bool robbers_system = cfg.system_team == Team::Robbers;
    auto fail = [&](std::size_t i, std::string clause) {
        out.violation = TraceVerdict::Violation{i, std::move(clause)};
        return out;
    };

    GameState cur = initial_state(cfg, trace.states[0].cops, trace.states[0].robbers);
    cur.mover = trace.states[0].mover;
    if (auto c = check_state(arena, cur)) return fail(0, clause_name(*c, offending_team(arena, cur, *c)));
    // Replayed states, kept to compare monitors at the lasso point.
    std::vector<GameState> replay{cur};

    for (std::size_t i = 1; i < n; ++i) {
        if (is_terminal(arena, cur)) throw InputError("trace continues past the terminal state " + std::to_string(i - 1));
        const GameState& next = trace.states[i];
        const Team mover = cur.mover;
        if (next.mover != other(mover))
            throw InputError("state " + std::to_string(i) + ": turns do not alternate");
        if (next.team(other(mover)) != cur.team(other(mover)))
            throw InputError("state " + std::to_string(i) + ": the non-moving team changed position");
        GameState probe = cur;
        probe.team(mover) = next.team(mover);
        if (auto c = check_state(arena, probe)) return fail(i, clause_name(*c, offending_team(arena, probe, *c)));
        const JointMove m{mover, next.team(mover)};
        if (auto c = diagnose_move(arena, cfg, cur, m)) {
            if (*c == Clause::NotAdjacent)
                throw InputError("state " + std::to_string(i) + ": non-adjacent step from the previous state");
            return fail(i, clause_name(*c, mover));
        }
        cur = apply_joint_move(arena, cfg, cur, m);
        replay.push_back(cur);
        if (cur.violation) return fail(i, clause_name(*cur.violation, Team::Robbers));
        if (is_capture(arena, cur)) {
            out.capture_step = i;
            if (robbers_system) return fail(i, "RobberCaught");
        }
    }

    if (!is_terminal(arena, cur) && legal_joint_moves(arena, cfg, cur).empty()) {
        if (cur.mover == Team::Robbers) {
            out.capture_step = n;
            out.cornered = true;
            if (robbers_system) return fail(n - 1, "RobberCaught");
        } else {
            out.cops_stuck = true;
        }
    }

    if (trace.cycle_start) {
        const std::size_t k = *trace.cycle_start;
        if (!same_positions(replay[k], replay.back()) || replay[k].monitor != replay.back().monitor)
            throw InputError("final state does not repeat the state at cycleStart " + std::to_string(k));
    }

    if (!cfg.monitored()) return out;
    if (!trace.cycle_start || is_terminal(arena, cur)) {
        out.liveness = Liveness::Undetermined;
        return out;
    }
    const std::vector<std::string> names = acceptance_names(cfg, arena.zone_count());
    const bool team = cfg.obligations == ObligationScope::TeamGlobal;
    const int zones = arena.zone_count();
    std::vector<bool> seen(names.size(), false);
    for (std::size_t i = *trace.cycle_start; i < n; ++i) {
        const GameState& s = replay[i];
        for (std::size_t r = 0; r < s.robbers.size(); ++r) {
            const int z = arena.cell(s.robbers[r]).zone;
            if (z == 0) continue;
            const std::size_t group = team ? 0 : r;
            seen[group * static_cast<std::size_t>(zones) + static_cast<std::size_t>(z - 1)] = true;
        }
    }
    for (std::size_t j = 0; j < names.size(); ++j)
        if (!seen[j]) out.unmet.push_back(names[j]);
    out.liveness = out.unmet.empty() ? Liveness::Satisfied : Liveness::Violated;
    return out;
}

}  // namespace cnr
