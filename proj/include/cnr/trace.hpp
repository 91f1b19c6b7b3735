#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/game.hpp"

namespace cnr {

/// A finite play, or a lasso when `cycle_start` is set: the last state then
/// repeats states[*cycle_start].
struct Trace {
    std::vector<GameState> states;
    std::optional<std::size_t> cycle_start;
};

enum class Liveness : std::uint8_t { NotApplicable, Undetermined, Satisfied, Violated };
std::string to_string(Liveness l);

struct TraceVerdict {
    struct Violation {
        std::size_t index;   // state index where the clause first fails
        std::string clause;  // team-qualified clause name, or "RobberCaught"
    };
    std::optional<Violation> violation;
    /// Move number at which a robber was caught. Cornering counts: a robber
    /// team stuck at state k is caught at step k + 1.
    std::optional<std::size_t> capture_step;
    bool cornered = false;
    /// Cop team had no legal move in the final state.
    bool cops_stuck = false;
    Liveness liveness = Liveness::NotApplicable;
    /// Acceptance sets the lasso cycle never visits.
    std::vector<std::string> unmet;

    bool clean() const { return !violation && liveness != Liveness::Violated; }
    std::string summary() const;
};

/// Replays `trace` through the movement rules and the obligation monitors.
/// Monitor fields stored in the trace are ignored and recomputed. Throws
/// InputError on malformed traces: wrong team sizes, both teams moving,
/// non-adjacent steps, play continuing past a terminal state, or a lasso
/// whose end does not match its cycle start.
TraceVerdict check_trace(const Arena& arena, const GameConfig& cfg, const Trace& trace);

/// Names of the acceptance sets tracked for `cfg` ("SZ1Visit_r0", ...).
std::vector<std::string> acceptance_names(const GameConfig& cfg, int zone_count);

}  // namespace cnr
