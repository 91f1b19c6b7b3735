#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "cnr/arena.hpp"

namespace cnr {

enum class Team : std::uint8_t { Cops, Robbers };

inline Team other(Team t) { return t == Team::Cops ? Team::Robbers : Team::Cops; }
std::string to_string(Team t);

/// Safety clauses a play can break. The first six are the monitored
/// conjuncts; the rest only show up when diagnosing hand-entered moves.
enum class Clause : std::uint8_t {
    ExitDeadline,
    ReturnBeforeAlternate,
    WallCollision,
    TeamCollision,
    TeamSwap,
    StayedPut,
    NotAdjacent,
    CopEntersSafeZone,
    RobberEntersCop,
    WrongTeam,
    WrongArity,
};

/// Generic clause name ("TeamSwap").
std::string to_string(Clause c);
/// Team-qualified name where one exists ("CopsSwitch", "RobbersCollide").
std::string clause_name(Clause c, Team team);
std::optional<Clause> clause_from_string(const std::string& s);

/// Per-robber obligation automaton state.
///
/// `last_zone` is the zone most recently occupied (the current one while
/// inside). `owes` is set on leaving a zone and cleared on entering any other
/// zone; with two zones that is exactly "must visit the other one next".
struct ObligationState {
    bool owes = false;
    std::uint8_t last_zone = 0;  // 0 = none yet
    std::uint8_t inside = 0;     // consecutive robber turns in the current zone, 0..2

    /// Zone the robber must visit next, when it is unique (zone_count == 2).
    std::optional<int> owed_zone(int zone_count) const;

    friend auto operator<=>(const ObligationState&, const ObligationState&) = default;
};

struct MonitorVerdict {
    ObligationState next;            // meaningful when !violation
    std::optional<Clause> violation; // ExitDeadline or ReturnBeforeAlternate
    int entered_zone = 0;            // zone id entered on this step, 0 if none

    bool ok() const { return !violation.has_value(); }
};

/// Advances one robber's obligations by one robber turn, given the kind of
/// cell it now stands on. Total and deterministic.
MonitorVerdict monitor_step(const ObligationState& o, CellKind robber_cell);

}  // namespace cnr
