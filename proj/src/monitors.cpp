#include "cnr/monitors.hpp"

#include <array>

namespace cnr {

std::string to_string(Team t) { return t == Team::Cops ? "Cops" : "Robbers"; }

namespace {

constexpr std::array<const char*, 11> kClauseNames = {
    "ExitDeadline",      "ReturnBeforeAlternate", "WallCollision", "TeamCollision",
    "TeamSwap",          "StayedPut",             "NotAdjacent",   "CopEntersSafeZone",
    "RobberEntersCop",   "WrongTeam",             "WrongArity",
};

}  // namespace

std::string to_string(Clause c) { return kClauseNames[static_cast<std::size_t>(c)]; }

std::string clause_name(Clause c, Team team) {
    const bool cops = team == Team::Cops;
    switch (c) {
        case Clause::TeamSwap: return cops ? "CopsSwitch" : "RobbersSwitch";
        case Clause::TeamCollision: return cops ? "CopsCollide" : "RobbersCollide";
        default: return to_string(c);
    }
}

std::optional<Clause> clause_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kClauseNames.size(); ++i)
        if (s == kClauseNames[i]) return static_cast<Clause>(i);
    if (s == "CopsSwitch" || s == "RobbersSwitch") return Clause::TeamSwap;
    if (s == "CopsCollide" || s == "RobbersCollide") return Clause::TeamCollision;
    return std::nullopt;
}

std::optional<int> ObligationState::owed_zone(int zone_count) const {
    if (!owes || zone_count != 2) return std::nullopt;
    return last_zone == 1 ? 2 : 1;
}

MonitorVerdict monitor_step(const ObligationState& o, CellKind robber_cell) {
    MonitorVerdict v{o, std::nullopt, 0};
    if (!robber_cell.is_zone()) {
        if (o.inside > 0) {
            v.next.owes = true;
            v.next.inside = 0;
        }
        return v;
    }

    const int z = robber_cell.zone;
    if (o.inside > 0 && z == o.last_zone) {
        if (o.inside >= 2) {
            v.violation = Clause::ExitDeadline;
            return v;
        }
        v.next.inside = static_cast<std::uint8_t>(o.inside + 1);
        return v;
    }

    // Entering z, from open ground or straight out of a neighbouring zone.
    const bool owes = o.inside > 0 ? true : o.owes;
    if (owes && z == o.last_zone) {
        v.violation = Clause::ReturnBeforeAlternate;
        return v;
    }
    v.next.owes = false;
    v.next.last_zone = static_cast<std::uint8_t>(z);
    v.next.inside = 1;
    v.entered_zone = z;
    return v;
}

}  // namespace cnr
