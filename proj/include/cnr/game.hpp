#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/errors.hpp"
#include "cnr/monitors.hpp"

namespace cnr {

enum class Player : std::uint8_t { Environment, System };

inline Player opponent(Player p) {
    return p == Player::System ? Player::Environment : Player::System;
}
std::string to_string(Player p);

enum class Variant : std::uint8_t { ClassicPursuit, SafeZoneLiveness, CopPursuit };
enum class MoveRule : std::uint8_t { MustMove, AllowStay };
enum class ObligationScope : std::uint8_t { PerRobber, TeamGlobal };
enum class Memory : std::uint8_t { Persistent, Amnesic };

std::string to_string(Variant v);
std::string to_string(MoveRule r);

/// Observation model. `Perfect` ignores every other field.
struct InfoMode {
    enum class Kind : std::uint8_t { Perfect, ZoneOfInterest };

    Kind kind = Kind::Perfect;
    int obs_radius = 1;
    Memory memory = Memory::Persistent;
    bool map_memory = false;
    std::optional<int> info_sharing_radius;

    bool perfect() const { return kind == Kind::Perfect; }
};

struct GameConfig {
    int cop_count = 1;
    int robber_count = 1;
    Team system_team = Team::Robbers;
    Variant variant = Variant::ClassicPursuit;
    MoveRule move_rule = MoveRule::MustMove;
    InfoMode info;
    std::size_t state_cap = 5'000'000;
    /// Who moves from the initial state.
    Player first = Player::Environment;
    ObligationScope obligations = ObligationScope::PerRobber;

    /// Throws InputError on inconsistent settings (variant vs. system team, counts).
    void validate() const;

    Team team_of(Player p) const { return p == Player::System ? system_team : other(system_team); }
    Player player_of(Team t) const { return t == system_team ? Player::System : Player::Environment; }
    bool monitored() const { return variant == Variant::SafeZoneLiveness; }
    /// Number of obligation automata carried in each state.
    int monitor_count() const;
};

struct GameState {
    std::vector<Coord> cops;
    std::vector<Coord> robbers;
    Team mover = Team::Cops;
    std::vector<ObligationState> monitor;
    /// Set once a monitored clause broke; such states are terminal.
    std::optional<Clause> violation;

    friend auto operator<=>(const GameState&, const GameState&) = default;
    friend bool operator==(const GameState&, const GameState&) = default;

    const std::vector<Coord>& team(Team t) const { return t == Team::Cops ? cops : robbers; }
    std::vector<Coord>& team(Team t) { return t == Team::Cops ? cops : robbers; }
};

struct JointMove {
    Team team = Team::Cops;
    std::vector<Coord> destinations;

    friend auto operator<=>(const JointMove&, const JointMove&) = default;
    friend bool operator==(const JointMove&, const JointMove&) = default;
};

/// Orders joint moves by (member index, destination y, destination x).
bool move_less(const JointMove& a, const JointMove& b);

/// Raised by apply_joint_move for a move that breaks a movement rule.
class IllegalMove : public ContractViolation {
public:
    IllegalMove(Clause clause, Team team, const std::string& detail)
        : ContractViolation(clause_name(clause, team) + ": " + detail), clause_(clause), team_(team) {}

    Clause clause() const { return clause_; }
    Team team() const { return team_; }

private:
    Clause clause_;
    Team team_;
};

/// Initial state with fresh obligations; the mover is the team of `cfg.first`.
GameState initial_state(const GameConfig& cfg, std::vector<Coord> cops, std::vector<Coord> robbers);

/// Every legal joint move of `s.mover`, sorted by move_less. Empty means the
/// team is stuck. Works on finite and tiled arenas.
std::vector<JointMove> legal_joint_moves(const Arena& arena, const GameConfig& cfg, const GameState& s);

/// First rule `m` breaks in state `s`, or nullopt when legal.
std::optional<Clause> diagnose_move(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                    const JointMove& m);

/// Moves the team, flips the mover, and steps the obligation monitors when
/// robbers moved. Throws IllegalMove.
GameState apply_joint_move(const Arena& arena, const GameConfig& cfg, const GameState& s,
                           const JointMove& m);

/// A cop shares a non-zone cell with a robber.
bool is_capture(const Arena& arena, const GameState& s);

/// Capture or monitor violation: the play is over.
bool is_terminal(const Arena& arena, const GameState& s);

/// Checks the GameState invariants (no collisions, no walls, no cop in a
/// zone). Returns the first broken clause.
std::optional<Clause> check_state(const Arena& arena, const GameState& s);

}  // namespace cnr
