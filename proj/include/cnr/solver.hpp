#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cnr/graph.hpp"

namespace cnr {

inline constexpr std::uint32_t kUnranked = std::numeric_limits<std::uint32_t>::max();

struct Verdict {
    Player winner = Player::Environment;
    bool window_relative = false;
    std::size_t states = 0;
    std::size_t iterations = 0;
    double ms = 0;
};

/// Result of one attractor computation. `rank[s]` is the fixpoint iteration
/// at which s entered (0 for the target), kUnranked outside.
struct Attractor {
    std::vector<std::uint8_t> in;
    std::vector<std::uint32_t> rank;
    std::size_t iterations = 0;

    bool contains(StateId s) const { return in[s] != 0; }
};

/// Least set containing `target`, closed under: `player` vertices with some
/// successor inside, opponent vertices whose successors are all inside
/// (stuck opponent vertices included). Terminal vertices only enter through
/// `target`; vertices flagged in `blocked` never enter. Worklist with
/// per-vertex successor counters, O(|E|).
Attractor attractor(const TwoPlayerGraph& g, std::span<const StateId> target, Player player,
                    const std::vector<std::uint8_t>* blocked = nullptr);

enum class Objective : std::uint8_t { Reachability, Safety, GeneralizedBuchi };

Objective objective_of(Variant v);

/// Finite-memory controller for the system team: memory is the round-robin
/// index over acceptance sets (always 0 for reachability and safety).
///
/// Product vertex (s, i) advances its index when s is in acceptance set i;
/// `choice` names the game successor the system plays from a system vertex.
class Strategy {
public:
    Strategy() = default;
    Strategy(std::size_t states, std::size_t rr_count, std::vector<std::vector<std::uint8_t>> accept);

    std::size_t rr_count() const { return rr_count_; }
    std::size_t state_count() const { return states_; }

    /// Index after leaving s with index rr.
    std::size_t advance(StateId s, std::size_t rr) const;
    /// Successor chosen at system vertex s under index rr, if s is winning.
    std::optional<StateId> choose(StateId s, std::size_t rr) const;
    void set_choice(StateId s, std::size_t rr, StateId t);

private:
    std::size_t states_ = 0;
    std::size_t rr_count_ = 1;
    std::vector<std::vector<std::uint8_t>> accept_;
    std::vector<StateId> choice_;  // kNoChoice when undefined
};

/// Winning regions and ranks of a solved game, kept around so that
/// adversary policies can play against the same analysis.
struct Solution {
    Verdict verdict;
    Objective objective = Objective::Reachability;
    /// Per game vertex: winning for the system (with round-robin index 0).
    std::vector<std::uint8_t> system_region;
    /// Per product vertex (s * rr_count + i): distance rank toward the
    /// system's goal. Reachability: attractor rank to capture. Büchi: rank
    /// toward the next accepting product vertex. Safety: rank of the
    /// environment's attractor to the bad states (kUnranked inside the safe region).
    std::vector<std::uint32_t> rank;
    std::size_t rr_count = 1;
    /// Per product vertex inside the environment's winning region: the
    /// fixpoint round it was won in and its attractor rank within that round
    /// (kUnranked outside). The environment wins by moving to a successor
    /// with a smaller (layer, rank) pair, or, at rank 0, to any successor
    /// whose layer is not larger.
    std::vector<std::uint32_t> env_layer;
    std::vector<std::uint32_t> env_rank;
    Strategy strategy;

    bool system_wins(StateId s) const { return system_region[s] != 0; }
};

/// Cops as system: F capture. Throws ContractViolation on any other variant.
Solution solve_reachability(const GameCore& g);
/// Robbers as system, ClassicPursuit: G not(capture or violation).
Solution solve_safety(const GameCore& g);
/// Robbers as system, SafeZoneLiveness: avoid capture and violations and
/// visit every set infinitely often. Degeneralized with a round-robin counter.
Solution solve_generalized_buchi(const GameCore& g, const std::vector<AcceptanceSet>& sets);
/// Dispatch on g.config.variant.
Solution solve(const GameCore& g);

/// Winning regions computed separately from each player's point of view,
/// with fixpoint code independent of attractor(): the system side of
/// reachability and the environment side of safety and Büchi use the
/// worklist solver, the other side uses naive sweeps. Determinacy means the
/// two sets partition the vertices.
struct Regions {
    std::vector<std::uint8_t> system;
    std::vector<std::uint8_t> environment;
};
Regions winning_regions(const GameCore& g);

/// One controller state of the expanded strategy tuple.
struct ControllerState {
    StateId vertex;  // environment vertex (or the system vertex at the start)
    std::size_t rr;
};

/// The strategy unrolled into an explicit ⟨Q, q0, δ, o⟩ over the vertices
/// reachable when the system follows it. Each transition is keyed by the
/// environment's successor vertex and yields the system's reply vertex.
struct StrategyMachine {
    struct Transition {
        std::size_t from;
        std::optional<StateId> env_vertex;  // empty for the opening system move
        std::optional<StateId> sys_vertex;  // empty when the play ended
        std::optional<std::size_t> to;
    };
    std::vector<ControllerState> states;
    std::size_t q0 = 0;
    std::vector<Transition> transitions;
};

StrategyMachine expand_strategy(const GameCore& g, const Solution& sol);

}  // namespace cnr
