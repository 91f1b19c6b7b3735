#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/game.hpp"
#include "cnr/graph.hpp"
#include "cnr/sim.hpp"
#include "cnr/solver.hpp"

namespace cnr {

/// Opponent positions seen by a team: (member index, cell), sorted.
using Sighting = std::vector<std::pair<int, Coord>>;

/// Opponents within `radius` of any of `sources`.
Sighting sight(const Arena& arena, const std::vector<Coord>& sources, const std::vector<Coord>& opponents,
               int radius);

/// What a team sees of a state. `sources` are the members whose view is
/// included (the whole team unless views are per member).
struct Observation {
    Team observer = Team::Cops;
    int radius = 1;
    std::vector<Coord> own;
    std::vector<Coord> sources;
    /// Cells within `radius` (Manhattan, or hops on graph arenas) of a source,
    /// plus every safe-zone cell; sorted by (y, x).
    std::vector<std::pair<Coord, CellKind>> cells;
    Sighting opponents;

    bool sees(const Arena& arena, Coord c) const;
    std::vector<Coord> walls() const;
};

/// Team-wide observation: every member's view.
Observation observe(const Arena& arena, const GameState& s, Team team, int radius);

/// View of one member. With `sharing_radius`, members within that distance
/// of `member` contribute their views as well (not transitively).
Observation observe_member(const Arena& arena, const GameState& s, Team team, int member, int radius,
                           std::optional<int> sharing_radius);

using Config = std::vector<Coord>;

struct BeliefState {
    Team observer = Team::Cops;
    std::vector<Coord> own;
    std::set<Config> opponents;
    std::set<Coord> known_walls;
    Memory memory = Memory::Persistent;
    bool map_memory = false;

    bool contains(const Config& c) const { return opponents.count(c) != 0; }
};

/// Belief holding exactly the true opponent configuration of `s`.
BeliefState initial_belief(const Arena& arena, const GameConfig& cfg, const GameState& s, Team observer,
                           const Observation& obs);

/// Every opponent placement on legal cells, off the observer's cells, that
/// agrees with `obs`. Throws CapExceeded past `cap` placements.
std::set<Config> consistent_placements(const Arena& arena, const GameConfig& cfg, const Observation& obs,
                                       std::size_t cap = 1'000'000);

/// One observation step. When the observer's team moved, configurations are
/// only filtered (captured ones dropped); when the opponent moved, the
/// persistent belief is first pushed through every legal opponent move.
/// Amnesic beliefs are rebuilt from `obs` alone. Walls are remembered across
/// steps only with map_memory. Throws ContractViolation if the belief
/// becomes empty.
BeliefState update_belief(const Arena& arena, const GameConfig& cfg, const BeliefState& b, const Observation& obs,
                          Team moved);

struct KnowledgeSpec {
    GameConfig base;
    int obs_radius = 1;
    Memory memory = Memory::Persistent;
    std::size_t belief_cap = 10'000;
};

/// Perfect-information game over (own positions, own monitors, turn, belief)
/// for the system team, against an omniscient environment. Capture and
/// violation are collapsed into two sink vertices.
class KnowledgeGame : public GameCore {
public:
    struct Vertex {
        std::vector<Coord> own;
        std::vector<ObligationState> monitor;
        Team mover = Team::Cops;
        std::uint32_t belief = 0;
        friend auto operator<=>(const Vertex&, const Vertex&) = default;
    };

    const Vertex& vertex(StateId s) const { return vertices_[s]; }
    const std::vector<Config>& belief(std::uint32_t id) const { return beliefs_[id]; }
    std::size_t belief_count() const { return beliefs_.size(); }
    bool is_sink(StateId s) const { return s < 2; }
    static constexpr StateId kCaptureSink = 0;
    static constexpr StateId kViolationSink = 1;

    /// System joint move along a system edge.
    JointMove move(StateId from, StateId to) const;
    /// Successor of environment vertex `v` once the system saw `after_own`
    /// (right after its move) and `after_env` (after the reply).
    std::optional<StateId> env_successor(StateId v, const Sighting& after_own, const Sighting& after_env) const;
    const Arena& arena() const { return *arena_; }
    int obs_radius() const { return radius_; }

private:
    friend class KnowledgeBuilder;
    friend KnowledgeGame build_knowledge_game(const Arena&, const KnowledgeSpec&, const GameState&);
    const Arena* arena_ = nullptr;
    int radius_ = 1;
    std::vector<Vertex> vertices_;
    std::vector<std::vector<Config>> beliefs_;
    std::map<std::pair<StateId, std::pair<Sighting, Sighting>>, StateId> env_edges_;
    std::vector<JointMove> edge_moves_;  // parallel to topo.succ; empty moves on environment edges
};

/// Throws CapExceeded past spec.belief_cap beliefs or spec.base.state_cap
/// vertices. `init` is the true initial state; persistent beliefs start from
/// its (publicly known) opponent positions.
KnowledgeGame build_knowledge_game(const Arena& arena, const KnowledgeSpec& spec, const GameState& init);

/// Plays a solved knowledge game in the real world: the system follows the
/// strategy from observations only, `adversary` sees everything. Records the
/// system's belief before every system move.
struct KnowledgePlayout {
    Playout play;
    std::vector<std::vector<Config>> beliefs;
    std::vector<Config> truth;
};
KnowledgePlayout run_knowledge_playout(const KnowledgeGame& kg, const Solution& sol, const GameState& init,
                                       Policy& adversary, std::size_t max_steps);

/// Independent check: decides the game for the system by AND-OR search over
/// sets of true states consistent with the system's observations (persistent
/// memory, reachability and safety variants only).
Player observation_strategy_oracle(const Arena& arena, const GameConfig& cfg, const GameState& init, int radius,
                                   std::size_t bound = 20'000);

/// Per-member belief bookkeeping along a play, for map memory and
/// information sharing.
struct BeliefTrace {
    std::vector<GameState> states;
    /// team_beliefs[i]: the team belief after states[i] was observed.
    std::vector<BeliefState> team_beliefs;
    /// member_beliefs[i][m]: member m's belief after states[i].
    std::vector<std::vector<BeliefState>> member_beliefs;
};
BeliefTrace track_beliefs(const Arena& arena, const GameConfig& cfg, const GameState& init, Policy& system,
                          Policy& environment, std::size_t steps);

}  // namespace cnr
