#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/game.hpp"

namespace cnr {

using StateId = std::uint32_t;

/// Turn-based two-player graph in CSR form. Terminal vertices (capture,
/// violation) have no successors and are never "stuck": their winner is
/// fixed by the objective, not by the stuck rule.
struct TwoPlayerGraph {
    std::vector<Player> owner;
    std::vector<std::uint8_t> terminal;
    std::vector<std::uint32_t> succ_offsets{0};
    std::vector<StateId> succ;
    std::vector<std::uint32_t> pred_offsets;
    std::vector<StateId> pred;

    std::size_t size() const { return owner.size(); }
    std::size_t edge_count() const { return succ.size(); }

    std::span<const StateId> successors(StateId s) const {
        return std::span<const StateId>(succ).subspan(succ_offsets[s], succ_offsets[s + 1] - succ_offsets[s]);
    }
    std::span<const StateId> predecessors(StateId s) const {
        return std::span<const StateId>(pred).subspan(pred_offsets[s], pred_offsets[s + 1] - pred_offsets[s]);
    }
    /// Non-terminal vertex without moves: its owner loses.
    bool stuck(StateId s) const { return !terminal[s] && succ_offsets[s + 1] == succ_offsets[s]; }

    /// Appends a vertex; successors are appended afterwards with add_edge and
    /// closed with end_vertex.
    StateId add_vertex(Player p, bool is_terminal);
    void add_edge(StateId to) { succ.push_back(to); }
    void end_vertex() { succ_offsets.push_back(static_cast<std::uint32_t>(succ.size())); }
    /// Builds the predecessor index. Call once after the last end_vertex.
    void finalize();
};

struct AcceptanceSet {
    std::string name;
    std::vector<StateId> members;  // sorted
};

/// Everything the solver needs: topology, initial vertex, objective sets.
struct GameCore {
    TwoPlayerGraph topo;
    StateId initial = 0;
    std::vector<StateId> capture;    // sorted
    std::vector<StateId> violation;  // sorted
    std::vector<AcceptanceSet> acceptance;
    GameConfig config;
    bool window_relative = false;

    std::size_t size() const { return topo.size(); }
};

/// Mixed-radix packing of a GameState on a finite arena into 64 bits.
class StateCodec {
public:
    StateCodec() = default;
    StateCodec(const Arena& arena, const GameConfig& cfg);

    std::uint64_t encode(const GameState& s) const;
    GameState decode(std::uint64_t key) const;
    /// Number of distinct keys (as a double, it may exceed 2^64 on rejection).
    double key_space() const { return key_space_; }

private:
    friend class GraphBuilder;
    const Arena* arena_ = nullptr;
    int cops_ = 0;
    int robbers_ = 0;
    int monitors_ = 0;
    int zones_ = 0;
    std::uint64_t cells_ = 1;
    std::uint64_t monitor_base_ = 1;
    double key_space_ = 0;
};

/// Reachable product of the arena, the movement rules, and the obligation
/// monitors. Owners follow the configured system team. Successor lists are
/// sorted by move_less of their joint moves.
class GameGraph : public GameCore {
public:
    GameState state(StateId s) const { return codec_.decode(keys_[s]); }
    std::optional<StateId> find(const GameState& s) const;
    /// The joint move labelling edge from -> to.
    JointMove move(StateId from, StateId to) const;
    /// Successor reached by playing `m` from `from`, if it is an edge.
    std::optional<StateId> successor_by_move(StateId from, const JointMove& m) const;
    const Arena& arena() const { return *arena_; }

private:
    friend class GraphBuilder;
    friend GameGraph build_game_graph(const Arena&, const GameConfig&, const GameState&);
    const Arena* arena_ = nullptr;
    StateCodec codec_;
    std::vector<std::uint64_t> keys_;
    std::vector<StateId> dense_;  // key -> id + 1, when the key space is small
    std::unordered_map<std::uint64_t, StateId> sparse_;
};

/// Breadth-first construction over reachable states. `arena` must outlive
/// the graph. Throws CapExceeded past cfg.state_cap.
GameGraph build_game_graph(const Arena& arena, const GameConfig& cfg, const GameState& init);

/// Diagnostic dump: `idx owner coppos... robberpos... monitor flags` per line.
std::string dump_graph(const GameGraph& g);

}  // namespace cnr
