#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cnr/arena.hpp"
#include "cnr/game.hpp"
#include "cnr/graph.hpp"
#include "cnr/solver.hpp"
#include "cnr/trace.hpp"

namespace cnr {

/// Move source for one team. `rr` is the controller's round-robin index at
/// the current state (only the optimal policies care).
class Policy {
public:
    virtual ~Policy() = default;
    /// A legal joint move for s.mover, or nullopt when that team is stuck.
    virtual std::optional<JointMove> choose(const Arena& arena, const GameConfig& cfg, const GameState& s,
                                            std::size_t rr) = 0;
    virtual std::string name() const = 0;
};

enum class AdversaryKind : std::uint8_t { RandomLegal, GreedyDistance, Optimal, Scripted };
std::string to_string(AdversaryKind k);
std::optional<AdversaryKind> adversary_from_string(const std::string& s);

std::unique_ptr<Policy> random_legal(std::uint64_t seed);
/// Cops minimize, robbers maximize the summed distance from each moving
/// member to its nearest opponent; ties go to the first move in move order.
std::unique_ptr<Policy> greedy_distance();
/// Environment side of a solved game: winning moves inside the environment's
/// region, otherwise delaying moves (largest system rank, or greedy distance
/// for safety games). `graph` and `sol` must outlive the policy.
std::unique_ptr<Policy> optimal_adversary(const GameGraph& graph, const Solution& sol);
/// Replays `moves` in order, then falls back to the first legal move.
/// Throws IllegalMove if a scripted move is illegal where it is played.
std::unique_ptr<Policy> scripted(std::vector<JointMove> moves);
/// System side: the extracted strategy. Outside the winning region it plays
/// the first legal move.
std::unique_ptr<Policy> strategy_player(const GameGraph& graph, const Solution& sol);

enum class Outcome : std::uint8_t { Capture, Violation, SystemStuck, EnvironmentStuck, MaxSteps, Cycle, WindowOverflow };
std::string to_string(Outcome o);

struct PlayoutOptions {
    std::size_t max_steps = 1000;
    /// Stop at the first repeated (state, round-robin index) and mark the lasso.
    bool stop_on_repeat = true;
};

struct Playout {
    Trace trace;
    std::vector<JointMove> moves;
    Outcome outcome = Outcome::MaxSteps;
    std::size_t steps = 0;
    std::size_t captures = 0;
    /// zone_visits[r][k-1]: times robber r stepped into zone k from outside it.
    std::vector<std::vector<std::size_t>> zone_visits;
    /// First repetition seen: states[first] == states[second] (with equal rr).
    std::optional<std::pair<std::size_t, std::size_t>> first_repeat;

    /// The stem and cycle up to the first repetition, as a lasso trace.
    std::optional<Trace> lasso() const;
};

/// Plays `system` against `adversary` from graph.initial. Throws
/// ContractViolation if either policy returns an illegal move.
Playout run_playout(const GameGraph& graph, const Solution& sol, Policy& system, Policy& adversary,
                    const PlayoutOptions& opt = {});

/// Convenience: the extracted strategy against `adversary`.
Playout run_playout(const GameGraph& graph, const Solution& sol, Policy& adversary, const PlayoutOptions& opt = {});

/// Summary JSON fields {outcome, steps, captures, zoneVisits}.
struct PlayoutSummary {
    std::string outcome;
    std::size_t steps;
    std::size_t captures;
    std::vector<std::vector<std::size_t>> zone_visits;
};
PlayoutSummary summarize(const Playout& p);

struct RecedingOptions {
    int window_size = 9;
    int replan_margin = 1;
    std::size_t max_steps = 200;
    AdversaryKind adversary = AdversaryKind::Optimal;
    std::uint64_t seed = 1;
};

struct WindowReport {
    Coord center;
    Coord origin;
    std::size_t start_step;
    Verdict verdict;
};

struct RecedingResult {
    Playout play;  // global coordinates
    std::vector<WindowReport> windows;
};

/// Receding-horizon play on the tiled plane: solve the window around the
/// system team, follow its strategy until an agent gets within
/// `replan_margin` cells of the window edge, re-center and re-solve. The
/// adversary only sees the current window. Throws CapExceeded naming the
/// window whose solve blew the state cap.
RecedingResult receding_horizon_play(const TilingSpec& tiling, Connectivity conn, const GameConfig& cfg,
                                     std::vector<Coord> cops, std::vector<Coord> robbers,
                                     const RecedingOptions& opt = {});

}  // namespace cnr
