#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cnr/arena.hpp"
#include "cnr/belief.hpp"
#include "cnr/game.hpp"
#include "cnr/graph.hpp"
#include "cnr/sim.hpp"
#include "cnr/solver.hpp"
#include "cnr/trace.hpp"

namespace cnr {

using json = nlohmann::json;

// All readers throw InputError with a field path on malformed documents.

json to_json(Coord c);
Coord coord_from_json(const json& j);
json coords_to_json(const std::vector<Coord>& cs);
std::vector<Coord> coords_from_json(const json& j);

Team team_from_string(const std::string& s);
std::string team_key(Team t);  // "cops" / "robbers"
Variant variant_from_string(const std::string& s);
MoveRule move_rule_from_string(const std::string& s);

/// Cell kinds are written "open", "wall" or "zone<k>".
std::string cell_to_string(CellKind k);
CellKind cell_from_string(const std::string& s);

json tiling_to_json(const TilingSpec& t);
TilingSpec tiling_from_json(const json& j);

/// Arena document: {width, height, connectivity, cells, cops, robbers,
/// tiling?}. `cells` is a list of rows; a graph arena has instead
/// {kind: "graph", vertices, edges, cells?}. A document with `tiling` and no
/// `cells` is the unbounded tiled plane.
json arena_to_json(const Arena& arena, const std::vector<Coord>& cops, const std::vector<Coord>& robbers);
ParsedArena arena_from_json(const json& j);

json info_mode_to_json(const InfoMode& m);
InfoMode info_mode_from_json(const json& j);

/// A solvable problem instance.
struct Scenario {
    Arena arena;
    std::vector<Coord> cops;
    std::vector<Coord> robbers;
    GameConfig config;
    /// Tiled arenas are solved on the window centered here.
    std::optional<Coord> window_center;
    int window_size = 9;
    std::string name;

    GameState initial() const { return initial_state(config, cops, robbers); }
};

/// Scenario document: {arena | arenaRef, cops, robbers, variant, moveRule,
/// systemTeam, infoMode, first}, plus optional stateCap, obligations
/// ("perRobber" | "teamGlobal") and window {center, size}. `arena` is an
/// arena document or an ASCII map string; `arenaRef` is a path, relative to
/// `base_dir`, to either. Agent lists default to the ones drawn in the arena.
Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {});
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// What the solver actually works on. For a tiled arena this is the window
/// cut around the scenario center, with agents translated into it. Sets
/// window_relative for windows.
struct SolveInput {
    Arena arena;
    GameConfig config;
    GameState initial;
    std::optional<Window> window;
};
SolveInput solve_input(const Scenario& s);

json state_to_json(const GameState& s);
GameState state_from_json(const json& j);
json move_to_json(const JointMove& m);
/// {team?, destinations}; `team` defaults to `default_team`.
JointMove move_from_json(const json& j, Team default_team);

/// One GameState per line; a final {"cycleStart": k} line closes a lasso.
std::string trace_to_jsonl(const Trace& t);
Trace trace_from_jsonl(const std::string& text);

json verdict_to_json(const Verdict& v);
json summary_to_json(const PlayoutSummary& s);

/// {variant, q0, states:[{id, gameState, rrIndex}], transitions:[{from,
/// envMove, to, sysMove}]}. envMove is null on the opening system move, to
/// and sysMove are null once the play is over.
json strategy_to_json(const GameGraph& g, const Solution& sol);
/// Knowledge-game variant: states carry {own, monitor, belief} instead of a
/// full GameState, and envMove is the observation pair the controller keys on.
json strategy_to_json(const KnowledgeGame& g, const Solution& sol);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace cnr
