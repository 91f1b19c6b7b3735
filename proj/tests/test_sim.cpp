#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cnr/sim.hpp"
#include "cnr/trace.hpp"
#include "helpers.hpp"

using namespace cnr;
using test::v;

namespace {

struct Solved {
    GameGraph graph;
    Solution solution;
};

Solved solve_scenario(const Arena& a, const GameConfig& cfg, std::vector<Coord> cops, std::vector<Coord> robbers) {
    GameGraph g = build_game_graph(a, cfg, initial_state(cfg, std::move(cops), std::move(robbers)));
    Solution s = solve(g);
    return {std::move(g), std::move(s)};
}

}  // namespace

TEST_CASE("Fig. 2: cop strategy against a scripted robber") {
    const auto p = test::fig2();
    const Solved s = solve_scenario(p.arena, test::cop_pursuit(), p.cops, p.robbers);
    auto robber = scripted({{Team::Robbers, {{1, 0}}}});
    const Playout play = run_playout(s.graph, s.solution, *robber);
    CHECK(play.outcome == Outcome::Capture);
    CHECK(play.steps <= 2);
    CHECK(play.captures == 1);
}

TEST_CASE("scripted adversary rejects illegal moves") {
    const auto p = test::fig2();
    const Solved s = solve_scenario(p.arena, test::cop_pursuit(), p.cops, p.robbers);
    auto robber = scripted({{Team::Robbers, {{0, 0}}}});
    CHECK_THROWS_AS(run_playout(s.graph, s.solution, *robber), IllegalMove);
}

TEST_CASE("Fig. 3a: robber strategy against the optimal cop") {
    const Arena a = test::four_cycle();
    const Solved s = solve_scenario(a, test::robber_safety(), {v(0)}, {v(2)});
    auto cop = optimal_adversary(s.graph, s.solution);
    const Playout play = run_playout(s.graph, s.solution, *cop, {10'000, true});
    CHECK(play.captures == 0);
    CHECK(play.outcome == Outcome::Cycle);
    REQUIRE(play.trace.cycle_start.has_value());
    CHECK(play.trace.states[*play.trace.cycle_start] == play.trace.states.back());
    const TraceVerdict tv = check_trace(a, s.graph.config, play.trace);
    CHECK(tv.clean());

    PlayoutOptions full{10'000, false};
    const Playout longrun = run_playout(s.graph, s.solution, *cop, full);
    CHECK(longrun.steps == 10'000);
    CHECK(longrun.captures == 0);
}

TEST_CASE("optimal adversary wins when the environment is winning") {
    const Arena a = test::four_cycle();
    const Solved crowd = solve_scenario(a, test::robber_safety(1, 2), {v(0)}, {v(1), v(2)});
    REQUIRE(crowd.solution.verdict.winner == Player::Environment);
    auto cop = optimal_adversary(crowd.graph, crowd.solution);
    const Playout play = run_playout(crowd.graph, crowd.solution, *cop);
    CHECK((play.outcome == Outcome::Capture || play.outcome == Outcome::SystemStuck));

    const auto p = test::fig2();
    const GameConfig cop_first = test::cop_pursuit(1, 1, MoveRule::MustMove, Player::System);
    const Solved evade = solve_scenario(a, cop_first, {v(0)}, {v(2)});
    REQUIRE(evade.solution.verdict.winner == Player::Environment);
    auto robber = optimal_adversary(evade.graph, evade.solution);
    const Playout run = run_playout(evade.graph, evade.solution, *robber, {1000, false});
    CHECK(run.captures == 0);
}

TEST_CASE("optimal adversary wins safe-zone games it should win") {
    std::mt19937 rng(4);
    int env_wins = 0;
    for (int round = 0; round < 30; ++round) {
        const auto sc = test::random_scenario(rng, 4, 3, 1, 1, 0.1, 2);
        const GameConfig cfg = test::safe_zone(1, 1, MoveRule::AllowStay);
        const Solved s = solve_scenario(sc.arena, cfg, sc.cops, sc.robbers);
        if (s.solution.verdict.winner != Player::Environment) continue;
        ++env_wins;
        // Against any robber behavior the cop keeps it from visiting both
        // zones forever; a random robber is caught, breaks a clause, or
        // its first lasso misses a zone.
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            auto robber = random_legal(seed);
            auto cop = optimal_adversary(s.graph, s.solution);
            const Playout play = run_playout(s.graph, s.solution, *robber, *cop, {5000, true});
            if (play.outcome == Outcome::Cycle) {
                const TraceVerdict tv = check_trace(sc.arena, cfg, play.trace);
                CHECK(tv.liveness == Liveness::Violated);
            } else {
                CHECK(play.outcome != Outcome::MaxSteps);
            }
        }
    }
    CHECK(env_wins > 3);
}

TEST_CASE("random playouts are reproducible") {
    const ParsedArena p = parse_arena("C...\n.#..\n...R");
    const Solved s = solve_scenario(p.arena, test::robber_safety(), p.cops, p.robbers);
    auto a = random_legal(42);
    auto b = random_legal(42);
    const Playout x = run_playout(s.graph, s.solution, *a, {300, false});
    const Playout y = run_playout(s.graph, s.solution, *b, {300, false});
    CHECK(x.trace.states == y.trace.states);
    CHECK(x.moves == y.moves);
}

TEST_CASE("greedy cops close in") {
    const ParsedArena p = parse_arena("C....\n.....\n....R");
    GameState s = initial_state(test::robber_safety(), p.cops, p.robbers);
    auto g = greedy_distance();
    const auto m = g->choose(p.arena, test::robber_safety(), s, 0);
    REQUIRE(m.has_value());
    CHECK(m->destinations[0] == Coord{1, 1});
}

TEST_CASE("corridor shuttle: the lasso satisfies both visit sets") {
    const Arena a = Arena::grid(5, 1, {CellKind::safe_zone(1), CellKind::open(), CellKind::open(), CellKind::open(),
                                       CellKind::safe_zone(2)});
    const GameConfig cfg = test::safe_zone(0, 1);
    const Solved s = solve_scenario(a, cfg, {}, {{2, 0}});
    auto none = random_legal(1);
    const Playout play = run_playout(s.graph, s.solution, *none, {1000, true});
    CHECK(play.outcome == Outcome::Cycle);
    const TraceVerdict tv = check_trace(a, cfg, play.trace);
    CHECK(tv.clean());
    CHECK(tv.liveness == Liveness::Satisfied);
    CHECK(play.zone_visits[0][0] >= 1);
    CHECK(play.zone_visits[0][1] >= 1);
}

TEST_CASE("receding horizon: cop-free tiled world") {
    TilingSpec spec;
    spec.zone_period = 8;
    const GameConfig cfg = test::safe_zone(0, 1);
    RecedingOptions opt;
    opt.window_size = 11;
    opt.max_steps = 300;
    const RecedingResult r = receding_horizon_play(spec, Connectivity::EightWay, cfg, {}, {{3, 3}}, opt);
    CHECK(r.play.outcome == Outcome::MaxSteps);
    REQUIRE_FALSE(r.windows.empty());
    for (const auto& w : r.windows) {
        CHECK(w.verdict.window_relative);
        CHECK(w.verdict.winner == Player::System);
    }
    CHECK(r.play.zone_visits[0][0] >= 10);
    CHECK(r.play.zone_visits[0][1] >= 10);
    const Arena world = Arena::tiled(spec);
    const TraceVerdict tv = check_trace(world, cfg, r.play.trace);
    CHECK(tv.clean());
}

TEST_CASE("receding horizon: pursuit in the checkerboard band") {
    const TilingSpec spec;
    const GameConfig cfg = test::robber_safety();
    RecedingOptions opt;
    opt.window_size = 9;
    opt.max_steps = 120;
    const RecedingResult r = receding_horizon_play(spec, Connectivity::EightWay, cfg, {{0, 0}}, {{4, 2}}, opt);
    const Arena world = Arena::tiled(spec);
    CHECK_NOTHROW(check_trace(world, cfg, r.play.trace));
    REQUIRE_FALSE(r.windows.empty());
    // A capture can only happen inside a window the solver gave to the cops.
    if (r.play.outcome == Outcome::Capture || r.play.outcome == Outcome::SystemStuck)
        CHECK(r.windows.back().verdict.winner == Player::Environment);
    MESSAGE("outcome " << to_string(r.play.outcome) << " after " << r.play.steps << " steps, " << r.windows.size()
                       << " windows");
}

TEST_CASE("receding horizon: agents that cannot share a window") {
    const TilingSpec spec;
    const GameConfig cfg = test::robber_safety();
    RecedingOptions opt;
    opt.window_size = 5;
    const RecedingResult r = receding_horizon_play(spec, Connectivity::EightWay, cfg, {{0, 0}}, {{20, 0}}, opt);
    CHECK(r.play.outcome == Outcome::WindowOverflow);
}
