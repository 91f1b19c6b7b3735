#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnr/errors.hpp"
#include "cnr/io.hpp"
#include "helpers.hpp"

using namespace cnr;

namespace {

const std::filesystem::path kScenarios = CNR_SOURCE_DIR "/scenarios";

}  // namespace

TEST_CASE("arena documents round-trip") {
    const ParsedArena p = parse_arena("1.#.\n.C.R\n#..2", Connectivity::FourWay);
    const json j = arena_to_json(p.arena, p.cops, p.robbers);
    CHECK(j["cells"][0][0] == "zone1");
    CHECK(j["connectivity"] == "FourWay");
    const ParsedArena back = arena_from_json(j);
    CHECK(back.arena == p.arena);
    CHECK(back.cops == p.cops);
    CHECK(back.robbers == p.robbers);

    const Arena g = test::four_cycle();
    CHECK(arena_from_json(arena_to_json(g, {}, {})).arena == g);

    TilingSpec t;
    t.zone_period = 8;
    const Arena tiled = Arena::tiled(t);
    const ParsedArena tb = arena_from_json(arena_to_json(tiled, {}, {}));
    CHECK_FALSE(tb.arena.finite());
    CHECK(tb.arena.tiling() == t);
}

TEST_CASE("arena documents: malformed input") {
    CHECK_THROWS_AS(arena_from_json(json::parse(R"({"width": 2, "height": 1, "cells": [["open"]]})")), InputError);
    CHECK_THROWS_AS(arena_from_json(json::parse(R"({"width": 1, "height": 1, "cells": [["lava"]]})")), InputError);
    CHECK_THROWS_AS(arena_from_json(json::parse(R"({"kind": "graph", "vertices": 2, "edges": [[0, 0]]})")), InputError);
    CHECK_THROWS_AS(arena_from_json(json::parse(R"({"tiling": {"low": 80, "high": 20}})")), InputError);
    CHECK_THROWS_AS(coord_from_json(json::parse("[1]")), InputError);
    CHECK(cell_from_string("zone12") == CellKind::safe_zone(12));
    CHECK_THROWS_AS(cell_from_string("zone0"), InputError);
}

TEST_CASE("scenario documents") {
    const Scenario fig2 = load_scenario(kScenarios / "fig2.json");
    CHECK(fig2.name == "fig2");
    CHECK(fig2.config.variant == Variant::CopPursuit);
    CHECK(fig2.config.system_team == Team::Cops);
    CHECK(fig2.cops == std::vector<Coord>{{0, 0}});
    CHECK(fig2.robbers == std::vector<Coord>{{2, 0}});

    const Scenario back = scenario_from_json(scenario_to_json(fig2));
    CHECK(back.arena == fig2.arena);
    CHECK(back.cops == fig2.cops);
    CHECK(back.config.variant == fig2.config.variant);
    CHECK(back.config.first == fig2.config.first);

    const Scenario zi = load_scenario(kScenarios / "corridor-zi.json");
    CHECK(zi.config.info.kind == InfoMode::Kind::ZoneOfInterest);
    CHECK(zi.config.info.obs_radius == 1);
    CHECK_FALSE(zi.config.info.info_sharing_radius);
    CHECK(info_mode_from_json(info_mode_to_json(zi.config.info)).obs_radius == 1);

    const Scenario tiled = load_scenario(kScenarios / "tiled-zones.json");
    const SolveInput in = solve_input(tiled);
    CHECK(in.window.has_value());
    CHECK(in.arena.width() == 11);
    CHECK(in.initial.robbers == std::vector<Coord>{{5, 5}});
}

TEST_CASE("scenario documents: rejected settings") {
    auto parse = [](const char* text) { return scenario_from_json(json::parse(text)); };
    CHECK_THROWS_AS(parse(R"({"arena": "C.R", "variant": "Tag"})"), InputError);
    CHECK_THROWS_AS(parse(R"({"arena": "C.R", "variant": "CopPursuit", "systemTeam": "robbers"})"), InputError);
    CHECK_THROWS_AS(parse(R"({"cops": [[0, 0]]})"), InputError);
    CHECK_THROWS_AS(parse(R"({"arena": "C.R", "cops": [[1, 5]]})"), InputError);
    CHECK_THROWS_AS(parse(R"({"arena": "C.R", "infoMode": {"kind": "zi", "infoSharing": {"radius": 2}}})"), InputError);
    CHECK_THROWS_AS(parse(R"({"arena": "C.R", "infoMode": {"kind": "foggy"}})"), InputError);
    CHECK_THROWS_AS(parse(R"({"arena": "1.R", "variant": "SafeZoneLiveness"})"), InputError);
    const Scenario s = parse(R"({"arena": "C.R", "first": "system", "moveRule": "AllowStay", "stateCap": 50})");
    CHECK(s.config.first == Player::System);
    CHECK(s.config.move_rule == MoveRule::AllowStay);
    CHECK(s.config.state_cap == 50);
}

TEST_CASE("states, moves and traces") {
    GameState s;
    s.cops = {{1, 2}};
    s.robbers = {{3, 4}, {0, 0}};
    s.mover = Team::Robbers;
    s.monitor = {{true, 2, 1}, {}};
    s.violation = Clause::ExitDeadline;
    const json j = state_to_json(s);
    CHECK(j["mover"] == "robbers");
    CHECK(j["monitor"][0]["lastZone"] == 2);
    CHECK(j["violation"] == "ExitDeadline");
    CHECK(state_from_json(j) == s);

    const JointMove m{Team::Cops, {{2, 2}}};
    CHECK(move_from_json(move_to_json(m), Team::Robbers) == m);
    CHECK(move_from_json(json::parse(R"({"destinations": [[0, 1]]})"), Team::Robbers).team == Team::Robbers);

    Trace t{{s, s}, 0};
    t.states[1].violation.reset();
    const std::string text = trace_to_jsonl(t);
    CHECK(text.substr(text.rfind('{')) == "{\"cycleStart\":0}\n");
    const Trace back = trace_from_jsonl(text);
    CHECK(back.states == t.states);
    CHECK(back.cycle_start == t.cycle_start);

    CHECK_THROWS_AS(trace_from_jsonl(""), InputError);
    CHECK_THROWS_AS(trace_from_jsonl("{\"cops\": [[0,0]]}\n"), InputError);
    CHECK_THROWS_AS(trace_from_jsonl("not json\n"), InputError);
    CHECK_THROWS_AS(trace_from_jsonl(text + state_to_json(s).dump() + "\n"), InputError);
}

TEST_CASE("strategy and verdict documents") {
    const ParsedArena p = test::fig2();
    const GameConfig cfg = test::cop_pursuit();
    const GameGraph g = build_game_graph(p.arena, cfg, initial_state(cfg, p.cops, p.robbers));
    const Solution sol = solve(g);
    const json v = verdict_to_json(sol.verdict);
    CHECK(v["winner"] == "System");
    CHECK(v["states"] == 3);
    CHECK(v.contains("windowRelative"));
    CHECK(v.contains("iterations"));
    CHECK(v.contains("ms"));

    const json s = strategy_to_json(g, sol);
    CHECK(s["variant"] == "CopPursuit");
    CHECK(s["q0"] == 0);
    REQUIRE(s["states"].size() >= 1);
    CHECK(s["states"][0]["gameState"]["mover"] == "robbers");
    CHECK(s["states"][0]["rrIndex"] == 0);
    // Robber steps to the middle, the cop takes it there.
    REQUIRE(s["transitions"].size() == 1);
    const json& t = s["transitions"][0];
    CHECK(t["envMove"]["destinations"] == json::parse("[[1, 0]]"));
    CHECK(t["sysMove"]["destinations"] == json::parse("[[1, 0]]"));
    REQUIRE(t["to"].is_number());
    CHECK(s["states"][t["to"].get<std::size_t>()]["gameState"]["cops"] == json::parse("[[1, 0]]"));

    const PlayoutSummary sum{"Capture", 2, 1, {{0, 0}}};
    CHECK(summary_to_json(sum) == json::parse(R"({"outcome": "Capture", "steps": 2, "captures": 1, "zoneVisits": [[0, 0]]})"));
}

TEST_CASE("knowledge strategy document") {
    const Scenario sc = load_scenario(kScenarios / "corridor-zi.json");
    const SolveInput in = solve_input(sc);
    const KnowledgeGame kg = build_knowledge_game(in.arena, {in.config, 1}, in.initial);
    const json s = strategy_to_json(kg, solve(kg));
    CHECK(s["obsRadius"] == 1);
    REQUIRE_FALSE(s["states"].empty());
    CHECK(s["states"][0]["gameState"].contains("belief"));
}
