// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).
//
//   acceptance            run all criteria
//   acceptance 4 9        run only criteria 4 and 9

#include <sys/resource.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cnr/belief.hpp"
#include "cnr/io.hpp"
#include "cnr/oracle.hpp"
#include "cnr/sim.hpp"
#include "cnr/trace.hpp"
#include "helpers.hpp"

using namespace cnr;

namespace {

const std::filesystem::path kScenarios = CNR_SOURCE_DIR "/scenarios";

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "failed: ";
            else detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<void(Check&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Solved {
    GameGraph graph;
    Solution sol;
};

Solved solve_at(const Arena& a, const GameConfig& cfg, const std::vector<Coord>& cops, const std::vector<Coord>& robbers) {
    Solved s{build_game_graph(a, cfg, initial_state(cfg, cops, robbers)), {}};
    s.sol = solve(s.graph);
    return s;
}

/// Largest number of cop moves the extracted strategy needs against every
/// robber reply, walked on the movement rules directly. -1 if some line of
/// play escapes within `depth` moves.
int capture_depth(const Arena& a, const GameConfig& cfg, const Solved& s, const GameState& st, int depth) {
    if (is_capture(a, st)) return 0;
    if (depth == 0) return -1;
    const auto moves = legal_joint_moves(a, cfg, st);
    if (moves.empty()) return st.mover == cfg.system_team ? -1 : 0;  // a stuck robber team is caught
    if (st.mover == cfg.system_team) {
        auto policy = strategy_player(s.graph, s.sol);
        const auto m = policy->choose(a, cfg, st, 0);
        if (!m) return -1;
        const int sub = capture_depth(a, cfg, s, apply_joint_move(a, cfg, st, *m), depth - 1);
        return sub < 0 ? -1 : sub + 1;
    }
    int worst = 0;
    for (const JointMove& m : moves) {
        const int sub = capture_depth(a, cfg, s, apply_joint_move(a, cfg, st, m), depth - 1);
        if (sub < 0) return -1;
        worst = std::max(worst, sub);
    }
    return worst;
}

// --- criteria --------------------------------------------------------------

void fig2(Check& o) {
    const ParsedArena p = test::fig2();
    const Solved cop = solve_at(p.arena, test::cop_pursuit(), p.cops, p.robbers);
    o.require(cop.sol.verdict.winner == Player::System, "cop-side reachability should be won by the cops");
    const Solved rob = solve_at(p.arena, test::robber_safety(), p.cops, p.robbers);
    o.require(rob.sol.verdict.winner == Player::Environment, "robber-side safety should be lost by the robber");
    const int d = capture_depth(p.arena, test::cop_pursuit(), cop, cop.graph.state(cop.graph.initial), 12);
    o.require(d >= 0 && d <= 2, "capture in <= 2 cop moves on every branch (got " + std::to_string(d) + ")");
    o.detail << "reach=" << to_string(cop.sol.verdict.winner) << " safety=" << to_string(rob.sol.verdict.winner)
             << " worst-case cop moves=" << d;
}

void fig3(Check& o) {
    const Arena a = test::four_cycle();
    const auto t0 = std::chrono::steady_clock::now();
    const Solved one = solve_at(a, test::robber_safety(1, 1), {test::v(0)}, {test::v(2)});
    const Player one_oracle = brute_force_oracle(a, test::robber_safety(1, 1), one.graph.state(one.graph.initial)).winner;
    const double t1 = seconds_since(t0);
    const auto t2 = std::chrono::steady_clock::now();
    const Solved two = solve_at(a, test::robber_safety(1, 2), {test::v(0)}, {test::v(1), test::v(2)});
    const Player two_oracle = brute_force_oracle(a, test::robber_safety(1, 2), two.graph.state(two.graph.initial)).winner;
    const double t3 = seconds_since(t2);
    o.require(one.sol.verdict.winner == Player::System && one_oracle == Player::System, "1 cop / 1 robber: robber wins");
    o.require(two.sol.verdict.winner == Player::Environment && two_oracle == Player::Environment,
              "1 cop / 2 robbers: cops win by crowding");
    o.require(t1 < 1 && t3 < 1, "each case under 1 s");
    o.detail << "1c/1r " << to_string(one.sol.verdict.winner) << " (oracle " << to_string(one_oracle) << "), 1c/2r "
             << to_string(two.sol.verdict.winner) << " (oracle " << to_string(two_oracle) << ")";
}

void oracle_equivalence(Check& o) {
    std::mt19937 rng(2024);
    int total = 0, agree = 0, system_wins = 0;
    std::uniform_int_distribution<int> side(2, 4);
    for (int i = 0; i < 240; ++i) {
        const int w = side(rng), h = side(rng);
        const int cops = 1 + (i % 2);
        const int robbers = cops == 2 ? 1 : 1 + (i / 2) % 2;
        if (w * h < cops + robbers + 1) continue;
        const MoveRule rule = (i / 4) % 2 ? MoveRule::AllowStay : MoveRule::MustMove;
        const Connectivity conn = (i / 8) % 2 ? Connectivity::FourWay : Connectivity::EightWay;
        const auto sc = test::random_scenario(rng, w, h, cops, robbers, 0.2, 0, conn);
        const GameConfig cfg = (i / 16) % 2 ? test::cop_pursuit(cops, robbers, rule) : test::robber_safety(cops, robbers, rule);
        const Solved s = solve_at(sc.arena, cfg, sc.cops, sc.robbers);
        const Player oracle = brute_force_oracle(sc.arena, cfg, s.graph.state(s.graph.initial)).winner;
        ++total;
        agree += oracle == s.sol.verdict.winner;
        system_wins += s.sol.verdict.winner == Player::System;
    }
    o.require(total >= 200, "at least 200 scenarios");
    o.require(agree == total, std::to_string(total - agree) + " disagreements");
    o.detail << agree << "/" << total << " agree (" << system_wins << " won by the system)";
}

void safe_zone_liveness(Check& o) {
    const Scenario sc = load_scenario(kScenarios / "safezone5x5.json");
    const Solved s = solve_at(sc.arena, sc.config, sc.cops, sc.robbers);
    o.require(s.sol.verdict.winner == Player::System, "generalized Büchi game should be won by the robber");
    if (!o.pass) return;
    std::vector<std::unique_ptr<Policy>> cops;
    cops.push_back(optimal_adversary(s.graph, s.sol));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) cops.push_back(random_legal(seed));
    std::size_t min_visits = SIZE_MAX;
    int lassos = 0;
    for (auto& adv : cops) {
        PlayoutOptions long_run;
        long_run.max_steps = 10'000;
        long_run.stop_on_repeat = false;
        const Playout p = run_playout(s.graph, s.sol, *adv, long_run);
        const TraceVerdict tv = check_trace(sc.arena, sc.config, p.trace);
        o.require(p.steps == 10'000, adv->name() + " play ended early (" + to_string(p.outcome) + ")");
        o.require(p.captures == 0 && !tv.capture_step, adv->name() + " captured the robber");
        o.require(!tv.violation, adv->name() + " play broke " + (tv.violation ? tv.violation->clause : ""));
        for (std::size_t z : p.zone_visits[0]) min_visits = std::min(min_visits, z);
        if (auto lasso = p.lasso()) {
            const TraceVerdict lv = check_trace(sc.arena, sc.config, *lasso);
            o.require(lv.clean() && lv.liveness == Liveness::Satisfied, adv->name() + " lasso misses a Büchi set");
            ++lassos;
        } else {
            o.require(false, adv->name() + " play never repeated a state");
        }
    }
    o.require(min_visits >= 100, "fewer than 100 visits to some zone");
    o.detail << "11 plays x 10^4 steps (optimal + 10 random seeds), 0 captures, min zone visits " << min_visits << ", "
             << lassos << " lassos satisfied";
}

Trace lone_robber(const std::vector<Coord>& path) {
    Trace t;
    GameState s;
    s.mover = Team::Robbers;
    s.robbers = {path.front()};
    t.states.push_back(s);
    for (std::size_t i = 1; i < path.size(); ++i) {
        s.robbers = {path[i]};
        s.mover = Team::Cops;
        t.states.push_back(s);
        s.mover = Team::Robbers;
        t.states.push_back(s);
    }
    return t;
}

void monitors(Check& o) {
    const Arena corridor = Arena::grid(
        5, 1, {CellKind::safe_zone(1), CellKind::open(), CellKind::open(), CellKind::open(), CellKind::safe_zone(2)});
    const TraceVerdict dwell = check_trace(corridor, test::safe_zone(0, 1, MoveRule::AllowStay),
                                           lone_robber({{1, 0}, {0, 0}, {0, 0}, {0, 0}}));
    o.require(dwell.violation && dwell.violation->clause == "ExitDeadline", "three in-zone turns give ExitDeadline");
    const TraceVerdict back = check_trace(corridor, test::safe_zone(0, 1), lone_robber({{1, 0}, {0, 0}, {1, 0}, {0, 0}}));
    o.require(back.violation && back.violation->clause == "ReturnBeforeAlternate",
              "re-entering the zone just left gives ReturnBeforeAlternate");
    Trace shuttle = lone_robber({{1, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {3, 0}, {2, 0}, {1, 0}, {0, 0}});
    shuttle.states.pop_back();
    shuttle.cycle_start = 1;
    const TraceVerdict ok = check_trace(corridor, test::safe_zone(0, 1), shuttle);
    o.require(ok.clean() && ok.liveness == Liveness::Satisfied, "shuttle lasso is clean with liveness satisfied");
    o.detail << "dwell: " << dwell.summary() << " | return: " << back.summary() << " | shuttle: " << ok.summary();
}

void imperfect_information(Check& o) {
    const Arena corridor = Arena::open_grid(6, 1);
    int cases = 0, agree = 0;
    for (MoveRule rule : {MoveRule::MustMove, MoveRule::AllowStay}) {
        for (Player first : {Player::Environment, Player::System}) {
            for (int c = 0; c < 6; ++c) {
                for (int r = 0; r < 6; ++r) {
                    if (c == r) continue;
                    for (const GameConfig& cfg : {test::cop_pursuit(1, 1, rule, first), test::robber_safety(1, 1, rule)}) {
                        GameConfig g = cfg;
                        g.first = first;
                        const GameState init = initial_state(g, {{c, 0}}, {{r, 0}});
                        const KnowledgeGame kg = build_knowledge_game(corridor, {g, 1}, init);
                        const Player k = solve(kg).verdict.winner;
                        ++cases;
                        agree += k == observation_strategy_oracle(corridor, g, init, 1);
                    }
                }
            }
        }
    }
    o.require(agree == cases, "1x6 corridor: " + std::to_string(cases - agree) + " disagreements with the observation oracle");

    std::mt19937 rng(77);
    int limit_agree = 0;
    for (int i = 0; i < 50; ++i) {
        const int kind = i % 3;
        const auto sc = test::random_scenario(rng, 3, 3, 1, 1, 0.2, kind == 2 ? 2 : 0,
                                              i % 2 ? Connectivity::FourWay : Connectivity::EightWay);
        const MoveRule rule = (i / 3) % 2 ? MoveRule::AllowStay : MoveRule::MustMove;
        const GameConfig cfg = kind == 0   ? test::robber_safety(1, 1, rule)
                               : kind == 1 ? test::cop_pursuit(1, 1, rule)
                                           : test::safe_zone(1, 1, rule);
        const GameState init = initial_state(cfg, sc.cops, sc.robbers);
        const Player k = solve(build_knowledge_game(sc.arena, {cfg, sc.arena.diameter()}, init)).verdict.winner;
        const Player perfect = solve(build_game_graph(sc.arena, cfg, init)).verdict.winner;
        limit_agree += k == perfect;
    }
    o.require(limit_agree == 50, "obsRadius >= diameter: " + std::to_string(50 - limit_agree) + " disagreements");
    o.detail << "corridor " << agree << "/" << cases << " match the observation oracle; radius >= diameter "
             << limit_agree << "/50 match perfect information";
}

void map_memory(Check& o) {
    std::mt19937 rng(31);
    int plays = 0, checked_steps = 0, bad = 0;
    std::size_t most_walls = 0;
    for (int i = 0; i < 100; ++i) {
        const int cops = 1 + i % 2;
        const auto sc = test::random_scenario(rng, 6, 6, cops, 1, 0.25, 0,
                                              i % 3 ? Connectivity::EightWay : Connectivity::FourWay);
        GameConfig cfg = test::cop_pursuit(cops, 1, MoveRule::AllowStay);
        cfg.info.kind = InfoMode::Kind::ZoneOfInterest;
        cfg.info.obs_radius = 1 + i % 2;
        cfg.info.map_memory = true;
        cfg.info.memory = i % 4 == 3 ? Memory::Amnesic : Memory::Persistent;
        auto sys = random_legal(1000 + static_cast<std::uint64_t>(i));
        auto env = random_legal(2000 + static_cast<std::uint64_t>(i));
        const BeliefTrace bt = track_beliefs(sc.arena, cfg, initial_state(cfg, sc.cops, sc.robbers), *sys, *env, 80);
        std::set<Coord> seen;
        for (std::size_t k = 0; k < bt.states.size(); ++k) {
            for (Coord w : observe(sc.arena, bt.states[k], Team::Cops, cfg.info.obs_radius).walls()) seen.insert(w);
            const auto& known = bt.team_beliefs[k].known_walls;
            if (known != seen) ++bad;
            if (k > 0) {
                const auto& prev = bt.team_beliefs[k - 1].known_walls;
                if (!std::includes(known.begin(), known.end(), prev.begin(), prev.end())) ++bad;
            }
            ++checked_steps;
        }
        most_walls = std::max(most_walls, seen.size());
        ++plays;
    }
    o.require(bad == 0, std::to_string(bad) + " steps broke monotonicity or the union law");
    o.detail << plays << " playouts, " << checked_steps << " steps checked, up to " << most_walls << " walls remembered";
}

void determinacy_symmetry(Check& o) {
    std::size_t graphs = 0, vertices = 0, largest = 0;
    auto check_regions = [&](const GameCore& g, const Solution& sol, const std::string& label) {
        const Regions r = winning_regions(g);
        bool ok = true;
        for (std::size_t s = 0; s < g.size(); ++s) {
            ok &= (r.system[s] != 0) != (r.environment[s] != 0);
            ok &= (r.system[s] != 0) == sol.system_wins(static_cast<StateId>(s));
        }
        o.require(ok, label + ": winning regions do not partition the states");
        ++graphs;
        vertices += g.size();
        largest = std::max(largest, g.size());
    };
    for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".json") continue;
        const Scenario sc = load_scenario(entry.path());
        if (!sc.config.info.perfect()) continue;
        const SolveInput in = solve_input(sc);
        GameConfig cfg = in.config;
        cfg.state_cap = 100'000;
        try {
            const GameGraph g = build_game_graph(in.arena, cfg, in.initial);
            check_regions(g, solve(g), sc.name);
        } catch (const CapExceeded&) {
            // Over the size limit for this check.
        }
    }
    std::mt19937 rng(99);
    for (int i = 0; i < 90; ++i) {
        const int kind = i % 3;
        const auto sc = test::random_scenario(rng, 4, 4, 1 + (i % 2) * (kind != 2), 1, 0.2, kind == 2 ? 2 : 0);
        const int cops = static_cast<int>(sc.cops.size());
        const GameConfig cfg = kind == 0   ? test::robber_safety(cops, 1)
                               : kind == 1 ? test::cop_pursuit(cops, 1, MoveRule::AllowStay)
                                           : test::safe_zone(cops, 1);
        const Solved s = solve_at(sc.arena, cfg, sc.cops, sc.robbers);
        check_regions(s.graph, s.sol, "random scenario " + std::to_string(i));
    }

    int invariant = 0;
    for (int i = 0; i < 20; ++i) {
        const int kind = i % 3;
        const int n = 3 + i % 2;
        const auto sc = test::random_scenario(rng, n, n, 1, 1 + (kind == 0 && i % 2), 0.2, kind == 2 ? 2 : 0,
                                              i % 4 < 2 ? Connectivity::EightWay : Connectivity::FourWay);
        const int robbers = static_cast<int>(sc.robbers.size());
        const GameConfig cfg = kind == 0   ? test::robber_safety(1, robbers)
                               : kind == 1 ? test::cop_pursuit(1, 1)
                                           : test::safe_zone(1, 1, MoveRule::AllowStay);
        const Player base = solve_at(sc.arena, cfg, sc.cops, sc.robbers).sol.verdict.winner;
        bool same = true;
        for (int sym = 1; sym < 8; ++sym) {
            const auto t = test::transform(sc, sym);
            same &= solve_at(t.arena, cfg, t.cops, t.robbers).sol.verdict.winner == base;
        }
        invariant += same;
    }
    o.require(invariant == 20, std::to_string(20 - invariant) + " scenarios changed verdict under a symmetry");
    o.detail << graphs << " graphs (" << vertices << " states, largest " << largest << ") partitioned; "
             << invariant << "/20 scenarios symmetry invariant";
}

long peak_rss_kb() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return u.ru_maxrss;
}

void performance(Check& o) {
    const Scenario sc = load_scenario(kScenarios / "grid10.json");
    const auto t0 = std::chrono::steady_clock::now();
    const Solved s = solve_at(sc.arena, sc.config, sc.cops, sc.robbers);
    const double secs = seconds_since(t0);
    const double gb = static_cast<double>(peak_rss_kb()) / (1024.0 * 1024.0);
    o.require(secs < 60, "build+solve took " + std::to_string(secs) + " s");
    o.require(gb < 4, "peak memory " + std::to_string(gb) + " GB");
    char line[256];
    std::snprintf(line, sizeof line,
                  "10x10, 2 cops / 1 robber: %zu reachable states (%.2fx the 1,000,000 direct-encoding figure), "
                  "winner %s, %.2f s, peak RSS %.2f GB",
                  s.graph.size(), static_cast<double>(s.graph.size()) / 1e6, to_string(s.sol.verdict.winner).c_str(),
                  secs, gb);
    o.detail << line;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "Fig. 2 regression", 1, fig2},
        {2, "Fig. 3 regression", 2, fig3},
        {3, "Oracle equivalence", 300, oracle_equivalence},
        {4, "Safe-zone liveness", 30, safe_zone_liveness},
        {5, "Exit-deadline and alternation monitors", 5, monitors},
        {6, "Imperfect information", 120, imperfect_information},
        {7, "Map Memory monotonicity", 60, map_memory},
        {8, "Determinacy and symmetry", 120, determinacy_symmetry},
        {9, "Performance envelope", 60, performance},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        Check o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = seconds_since(t0);
        o.require(secs < c.limit_s, "runtime over " + std::to_string(c.limit_s) + " s");
        failed += !o.pass;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing << "): "
                  << o.detail.str() << std::endl;
    }
    return failed;
}
