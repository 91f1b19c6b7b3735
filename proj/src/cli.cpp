#include "cnr/cli.hpp"

#include <csignal>
#include <iostream>

#include "CLI11.hpp"

#include "cnr/errors.hpp"
#include "cnr/io.hpp"
#include "cnr/oracle.hpp"
#include "cnr/session.hpp"

namespace cnr {

namespace {

struct SolveArgs {
    std::string scenario;
    std::string strategy;
    bool no_strategy = false;
    std::string dump;
    std::size_t state_cap = 0;
    bool oracle = false;
};

struct SimulateArgs {
    std::string scenario;
    std::string adversary = "optimal";
    std::string script;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    std::size_t steps = 1000;
    std::string trace;
    std::string summary;
    bool play_through = false;
    bool receding = false;
    int window = 9;
    int margin = -1;
};

struct CheckArgs {
    std::string trace;
    std::string scenario;
};

struct GenArgs {
    std::string tiling;
    int band_period = 100;
    int low = 25;
    int high = 75;
    int zone_period = 0;
    std::vector<int> center{0, 0};
    int size = 9;
    std::string connectivity = "EightWay";
    std::string format = "json";
    std::string out;
};

std::string with_suffix(const std::string& path, std::size_t i) {
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + "-" + std::to_string(i) + p.extension().string())).string();
}

int run_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(a.scenario);
    if (a.state_cap) sc.config.state_cap = a.state_cap;
    const SolveInput in = solve_input(sc);
    json report;
    Verdict v;
    json strategy;
    if (in.config.info.perfect()) {
        GameGraph g = build_game_graph(in.arena, in.config, in.initial);
        g.window_relative = in.window.has_value();
        const Solution sol = solve(g);
        v = sol.verdict;
        report = verdict_to_json(v);
        if (!a.no_strategy) strategy = strategy_to_json(g, sol);
        if (!a.dump.empty()) write_file(a.dump, dump_graph(g));
        if (a.oracle) report["oracle"] = to_string(brute_force_oracle(in.arena, in.config, in.initial, in.config.state_cap).winner);
    } else {
        KnowledgeGame kg = build_knowledge_game(in.arena, {in.config, in.config.info.obs_radius, in.config.info.memory},
                                                in.initial);
        kg.window_relative = in.window.has_value();
        const Solution sol = solve(kg);
        v = sol.verdict;
        report = verdict_to_json(v);
        report["beliefs"] = kg.belief_count();
        if (!a.no_strategy) strategy = strategy_to_json(kg, sol);
        if (a.oracle) {
            if (in.config.info.memory != Memory::Persistent || in.config.monitored())
                err << "note: the observation oracle only covers persistent reachability/safety games\n";
            else
                report["oracle"] = to_string(observation_strategy_oracle(in.arena, in.config, in.initial,
                                                                         in.config.info.obs_radius));
        }
    }
    report["systemTeam"] = team_key(in.config.system_team);
    report["variant"] = to_string(in.config.variant);
    report["scenario"] = sc.name;
    if (!a.no_strategy) {
        const std::string path = a.strategy.empty() ? sc.name + ".strategy.json" : a.strategy;
        write_file(path, strategy.dump(1) + "\n");
        report["strategy"] = path;
    }
    out << report.dump(2) << "\n";
    return v.winner == Player::System ? exit_code::ok : exit_code::environment_wins;
}

std::unique_ptr<Policy> make_adversary(const SimulateArgs& a, const GameGraph& g, const Solution& sol, std::uint64_t seed,
                                       Team env) {
    const auto kind = adversary_from_string(a.adversary);
    if (!kind) throw InputError("unknown adversary '" + a.adversary + "' (random, greedy, optimal, scripted)");
    switch (*kind) {
        case AdversaryKind::RandomLegal: return random_legal(seed);
        case AdversaryKind::GreedyDistance: return greedy_distance();
        case AdversaryKind::Optimal: return optimal_adversary(g, sol);
        case AdversaryKind::Scripted: {
            if (a.script.empty()) throw InputError("--adversary scripted needs --script");
            json j;
            try {
                j = json::parse(read_file(a.script));
            } catch (const json::exception& e) {
                throw InputError(a.script + ": " + e.what());
            }
            if (!j.is_array()) throw InputError(a.script + ": expected a list of moves");
            std::vector<JointMove> moves;
            for (const auto& m : j) moves.push_back(move_from_json(m, env));
            return scripted(std::move(moves));
        }
    }
    throw InputError("unknown adversary");
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    const Scenario sc = load_scenario(a.scenario);
    json reports = json::array();
    bool all_clean = true;

    auto record = [&](std::size_t run, const Playout& p, const Arena& arena, const GameConfig& cfg, json extra) {
        Trace t = p.trace;
        const auto lasso = p.lasso();
        if (lasso && !a.play_through) t = *lasso;
        const TraceVerdict tv = check_trace(arena, cfg, t);
        all_clean &= tv.clean();
        json j = summary_to_json(summarize(p));
        if (lasso && a.play_through) {
            const TraceVerdict lv = check_trace(arena, cfg, *lasso);
            all_clean &= lv.clean();
            j["lasso"] = {{"cycleStart", *lasso->cycle_start}, {"length", lasso->states.size()}, {"check", lv.summary()}};
        }
        j["run"] = run;
        j["clean"] = tv.clean();
        j["check"] = tv.summary();
        if (t.cycle_start) j["cycleStart"] = *t.cycle_start;
        for (auto& [k, v] : extra.items()) j[k] = v;
        if (!a.trace.empty()) {
            const std::string path = a.runs > 1 ? with_suffix(a.trace, run) : a.trace;
            write_file(path, trace_to_jsonl(t));
            j["trace"] = path;
        }
        reports.push_back(j);
    };

    if (a.receding) {
        if (sc.arena.finite()) throw InputError("--receding needs a tiled arena");
        RecedingOptions ro;
        ro.window_size = a.window;
        ro.replan_margin = a.margin >= 0 ? a.margin : (sc.config.info.perfect() ? 1 : sc.config.info.obs_radius);
        ro.max_steps = a.steps;
        const auto kind = adversary_from_string(a.adversary);
        if (!kind || *kind == AdversaryKind::Scripted) throw InputError("--receding supports random, greedy, optimal");
        ro.adversary = *kind;
        for (std::size_t run = 0; run < a.runs; ++run) {
            ro.seed = a.seed + run;
            const RecedingResult r = receding_horizon_play(sc.arena.tiling(), sc.arena.connectivity(), sc.config, sc.cops,
                                                           sc.robbers, ro);
            json windows = json::array();
            for (const auto& w : r.windows)
                windows.push_back({{"center", to_json(w.center)}, {"startStep", w.start_step},
                                   {"winner", to_string(w.verdict.winner)}, {"states", w.verdict.states}});
            record(run, r.play, sc.arena, sc.config, {{"windows", windows}, {"windowRelative", true}});
        }
    } else {
        const SolveInput in = solve_input(sc);
        GameGraph g = build_game_graph(in.arena, in.config, in.initial);
        const Solution sol = solve(g);
        PlayoutOptions po;
        po.max_steps = a.steps;
        po.stop_on_repeat = !a.play_through;
        std::optional<KnowledgeGame> kg;
        Solution ksol;
        if (!in.config.info.perfect()) {
            kg = build_knowledge_game(in.arena, {in.config, in.config.info.obs_radius, in.config.info.memory}, in.initial);
            ksol = solve(*kg);
        }
        const Team env = other(in.config.system_team);
        for (std::size_t run = 0; run < a.runs; ++run) {
            auto adv = make_adversary(a, g, sol, a.seed + run, env);
            const Verdict& v = kg ? ksol.verdict : sol.verdict;
            json extra = {{"winner", to_string(v.winner)}, {"adversary", adv->name()}};
            if (kg) {
                const KnowledgePlayout kp = run_knowledge_playout(*kg, ksol, in.initial, *adv, a.steps);
                record(run, kp.play, in.arena, in.config, extra);
            } else {
                record(run, run_playout(g, sol, *adv, po), in.arena, in.config, extra);
            }
        }
    }
    json doc = {{"scenario", sc.name}, {"runs", reports}, {"clean", all_clean}};
    if (!a.summary.empty()) write_file(a.summary, doc.dump(2) + "\n");
    out << doc.dump(2) << "\n";
    return all_clean ? exit_code::ok : exit_code::trace_violation;
}

int run_check(const CheckArgs& a, std::ostream& out) {
    const Scenario sc = load_scenario(a.scenario);
    const Trace t = trace_from_jsonl(read_file(a.trace));
    Arena arena = sc.arena;
    if (!arena.finite() && sc.window_center) arena = solve_input(sc).arena;
    const TraceVerdict v = check_trace(arena, sc.config, t);
    json j = {{"clean", v.clean()}, {"summary", v.summary()}, {"liveness", to_string(v.liveness)},
              {"cornered", v.cornered}, {"copsStuck", v.cops_stuck}, {"unmet", v.unmet}};
    j["violation"] = v.violation ? json{{"index", v.violation->index}, {"clause", v.violation->clause}} : json(nullptr);
    j["captureStep"] = v.capture_step ? json(*v.capture_step) : json(nullptr);
    out << j.dump(2) << "\n";
    return v.clean() ? exit_code::ok : exit_code::trace_violation;
}

int run_gen(const GenArgs& a, std::ostream& out) {
    TilingSpec t;
    if (!a.tiling.empty()) {
        try {
            t = tiling_from_json(json::parse(read_file(a.tiling)));
        } catch (const json::exception& e) {
            throw InputError(a.tiling + ": " + e.what());
        }
    } else {
        t.band_period = a.band_period;
        t.low = a.low;
        t.high = a.high;
        t.zone_period = a.zone_period;
        t.validate();
    }
    if (a.size < 3 || a.size % 2 == 0) throw InputError("--size must be odd and at least 3");
    const Connectivity conn =
        (a.connectivity == "FourWay" || a.connectivity == "four") ? Connectivity::FourWay : Connectivity::EightWay;
    const Window w = extract_window(t, {a.center[0], a.center[1]}, a.size, conn);
    std::string text;
    if (a.format == "ascii") {
        if (w.arena.zone_count() > 9) throw InputError("ASCII maps hold at most 9 zones, use --format json");
        text = render_arena(w.arena, {}, {});
    } else if (a.format == "json") {
        json j = arena_to_json(w.arena, {}, {});
        j["origin"] = to_json(w.origin);
        j["tiling"] = tiling_to_json(t);
        text = j.dump(1) + "\n";
    } else {
        throw InputError("--format must be ascii or json");
    }
    if (a.out.empty()) out << text;
    else write_file(a.out, text);
    return exit_code::ok;
}

HttpServer* g_server = nullptr;

int run_serve(const ServeOptions& opt, std::ostream& out) {
    SessionManager sessions;
    HttpServer server(sessions, opt);
    const int port = server.bind();
    out << "listening on http://" << opt.bind << ":" << port << "\n" << std::flush;
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
    });
    server.listen();
    g_server = nullptr;
    return exit_code::ok;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cops and robbers game synthesis", "cnr"};
    app.require_subcommand(1);

    SolveArgs solve_a;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario, print the verdict, write the strategy");
    solve_cmd->add_option("--scenario", solve_a.scenario, "Scenario JSON file")->required();
    solve_cmd->add_option("--strategy", solve_a.strategy, "Strategy output (default <scenario>.strategy.json)");
    solve_cmd->add_flag("--no-strategy", solve_a.no_strategy, "Do not write a strategy file");
    solve_cmd->add_option("--dump-graph", solve_a.dump, "Write the diagnostic graph dump here");
    solve_cmd->add_option("--state-cap", solve_a.state_cap, "Override the scenario state cap");
    solve_cmd->add_flag("--oracle", solve_a.oracle, "Also run the independent oracle");

    SimulateArgs sim_a;
    auto* sim_cmd = app.add_subcommand("simulate", "Play the strategy against an adversary");
    sim_cmd->add_option("--scenario", sim_a.scenario, "Scenario JSON file")->required();
    sim_cmd->add_option("--adversary", sim_a.adversary, "random | greedy | optimal | scripted")->capture_default_str();
    sim_cmd->add_option("--script", sim_a.script, "JSON list of adversary moves for --adversary scripted");
    sim_cmd->add_option("--seed", sim_a.seed, "Seed of the first run")->capture_default_str();
    sim_cmd->add_option("--runs", sim_a.runs, "Number of playouts")->capture_default_str();
    sim_cmd->add_option("--steps", sim_a.steps, "Step limit per playout")->capture_default_str();
    sim_cmd->add_option("--trace", sim_a.trace, "Trace output (JSON Lines); runs > 1 get a -<run> suffix");
    sim_cmd->add_option("--summary", sim_a.summary, "Summary output (JSON)");
    sim_cmd->add_flag("--play-through", sim_a.play_through, "Keep playing after the first repeated state");
    sim_cmd->add_flag("--receding", sim_a.receding, "Receding-horizon play on a tiled arena");
    sim_cmd->add_option("--window", sim_a.window, "Receding-horizon window size")->capture_default_str();
    sim_cmd->add_option("--margin", sim_a.margin, "Replan margin (default obsRadius, or 1)");

    CheckArgs check_a;
    auto* check_cmd = app.add_subcommand("check-trace", "Check a trace against the rules and monitors");
    check_cmd->add_option("--trace", check_a.trace, "Trace file (JSON Lines)")->required();
    check_cmd->add_option("--scenario", check_a.scenario, "Scenario JSON file")->required();

    GenArgs gen_a;
    auto* gen_cmd = app.add_subcommand("gen-arena", "Cut a finite window out of a tiling");
    gen_cmd->add_option("--tiling", gen_a.tiling, "Tiling JSON {bandPeriod, low, high, mask, zonePeriod}");
    gen_cmd->add_option("--band-period", gen_a.band_period)->capture_default_str();
    gen_cmd->add_option("--low", gen_a.low)->capture_default_str();
    gen_cmd->add_option("--high", gen_a.high)->capture_default_str();
    gen_cmd->add_option("--zone-period", gen_a.zone_period)->capture_default_str();
    gen_cmd->add_option("--center", gen_a.center, "Window center X Y")->expected(2)->capture_default_str();
    gen_cmd->add_option("--size", gen_a.size, "Odd window size")->capture_default_str();
    gen_cmd->add_option("--connectivity", gen_a.connectivity, "FourWay | EightWay")->capture_default_str();
    gen_cmd->add_option("--format", gen_a.format, "json | ascii")->capture_default_str();
    gen_cmd->add_option("--out", gen_a.out, "Output file (default stdout)");

    ServeOptions serve_a;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the session API over HTTP");
    serve_cmd->add_option("--port", serve_a.port)->capture_default_str();
    serve_cmd->add_option("--bind", serve_a.bind)->capture_default_str();
    serve_cmd->add_option("--static-dir", serve_a.static_dir, "Directory of UI assets served at /");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_code::usage;
    }

    try {
        if (*solve_cmd) return run_solve(solve_a, out, err);
        if (*sim_cmd) return run_simulate(sim_a, out);
        if (*check_cmd) return run_check(check_a, out);
        if (*gen_cmd) return run_gen(gen_a, out);
        if (*serve_cmd) return run_serve(serve_a, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::malformed_input;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::malformed_input;
    } catch (const IllegalMove& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::malformed_input;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << " (at least " << e.lower_bound() << ")\n";
        return exit_code::cap_exceeded;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_code::cap_exceeded;
    }
    return exit_code::usage;
}

}  // namespace cnr
