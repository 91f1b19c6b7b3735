#include "cnr/io.hpp"

#include <fstream>
#include <sstream>

#include "cnr/errors.hpp"

namespace cnr {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw InputError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
    return *it;
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) bad(where, "expected true or false");
    return j.get<bool>();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

Connectivity connectivity_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "fourway" || l == "four" || l == "4") return Connectivity::FourWay;
    if (l == "eightway" || l == "eight" || l == "8") return Connectivity::EightWay;
    throw InputError("unknown connectivity '" + s + "'");
}

std::string connectivity_name(Connectivity c) { return c == Connectivity::FourWay ? "FourWay" : "EightWay"; }

}  // namespace

json to_json(Coord c) { return json::array({c.x, c.y}); }

Coord coord_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw InputError("coordinate must be [x, y], got " + j.dump());
    return {j[0].get<int>(), j[1].get<int>()};
}

json coords_to_json(const std::vector<Coord>& cs) {
    json a = json::array();
    for (Coord c : cs) a.push_back(to_json(c));
    return a;
}

std::vector<Coord> coords_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected a list of [x, y], got " + j.dump());
    std::vector<Coord> out;
    for (const auto& c : j) out.push_back(coord_from_json(c));
    return out;
}

Team team_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "cops" || l == "cop") return Team::Cops;
    if (l == "robbers" || l == "robber") return Team::Robbers;
    throw InputError("unknown team '" + s + "'");
}

std::string team_key(Team t) { return t == Team::Cops ? "cops" : "robbers"; }

Variant variant_from_string(const std::string& s) {
    for (Variant v : {Variant::ClassicPursuit, Variant::SafeZoneLiveness, Variant::CopPursuit})
        if (lower(to_string(v)) == lower(s)) return v;
    throw InputError("unknown variant '" + s + "'");
}

MoveRule move_rule_from_string(const std::string& s) {
    for (MoveRule r : {MoveRule::MustMove, MoveRule::AllowStay})
        if (lower(to_string(r)) == lower(s)) return r;
    throw InputError("unknown moveRule '" + s + "'");
}

std::string cell_to_string(CellKind k) {
    if (k.is_wall()) return "wall";
    if (k.is_zone()) return "zone" + std::to_string(k.zone);
    return "open";
}

CellKind cell_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "open" || l == ".") return CellKind::open();
    if (l == "wall" || l == "#") return CellKind::wall();
    if (l.rfind("zone", 0) == 0 && l.size() > 4) {
        try {
            std::size_t used = 0;
            const int id = std::stoi(l.substr(4), &used);
            if (used == l.size() - 4 && id >= 1) return CellKind::safe_zone(id);
        } catch (const std::exception&) {
        }
    }
    throw InputError("unknown cell kind '" + s + "'");
}

json tiling_to_json(const TilingSpec& t) {
    json j = {{"bandPeriod", t.band_period}, {"low", t.low}, {"high", t.high}, {"mask", coords_to_json(t.lshape_mask)}};
    if (t.zone_period) j["zonePeriod"] = t.zone_period;
    return j;
}

TilingSpec tiling_from_json(const json& j) {
    if (!j.is_object()) throw InputError("tiling: expected an object");
    TilingSpec t;
    if (j.contains("bandPeriod")) t.band_period = get_int(j["bandPeriod"], "tiling.bandPeriod");
    if (j.contains("low")) t.low = get_int(j["low"], "tiling.low");
    if (j.contains("high")) t.high = get_int(j["high"], "tiling.high");
    if (j.contains("mask")) t.lshape_mask = coords_from_json(j["mask"]);
    if (j.contains("zonePeriod")) t.zone_period = get_int(j["zonePeriod"], "tiling.zonePeriod");
    t.validate();
    return t;
}

json arena_to_json(const Arena& arena, const std::vector<Coord>& cops, const std::vector<Coord>& robbers) {
    json j;
    if (arena.kind() == Arena::Kind::Graph) {
        j["kind"] = "graph";
        j["vertices"] = arena.cell_count();
        json edges = json::array();
        for (auto [u, v] : arena.edges()) edges.push_back({u, v});
        j["edges"] = edges;
        json cells = json::array();
        for (int i = 0; i < arena.cell_count(); ++i) cells.push_back(cell_to_string(arena.cell_at(i)));
        j["cells"] = cells;
    } else if (arena.kind() == Arena::Kind::Tiled) {
        j["connectivity"] = connectivity_name(arena.connectivity());
        j["tiling"] = tiling_to_json(arena.tiling());
    } else {
        j["width"] = arena.width();
        j["height"] = arena.height();
        j["connectivity"] = connectivity_name(arena.connectivity());
        json rows = json::array();
        for (int y = 0; y < arena.height(); ++y) {
            json row = json::array();
            for (int x = 0; x < arena.width(); ++x) row.push_back(cell_to_string(arena.cell({x, y})));
            rows.push_back(row);
        }
        j["cells"] = rows;
    }
    j["cops"] = coords_to_json(cops);
    j["robbers"] = coords_to_json(robbers);
    return j;
}

ParsedArena arena_from_json(const json& j) {
    if (!j.is_object()) throw InputError("arena: expected an object");
    ParsedArena p;
    const Connectivity conn = j.contains("connectivity")
                                  ? connectivity_from_string(get_string(j["connectivity"], "arena.connectivity"))
                                  : Connectivity::EightWay;
    const std::string kind = j.contains("kind") ? lower(get_string(j["kind"], "arena.kind")) : "";
    if (kind == "graph") {
        const int n = get_int(field(j, "vertices", "arena"), "arena.vertices");
        if (n < 1) bad("arena.vertices", "must be positive");
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : field(j, "edges", "arena")) {
            if (!e.is_array() || e.size() != 2) bad("arena.edges", "each edge is [u, v]");
            const int u = get_int(e[0], "arena.edges"), v = get_int(e[1], "arena.edges");
            if (u < 0 || v < 0 || u >= n || v >= n || u == v) bad("arena.edges", "bad edge " + e.dump());
            edges.emplace_back(u, v);
        }
        std::vector<CellKind> cells;
        if (j.contains("cells")) {
            for (const auto& c : j["cells"]) cells.push_back(cell_from_string(get_string(c, "arena.cells")));
            if (static_cast<int>(cells.size()) != n) bad("arena.cells", "need one entry per vertex");
        }
        p.arena = Arena::graph(n, edges, std::move(cells));
    } else if (!j.contains("cells")) {
        if (!j.contains("tiling")) bad("arena", "needs cells or tiling");
        p.arena = Arena::tiled(tiling_from_json(j["tiling"]), conn);
    } else {
        const int w = get_int(field(j, "width", "arena"), "arena.width");
        const int h = get_int(field(j, "height", "arena"), "arena.height");
        if (w < 1 || h < 1) bad("arena", "width and height must be positive");
        const json& rows = j["cells"];
        if (!rows.is_array() || static_cast<int>(rows.size()) != h) bad("arena.cells", "expected " + std::to_string(h) + " rows");
        std::vector<CellKind> cells;
        for (int y = 0; y < h; ++y) {
            const json& row = rows[static_cast<std::size_t>(y)];
            if (row.is_string()) {
                // A row may be written as an ASCII map line.
                const std::string text = row.get<std::string>();
                if (static_cast<int>(text.size()) != w) bad("arena.cells[" + std::to_string(y) + "]", "wrong width");
                for (char ch : text) {
                    if (ch >= '1' && ch <= '9') cells.push_back(CellKind::safe_zone(ch - '0'));
                    else cells.push_back(cell_from_string(std::string(1, ch)));
                }
                continue;
            }
            if (!row.is_array() || static_cast<int>(row.size()) != w)
                bad("arena.cells[" + std::to_string(y) + "]", "expected " + std::to_string(w) + " cells");
            for (const auto& c : row) cells.push_back(cell_from_string(get_string(c, "arena.cells")));
        }
        p.arena = Arena::grid(w, h, std::move(cells), conn);
    }
    if (j.contains("cops")) p.cops = coords_from_json(j["cops"]);
    if (j.contains("robbers")) p.robbers = coords_from_json(j["robbers"]);
    return p;
}

json info_mode_to_json(const InfoMode& m) {
    if (m.perfect()) return {{"kind", "perfect"}};
    json j = {{"kind", "zi"},
              {"obsRadius", m.obs_radius},
              {"memory", m.memory == Memory::Persistent ? "persistent" : "amnesic"},
              {"mapMemory", m.map_memory}};
    j["infoSharing"] = m.info_sharing_radius ? json{{"radius", *m.info_sharing_radius}} : json(nullptr);
    return j;
}

InfoMode info_mode_from_json(const json& j) {
    if (!j.is_object()) bad("infoMode", "expected an object");
    InfoMode m;
    const std::string kind = lower(get_string(field(j, "kind", "infoMode"), "infoMode.kind"));
    if (kind == "perfect") return m;
    if (kind != "zi") bad("infoMode.kind", "expected \"perfect\" or \"zi\"");
    m.kind = InfoMode::Kind::ZoneOfInterest;
    if (j.contains("obsRadius")) m.obs_radius = get_int(j["obsRadius"], "infoMode.obsRadius");
    if (j.contains("memory")) {
        const std::string mem = lower(get_string(j["memory"], "infoMode.memory"));
        if (mem == "persistent") m.memory = Memory::Persistent;
        else if (mem == "amnesic") m.memory = Memory::Amnesic;
        else bad("infoMode.memory", "expected \"persistent\" or \"amnesic\"");
    }
    if (j.contains("mapMemory")) m.map_memory = get_bool(j["mapMemory"], "infoMode.mapMemory");
    if (j.contains("infoSharing") && !j["infoSharing"].is_null())
        m.info_sharing_radius = get_int(field(j["infoSharing"], "radius", "infoMode.infoSharing"), "infoMode.infoSharing.radius");
    return m;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) bad("scenario", "expected an object");
    Scenario s;
    if (j.contains("name")) s.name = get_string(j["name"], "scenario.name");

    ParsedArena p;
    auto from_text = [](const std::string& text, const json& doc) {
        const Connectivity conn = doc.contains("connectivity")
                                      ? connectivity_from_string(get_string(doc["connectivity"], "connectivity"))
                                      : Connectivity::EightWay;
        return parse_map(text, conn);
    };
    if (j.contains("arena")) {
        p = j["arena"].is_string() ? from_text(j["arena"].get<std::string>(), j) : arena_from_json(j["arena"]);
    } else if (j.contains("arenaRef")) {
        const std::filesystem::path ref = base_dir / get_string(j["arenaRef"], "scenario.arenaRef");
        const std::string text = read_file(ref);
        if (ref.extension() == ".json") {
            try {
                p = arena_from_json(json::parse(text));
            } catch (const json::exception& e) {
                throw InputError(ref.string() + ": " + e.what());
            }
        } else {
            p = from_text(text, j);
        }
    } else {
        bad("scenario", "needs arena or arenaRef");
    }
    s.arena = std::move(p.arena);
    s.cops = j.contains("cops") ? coords_from_json(j["cops"]) : p.cops;
    s.robbers = j.contains("robbers") ? coords_from_json(j["robbers"]) : p.robbers;

    GameConfig& c = s.config;
    c.cop_count = static_cast<int>(s.cops.size());
    c.robber_count = static_cast<int>(s.robbers.size());
    if (j.contains("variant")) c.variant = variant_from_string(get_string(j["variant"], "scenario.variant"));
    c.system_team = c.variant == Variant::CopPursuit ? Team::Cops : Team::Robbers;
    if (j.contains("systemTeam")) c.system_team = team_from_string(get_string(j["systemTeam"], "scenario.systemTeam"));
    if (j.contains("moveRule")) c.move_rule = move_rule_from_string(get_string(j["moveRule"], "scenario.moveRule"));
    if (j.contains("infoMode")) c.info = info_mode_from_json(j["infoMode"]);
    if (j.contains("first")) {
        const std::string f = lower(get_string(j["first"], "scenario.first"));
        if (f == "system") c.first = Player::System;
        else if (f == "environment") c.first = Player::Environment;
        else bad("scenario.first", "expected \"system\" or \"environment\"");
    }
    if (j.contains("stateCap")) {
        const json& cap = j["stateCap"];
        if (!cap.is_number_unsigned() || cap.get<std::size_t>() == 0) bad("scenario.stateCap", "expected a positive integer");
        c.state_cap = cap.get<std::size_t>();
    }
    if (j.contains("obligations")) {
        const std::string o = lower(get_string(j["obligations"], "scenario.obligations"));
        if (o == "perrobber") c.obligations = ObligationScope::PerRobber;
        else if (o == "teamglobal") c.obligations = ObligationScope::TeamGlobal;
        else bad("scenario.obligations", "expected \"perRobber\" or \"teamGlobal\"");
    }
    if (j.contains("window")) {
        const json& w = j["window"];
        s.window_center = coord_from_json(field(w, "center", "scenario.window"));
        if (w.contains("size")) s.window_size = get_int(w["size"], "scenario.window.size");
        if (s.window_size < 3 || s.window_size % 2 == 0) bad("scenario.window.size", "must be odd and at least 3");
    }
    c.validate();

    if (c.info.map_memory && !s.arena.finite() && !s.window_center)
        bad("scenario.infoMode.mapMemory", "needs a finite arena or a window");
    if (c.info.info_sharing_radius && s.arena.finite())
        bad("scenario.infoMode.infoSharing", "only available on tiled arenas");
    if (s.arena.finite()) {
        validate_starts(s.arena, s.cops, s.robbers);
        validate_zones(s.arena, c.monitored());
    }
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    if (!s.name.empty()) j["name"] = s.name;
    j["arena"] = arena_to_json(s.arena, {}, {});
    j["arena"].erase("cops");
    j["arena"].erase("robbers");
    j["cops"] = coords_to_json(s.cops);
    j["robbers"] = coords_to_json(s.robbers);
    j["variant"] = to_string(s.config.variant);
    j["moveRule"] = to_string(s.config.move_rule);
    j["systemTeam"] = team_key(s.config.system_team);
    j["infoMode"] = info_mode_to_json(s.config.info);
    j["first"] = s.config.first == Player::System ? "system" : "environment";
    if (s.config.obligations == ObligationScope::TeamGlobal) j["obligations"] = "teamGlobal";
    if (s.window_center) j["window"] = {{"center", to_json(*s.window_center)}, {"size", s.window_size}};
    return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    Scenario s = scenario_from_json(j, path.parent_path());
    if (s.name.empty()) s.name = path.stem().string();
    return s;
}

SolveInput solve_input(const Scenario& s) {
    SolveInput in;
    in.config = s.config;
    if (s.arena.finite()) {
        in.arena = s.arena;
        in.initial = s.initial();
        return in;
    }
    if (!s.window_center) throw InputError("scenario: a tiled arena needs window {center, size} to be solved");
    Window w = extract_window(s.arena.tiling(), *s.window_center, s.window_size, s.arena.connectivity());
    std::vector<Coord> cops, robbers;
    for (Coord c : s.cops) cops.push_back(w.to_local(c));
    for (Coord c : s.robbers) robbers.push_back(w.to_local(c));
    validate_starts(w.arena, cops, robbers);
    validate_zones(w.arena, s.config.monitored());
    in.arena = w.arena;
    in.initial = initial_state(s.config, cops, robbers);
    in.window = std::move(w);
    return in;
}

json state_to_json(const GameState& s) {
    json j = {{"cops", coords_to_json(s.cops)}, {"robbers", coords_to_json(s.robbers)}, {"mover", team_key(s.mover)}};
    json mon = json::array();
    for (const auto& o : s.monitor) mon.push_back({{"owes", o.owes}, {"lastZone", o.last_zone}, {"inside", o.inside}});
    j["monitor"] = mon;
    if (s.violation) j["violation"] = to_string(*s.violation);
    return j;
}

GameState state_from_json(const json& j) {
    if (!j.is_object()) bad("state", "expected an object");
    GameState s;
    s.cops = coords_from_json(field(j, "cops", "state"));
    s.robbers = coords_from_json(field(j, "robbers", "state"));
    s.mover = team_from_string(get_string(field(j, "mover", "state"), "state.mover"));
    if (j.contains("monitor")) {
        for (const auto& o : j["monitor"]) {
            ObligationState m;
            if (o.contains("owes")) m.owes = get_bool(o["owes"], "state.monitor.owes");
            if (o.contains("lastZone")) m.last_zone = static_cast<std::uint8_t>(get_int(o["lastZone"], "state.monitor.lastZone"));
            if (o.contains("inside")) m.inside = static_cast<std::uint8_t>(get_int(o["inside"], "state.monitor.inside"));
            s.monitor.push_back(m);
        }
    }
    if (j.contains("violation") && !j["violation"].is_null()) {
        const auto c = clause_from_string(get_string(j["violation"], "state.violation"));
        if (!c) bad("state.violation", "unknown clause " + j["violation"].dump());
        s.violation = *c;
    }
    return s;
}

json move_to_json(const JointMove& m) {
    return {{"team", team_key(m.team)}, {"destinations", coords_to_json(m.destinations)}};
}

JointMove move_from_json(const json& j, Team default_team) {
    JointMove m;
    m.team = j.contains("team") ? team_from_string(get_string(j["team"], "move.team")) : default_team;
    m.destinations = coords_from_json(field(j, "destinations", "move"));
    return m;
}

std::string trace_to_jsonl(const Trace& t) {
    std::string out;
    for (const auto& s : t.states) out += state_to_json(s).dump() + "\n";
    if (t.cycle_start) out += json{{"cycleStart", *t.cycle_start}}.dump() + "\n";
    return out;
}

Trace trace_from_jsonl(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (t.cycle_start) throw InputError("trace line " + std::to_string(lineno) + ": content after cycleStart");
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            if (j.is_object() && j.contains("cycleStart")) {
                if (!j["cycleStart"].is_number_unsigned()) bad("cycleStart", "expected a state index");
                t.cycle_start = j["cycleStart"].get<std::size_t>();
            } else {
                t.states.push_back(state_from_json(j));
            }
        } catch (const InputError& e) {
            throw InputError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (t.states.empty()) throw InputError("trace is empty");
    return t;
}

json verdict_to_json(const Verdict& v) {
    return {{"winner", to_string(v.winner)},
            {"windowRelative", v.window_relative},
            {"states", v.states},
            {"iterations", v.iterations},
            {"ms", v.ms}};
}

json summary_to_json(const PlayoutSummary& s) {
    return {{"outcome", s.outcome}, {"steps", s.steps}, {"captures", s.captures}, {"zoneVisits", s.zone_visits}};
}

namespace {

template <typename StateFn, typename EnvFn, typename SysFn>
json machine_json(const GameCore& g, const Solution& sol, StateFn state_of, EnvFn env_move, SysFn sys_move) {
    const StrategyMachine m = expand_strategy(g, sol);
    json j;
    j["variant"] = to_string(g.config.variant);
    j["systemTeam"] = team_key(g.config.system_team);
    j["q0"] = m.q0;
    json states = json::array();
    for (std::size_t i = 0; i < m.states.size(); ++i)
        states.push_back({{"id", i}, {"gameState", state_of(m.states[i].vertex)}, {"rrIndex", m.states[i].rr}});
    j["states"] = states;
    json trans = json::array();
    for (const auto& t : m.transitions) {
        const StateId from = m.states[t.from].vertex;
        json e = {{"from", t.from}};
        e["envMove"] = t.env_vertex ? env_move(from, *t.env_vertex) : json(nullptr);
        e["to"] = t.to ? json(*t.to) : json(nullptr);
        const StateId mover = t.env_vertex ? *t.env_vertex : from;
        e["sysMove"] = t.sys_vertex ? sys_move(mover, *t.sys_vertex) : json(nullptr);
        trans.push_back(e);
    }
    j["transitions"] = trans;
    return j;
}

}  // namespace

json strategy_to_json(const GameGraph& g, const Solution& sol) {
    auto state = [&](StateId s) { return state_to_json(g.state(s)); };
    auto mv = [&](StateId a, StateId b) { return move_to_json(g.move(a, b)); };
    return machine_json(g, sol, state, mv, mv);
}

json strategy_to_json(const KnowledgeGame& g, const Solution& sol) {
    auto state = [&](StateId s) -> json {
        if (s == KnowledgeGame::kCaptureSink) return {{"sink", "capture"}};
        if (s == KnowledgeGame::kViolationSink) return {{"sink", "violation"}};
        const auto& v = g.vertex(s);
        json belief = json::array();
        for (const Config& c : g.belief(v.belief)) belief.push_back(coords_to_json(c));
        GameState probe;
        probe.monitor = v.monitor;
        return {{"own", coords_to_json(v.own)},
                {"mover", team_key(v.mover)},
                {"monitor", state_to_json(probe)["monitor"]},
                {"belief", belief}};
    };
    auto env = [&](StateId, StateId to) -> json {
        if (g.is_sink(to)) return {{"sink", to == KnowledgeGame::kCaptureSink ? "capture" : "violation"}};
        return {{"belief", g.vertex(to).belief}};
    };
    auto sys = [&](StateId a, StateId b) { return move_to_json(g.move(a, b)); };
    json j = machine_json(g, sol, state, env, sys);
    j["obsRadius"] = g.obs_radius();
    return j;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
}

}  // namespace cnr
