#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "httplib.h"

#include "cnr/io.hpp"
#include "cnr/session.hpp"

using namespace cnr;

namespace {

const std::filesystem::path kScenarios = CNR_SOURCE_DIR "/scenarios";

json scenario(const std::string& name) { return json::parse(read_file(kScenarios / (name + ".json"))); }

std::string open(SessionManager& m, const std::string& name, const std::string& human) {
    const ApiResponse r = m.create({{"scenario", scenario(name)}, {"human", human}});
    REQUIRE(r.status == 201);
    return r.body["id"].get<std::string>();
}

json dest(std::initializer_list<std::pair<int, int>> cells) {
    json d = json::array();
    for (auto [x, y] : cells) d.push_back({x, y});
    return {{"destinations", d}};
}

}  // namespace

TEST_CASE("Fig. 2: the human cop forces capture") {
    SessionManager m;
    const std::string id = open(m, "fig2", "cops");
    json view = m.get(id).body;
    CHECK(view["turn"] == "controller");
    CHECK(view["legalMoves"].empty());
    CHECK(view["verdict"]["winner"] == "System");

    CHECK(m.move(id, dest({{1, 0}})).status == 409);
    const ApiResponse a = m.advance(id);
    REQUIRE(a.status == 200);
    CHECK(a.body["controllerMove"]["destinations"] == json::parse("[[1, 0]]"));
    CHECK(a.body["turn"] == "human");
    CHECK(a.body["legalMoves"] == json::parse("[[[1, 0]]]"));

    const ApiResponse done = m.move(id, dest({{1, 0}}));
    REQUIRE(done.status == 200);
    CHECK(done.body["status"] == "capture");
    CHECK(done.body["outcome"] == "RobberCaught");
    CHECK(done.body["turn"].is_null());
    CHECK(m.advance(id).status == 409);
    CHECK(m.replay(id).body["consistent"] == true);
}

TEST_CASE("Fig. 3a: the human robber keeps its distance") {
    SessionManager m;
    const std::string id = open(m, "fig3a", "robbers");
    for (int round = 0; round < 10; ++round) {
        const ApiResponse a = m.advance(id);
        REQUIRE(a.status == 200);
        // Step to whichever neighbour is opposite the cop.
        const int cop = a.body["state"]["cops"][0][0].get<int>();
        const ApiResponse r = m.move(id, dest({{(cop + 2) % 4, 0}}));
        REQUIRE(r.status == 200);
        CHECK(r.body["status"] == "playing");
    }
    CHECK(m.get(id).body["step"] == 20);
    CHECK(m.replay(id).body["consistent"] == true);
}

TEST_CASE("turn discipline, illegal moves and unknown sessions") {
    SessionManager m;
    const json sc = json::parse(R"({"arena": "CC..R", "variant": "CopPursuit"})");
    const ApiResponse c = m.create({{"scenario", sc}, {"human", "cops"}});
    REQUIRE(c.status == 201);
    const std::string id = c.body["id"];
    REQUIRE(m.advance(id).status == 200);
    CHECK(m.advance(id).status == 409);

    const ApiResponse swap = m.move(id, dest({{1, 0}, {0, 0}}));
    CHECK(swap.status == 422);
    CHECK(swap.body["clause"] == "CopsSwitch");
    CHECK(m.move(id, dest({{3, 0}, {1, 0}})).body["clause"] == "NotAdjacent");
    CHECK(m.move(id, json::parse(R"({"destinations": "up"})")).status == 400);
    CHECK(m.get(id).body["step"] == 1);

    CHECK(m.get("nope").status == 404);
    CHECK(m.move("nope", dest({{0, 0}})).status == 404);
    CHECK(m.advance("nope").status == 404);
    CHECK(m.belief("nope").status == 404);

    CHECK(m.create(json::parse(R"({"human": "cops"})")).status == 400);
    CHECK(m.create({{"scenario", sc}, {"human", "dogs"}}).status == 400);
    CHECK(m.size() == 1);

    const json wide = json::parse(R"({"arena": "C.C\n...\n..R", "variant": "CopPursuit"})");
    const std::string w = m.create({{"scenario", wide}, {"human", "cops"}}).body["id"];
    REQUIRE(m.advance(w).status == 200);
    CHECK(m.move(w, dest({{1, 0}, {1, 0}})).body["clause"] == "CopsCollide");
}

TEST_CASE("safe-zone obligations are reported per robber") {
    SessionManager m;
    const json sc = json::parse(R"({"arena": "1.R.2", "cops": [], "variant": "SafeZoneLiveness", "moveRule": "AllowStay"})");
    const std::string id = m.create({{"scenario", sc}, {"human", "robbers"}}).body["id"];
    REQUIRE(m.advance(id).status == 200);  // the empty cop team passes
    m.move(id, dest({{1, 0}}));
    m.advance(id);
    const json in = m.move(id, dest({{0, 0}})).body;
    REQUIRE(in["obligations"].size() == 1);
    CHECK(in["obligations"][0]["owedZone"] == 2);
    CHECK(in["obligations"][0]["countdown"] == 2);
    m.advance(id);
    CHECK(m.move(id, dest({{0, 0}})).body["obligations"][0]["countdown"] == 1);
    m.advance(id);
    const json late = m.move(id, dest({{0, 0}})).body;
    CHECK(late["status"] == "violation");
    CHECK(late["clause"] == "ExitDeadline");
}

TEST_CASE("belief overlay") {
    SessionManager m;
    const std::string perfect = open(m, "fig2", "cops");
    const json b = m.belief(perfect).body;
    CHECK(b["perfect"] == true);
    CHECK_FALSE(b.contains("human"));

    const std::string zi = open(m, "corridor-zi", "robbers");
    const json z = m.belief(zi).body;
    CHECK(z["perfect"] == false);
    CHECK(z["human"]["observer"] == "robbers");
    CHECK(z["controller"]["configurations"] == 1);
    // The robber moves first and cannot see the cop four cells away.
    const ApiResponse r = m.move(zi, dest({{4, 0}}));
    REQUIRE(r.status == 200);
    const ApiResponse a = m.advance(zi);
    REQUIRE(a.status == 200);
    CHECK(a.body["controllerMove"]["destinations"] == json::parse("[[1, 0]]"));
    CHECK(m.belief(zi).body["human"]["configurations"] == 1);
}

TEST_CASE("HTTP routes") {
    SessionManager m;
    ServeOptions opt;
    opt.port = 0;
    HttpServer server(m, opt);
    const int port = server.bind();
    std::thread t([&] { server.listen(); });

    httplib::Client cli("127.0.0.1", port);
    const json body = {{"scenario", scenario("fig2")}, {"human", "cops"}};
    auto created = cli.Post("/sessions", body.dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = json::parse(created->body)["id"];

    auto early = cli.Post("/sessions/" + id + "/move", dest({{1, 0}}).dump(), "application/json");
    REQUIRE(early);
    CHECK(early->status == 409);
    auto step = cli.Post("/sessions/" + id + "/auto", "", "application/json");
    REQUIRE(step);
    CHECK(step->status == 200);
    auto again = cli.Post("/sessions/" + id + "/auto", "", "application/json");
    REQUIRE(again);
    CHECK(again->status == 409);
    auto win = cli.Post("/sessions/" + id + "/move", dest({{1, 0}}).dump(), "application/json");
    REQUIRE(win);
    CHECK(json::parse(win->body)["status"] == "capture");

    auto view = cli.Get("/sessions/" + id);
    REQUIRE(view);
    CHECK(view->status == 200);
    CHECK(json::parse(view->body)["step"] == 2);
    auto belief = cli.Get("/sessions/" + id + "/belief");
    REQUIRE(belief);
    CHECK(belief->status == 200);
    auto missing = cli.Get("/sessions/999");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto garbage = cli.Post("/sessions", "{not json", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);

    server.stop();
    t.join();
}
