#include "doctest.h"

#include <atomic>
#include <map>
#include <random>
#include <thread>

#include "httplib.h"
#include "service/service.hpp"

using namespace svc;

namespace {

std::shared_ptr<SessionManager> manager(ServiceOptions o = {})
{
    return std::make_shared<SessionManager>(std::make_shared<Registry>(MODELS_DIR), o);
}

int status(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ServiceError& e) {
        return e.status();
    }
    return 200;
}

}  // namespace

TEST_CASE("sessions follow the animator")
{
    auto m = manager();
    Json models = m->models();
    CHECK(models.size() == 2);
    Json p = m->create("patrol", {});
    std::string sid = p["session"];
    CHECK(sid.size() == 64);
    CHECK(p["banner"] == "Starting ITree Simulation...");
    CHECK(p["menu"]["kind"] == "choices");
    CHECK(p["menu"]["events"].size() == 8);
    CHECK(p["menu"]["events"][1]["channel"] == "Cal_PatrolMod");
    CHECK(p["menu"]["events"][1]["payload_text"] == "(Din,-3)");
    CHECK(p["menu"]["events"][1]["payload"] == Json::parse(R"(["Din", -3])"));
    CHECK(p["menu"]["events"][1]["index"] == 2);

    Json r = m->choose(sid, 2);
    CHECK(r["events"].size() == 1);
    CHECK(r["events"][0]["text"] == "Right_PatrolMod (Dout,-2)");
    CHECK(r["history_len"] == 1);
    CHECK(r["event"]["text"] == "Cal_PatrolMod (Din,-3)");

    CHECK(status([&] { m->choose(sid, 99); }) == 400);
    CHECK(m->history(sid)["history"].size() == 1);
    m->choose(sid, 1);
    m->choose(sid, 1);
    Json h = m->history(sid)["history"];
    REQUIRE(h.size() == 3);
    CHECK(h[1]["text"] == "Right_PatrolMod (Dout,-2)");
    CHECK(h[2]["text"] == "Right_PatrolMod (Dout,-2)");
    Json z = m->reset(sid);
    CHECK(z["events"].size() == 8);
    CHECK(m->history(sid)["history"].empty());
}

TEST_CASE("chemical sessions terminate")
{
    auto m = manager();
    Json c = m->create("chemical", {});
    std::string sid = c["session"];
    CHECK(c["menu"]["events"].size() == 22);
    for (int i : {1, 9, 1})
        m->choose(sid, i);
    Json t = m->choose(sid, 1);
    CHECK(t["kind"] == "terminated");
    CHECK(status([&] { m->choose(sid, 1); }) == 409);
    CHECK(m->history(sid)["history"].size() == 4);
}

TEST_CASE("service errors")
{
    auto m = manager();
    CHECK(status([&] { m->create("nope", {}); }) == 404);
    CHECK(status([&] { m->create("patrol", {{"max_int", "x"}}); }) == 400);
    CHECK(status([&] { m->choose("deadbeef", 1); }) == 404);
    Json a = m->create("patrol", {{"min_int", "-2"}, {"max_int", "2"}});
    CHECK(a["menu"]["events"].size() == 6);
}

TEST_CASE("idle sessions expire")
{
    ServiceOptions o;
    o.idleTimeout = std::chrono::seconds(60);
    auto m = manager(o);
    std::string sid = m->create("patrol", {})["session"];
    CHECK(m->expire(SessionManager::Clock::now()) == 0);
    CHECK(m->expire(SessionManager::Clock::now() + std::chrono::seconds(61)) == 1);
    CHECK(m->live() == 0);
    CHECK(status([&] { m->history(sid); }) == 404);
}

TEST_CASE("concurrent sessions keep independent histories")
{
    auto m = manager();
    const size_t n = 8;
    std::vector<std::string> ids;
    for (size_t i = 0; i < n; ++i)
        ids.push_back(m->create(i % 2 ? "patrol" : "chemical", {})["session"]);
    // each accepted choice reports the history length it produced
    std::mutex mu;
    std::vector<std::map<size_t, std::string>> seen(n);
    std::atomic<int> bad{0};
    std::vector<std::thread> ts;
    for (unsigned t = 0; t < 16; ++t)
        ts.emplace_back([&, t] {
            std::mt19937 rng(t);
            for (int k = 0; k < 40; ++k) {
                size_t i = rng() % n;
                try {
                    Json r = m->choose(ids[i], static_cast<int64_t>(1 + rng() % 8));
                    std::lock_guard lk(mu);
                    if (!seen[i].emplace(r["history_len"].get<size_t>(), r["event"]["text"]).second)
                        ++bad;
                } catch (const ServiceError& e) {
                    if (e.status() != 400 && e.status() != 409)
                        ++bad;
                }
            }
        });
    for (auto& t : ts)
        t.join();
    CHECK(bad == 0);
    for (size_t i = 0; i < n; ++i) {
        Json h = m->history(ids[i])["history"];
        REQUIRE(h.size() == seen[i].size());
        for (size_t k = 0; k < h.size(); ++k)
            CHECK(h[k]["text"] == seen[i][k + 1]);
    }
}

TEST_CASE("HTTP endpoints")
{
    auto m = manager();
    ServerOptions so;
    so.port = 0;
    Server srv(m, so);
    int port = srv.bind();
    REQUIRE(port > 0);
    std::thread th([&] { srv.listen(); });
    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(5);

    auto models = cli.Get("/models");
    REQUIRE(models);
    CHECK(models->status == 200);
    CHECK(Json::parse(models->body)["models"].size() == 2);

    auto created = cli.Post("/sessions", R"({"model": "patrol"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 200);
    Json c = Json::parse(created->body);
    std::string sid = c["session"];
    CHECK(c["menu"]["events"].size() == 8);

    auto choice = cli.Post("/sessions/" + sid + "/choice", R"({"index": 2})", "application/json");
    REQUIRE(choice);
    CHECK(choice->status == 200);
    CHECK(Json::parse(choice->body)["events"][0]["text"] == "Right_PatrolMod (Dout,-2)");

    auto bad = cli.Post("/sessions/" + sid + "/choice", R"({"index": 99})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto malformed = cli.Post("/sessions/" + sid + "/choice", "{", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);

    auto hist = cli.Get("/sessions/" + sid + "/history");
    REQUIRE(hist);
    CHECK(Json::parse(hist->body)["history"].size() == 1);

    auto rst = cli.Post("/sessions/" + sid + "/reset", "", "application/json");
    REQUIRE(rst);
    CHECK(Json::parse(rst->body)["history_len"] == 0);

    auto small = cli.Post("/sessions", R"({"model": "chemical", "config": {"seq_bound": 1}})", "application/json");
    REQUIRE(small);
    CHECK(small->status == 200);
    CHECK(Json::parse(small->body)["menu"]["events"].size() == 6);
    auto badCfg = cli.Post("/sessions", R"({"model": "patrol", "config": [1]})", "application/json");
    REQUIRE(badCfg);
    CHECK(badCfg->status == 400);

    auto nope = cli.Post("/sessions", R"({"model": "nope"})", "application/json");
    REQUIRE(nope);
    CHECK(nope->status == 404);
    auto stale = cli.Get("/sessions/0123/history");
    REQUIRE(stale);
    CHECK(stale->status == 404);

    srv.stop();
    th.join();
}
