#include "doctest.h"
#include "printers.hpp"

#include "anim/animator.hpp"
#include "anim/explore.hpp"
#include "rc/semantics.hpp"

using namespace anim;

namespace {

struct Fixture {
    std::shared_ptr<rc::Model> model;
    std::shared_ptr<rc::Semantics> sem;
    itree::ITree tree = itree::stop();
};

Fixture load(const std::string& name)
{
    Fixture f;
    f.model = rc::Model::load(std::string(MODELS_DIR) + "/" + name + ".json");
    f.sem = std::make_shared<rc::Semantics>(f.model);
    f.tree = f.sem->module();
    return f;
}

const Fixture& patrol()
{
    static const Fixture f = load("patrol");
    return f;
}

const Fixture& chemical()
{
    static const Fixture f = load("chemical");
    return f;
}

Scenario scenario(const std::string& name) { return loadScenario(std::string(SCENARIOS_DIR) + "/" + name + ".scn"); }

std::vector<std::string> texts(const Menu& m)
{
    std::vector<std::string> out;
    for (const auto& e : m.events)
        out.push_back(eventText(e));
    return out;
}

bool offers(const Menu& m, const std::string& s)
{
    for (const auto& t : texts(m))
        if (normalize(t) == normalize(s))
            return true;
    return false;
}

}  // namespace

TEST_CASE("patrol initial menu")
{
    Session s(patrol().tree);
    REQUIRE(s.menu().kind == Menu::Kind::Choices);
    std::vector<std::string> want = {"Reset_PatrolMod Din",     "Cal_PatrolMod (Din,-3)", "Cal_PatrolMod (Din,-2)",
                                     "Cal_PatrolMod (Din,-1)", "Cal_PatrolMod (Din,0)",  "Cal_PatrolMod (Din,1)",
                                     "Cal_PatrolMod (Din,2)",  "Cal_PatrolMod (Din,3)"};
    CHECK(texts(s.menu()) == want);
}

TEST_CASE("patrol forced segment after calibration at -3")
{
    Session s(patrol().tree);
    s.choose(2);
    const char* forced[] = {"Right_PatrolMod (Dout,-2)", "Right_PatrolMod (Dout,-2)", "Right_PatrolMod (Dout,-1)",
                            "Right_PatrolMod (Dout,-1)", "Right_PatrolMod (Dout,0)"};
    for (const char* f : forced) {
        REQUIRE(s.menu().events.size() == 1);
        CHECK(eventText(s.menu().events[0]) == f);
        s.choose(1);
    }
    REQUIRE(s.menu().events.size() == 8);
    CHECK(eventText(s.menu().events[0]) == "Right_PatrolMod (Dout,0)");
    CHECK_FALSE(offers(s.menu(), "Reset_PatrolMod Din"));
    s.choose(1);
    CHECK((texts(s.menu()) == texts(Session(patrol().tree).menu())));
    CHECK(s.history().size() == 7);
    CHECK(s.consistent());
}

TEST_CASE("chemical initial and gas menus")
{
    Session s(chemical().tree);
    REQUIRE(s.menu().events.size() == 22);
    CHECK(eventText(s.menu().events[0]) == "RandomWalkCall ()");
    CHECK(eventText(s.menu().events[1]) == "Gas (Din,[])");
    s.choose(1);
    REQUIRE(s.menu().events.size() == 21);
    CHECK(eventText(s.menu().events[8]) == "Gas (Din,[(0,0),(1,1)])");
    s.choose(9);
    REQUIRE(s.menu().events.size() == 1);
    CHECK(eventText(s.menu().events[0]) == "MoveCall (0,Chemical_Angle_Front)");
    s.choose(1);
    REQUIRE(s.menu().events.size() == 1);
    CHECK(eventText(s.menu().events[0]) == "Flag Dout");
    s.choose(1);
    CHECK(s.menu().kind == Menu::Kind::Terminated);
    CHECK(s.menu().value.str() == "()");
    CHECK_THROWS_WITH_AS(s.choose(1), "terminated", AnimError);
}

TEST_CASE("session errors leave the state unchanged")
{
    Session s(patrol().tree);
    CHECK_THROWS_AS(s.choose(0), AnimError);
    CHECK_THROWS_AS(s.choose(9), AnimError);
    CHECK_THROWS_AS(s.chooseText("Left_PatrolMod (Dout,1)"), AnimError);
    CHECK(s.history().empty());
    CHECK(s.menu().events.size() == 8);
    s.choose(3);
    s.reset();
    CHECK(s.history().empty());
    CHECK(s.menu().events.size() == 8);
}

TEST_CASE("stuck and terminated trees")
{
    CHECK(Session(itree::stop()).menu().kind == Menu::Kind::Stuck);
    CHECK(Session(itree::skip()).menu().kind == Menu::Kind::Terminated);
    CHECK(Session(itree::div(), 50).menu().kind == Menu::Kind::TauBudget);
}

TEST_CASE("scenario parsing")
{
    Scenario sc = parseScenario("@name demo\n# comment\n  Cal_PatrolMod (Din,-3)  # trailing\n\n@cycle 0\n");
    CHECK(sc.name == "demo");
    REQUIRE(sc.trace.size() == 1);
    CHECK(sc.trace[0] == "Cal_PatrolMod (Din,-3)");
    CHECK(sc.cyclic);
    CHECK_THROWS_AS(parseScenario("a\n@cycle 3\n"), AnimError);
    CHECK_THROWS_AS(parseScenario("@cycle x\na\n"), AnimError);
    CHECK_THROWS_AS(parseScenario("@bogus\n"), AnimError);
    CHECK_THROWS_AS(loadScenario("/nonexistent.scn"), AnimError);
}

TEST_CASE("scenario events are checked against the alphabet")
{
    CHECK_NOTHROW(checkScenario(scenario("scenario1"), patrol().sem->alphabet()));
    CHECK_NOTHROW(checkScenario(scenario("sce-acd-2-full"), chemical().sem->alphabet()));
    CHECK_THROWS_AS(checkScenario(parseScenario("Cal_PatrolMod (Din,9)\n"), patrol().sem->alphabet()), AnimError);
}

TEST_CASE("patrol scenarios replay")
{
    CHECK(replay(patrol().tree, scenario("sce-pr-1"), 100).ok());
    CHECK(replay(patrol().tree, scenario("sce-pr-2"), 100).ok());
    CHECK(replay(patrol().tree, scenario("sce-pr-3"), 100).ok());
    Report r1 = replay(patrol().tree, scenario("scenario1"), 42);
    CHECK(r1.ok());
    CHECK(r1.accepted == 42);
    CHECK(r1.cycles == 6);
    Report r2 = replay(patrol().tree, scenario("scenario2"), 1 + 4 * 3);
    CHECK(r2.ok());
    CHECK(r2.cycles == 3);
    Report r3 = replay(patrol().tree, scenario("scenario3"), 5 + 4 * 3);
    CHECK(r3.ok());
    CHECK(r3.cycles == 3);
}

TEST_CASE("mid-trace reset is refused")
{
    Report r = replay(patrol().tree, scenario("reset"), 6);
    CHECK(r.outcome == Report::Outcome::Refused);
    CHECK(r.accepted == 1);
    CHECK(r.expected == "Left_PatrolMod (Dout,-1)");
    Report q = replay(patrol().tree, scenario("reset-after-right"), 6);
    CHECK(q.outcome == Report::Outcome::Refused);
    CHECK(q.accepted == 2);
    CHECK(q.expected == "Reset_PatrolMod Din");
    CHECK_FALSE(offers(q.menu, "Reset_PatrolMod Din"));
}

TEST_CASE("replay edge cases")
{
    CHECK(replay(patrol().tree, scenario("empty"), 0).ok());
    CHECK(replay(patrol().tree, scenario("empty"), 5).accepted == 0);
    Report t = replay(chemical().tree, parseScenario("RandomWalkCall ()\nGas (Din,[(0,0),(1,1)])\n"
                                                      "MoveCall (0,Chemical_Angle_Front)\nFlag Dout\nGas (Din,[])\n"),
                      10);
    CHECK(t.outcome == Report::Outcome::Terminated);
    CHECK(t.accepted == 4);
    Report d = replay(itree::div(), parseScenario("x\n"), 1, 100);
    CHECK(d.outcome == Report::Outcome::Divergence);
    // same scenario, same Report
    Report a = replay(patrol().tree, scenario("reset"), 6), b = replay(patrol().tree, scenario("reset"), 6);
    CHECK(a.accepted == b.accepted);
    CHECK(a.expected == b.expected);
    CHECK(a.menu.events == b.menu.events);
}

TEST_CASE("chemical scenarios replay")
{
    CHECK(replay(chemical().tree, scenario("sce-acd-1"), 100).ok());
    CHECK(replay(chemical().tree, scenario("sce-acd-2"), 100).ok());
    CHECK(replay(chemical().tree, scenario("sce-acd-2-full"), 100).ok());
}

TEST_CASE("trace membership")
{
    CHECK(traceMember(patrol().tree, scenario("sce-pr-2").trace));
    CHECK(traceMember(patrol().tree, scenario("sce-pr-3").trace));
    CHECK_FALSE(traceMember(chemical().tree, {"Flag Dout"}));
    CHECK(traceMember(chemical().tree, {}));
}

TEST_CASE("exploration runners agree and find no violations")
{
    ExploreOptions o;
    o.walks = 4;
    o.depth = 40;
    for (const Fixture* f : {&patrol(), &chemical()}) {
        ExploreStats s = exploreSerial(f->tree, f->sem->alphabet(), o);
        ExploreStats p = exploreParallel(f->tree, f->sem->alphabet(), o);
        CHECK(s.ok());
        CHECK(s == p);
        CHECK(s.menus > 0);
    }
}

TEST_CASE("exploration detects alphabet violations")
{
    itree::EventSet tiny{itree::Event(itree::Channel::intern("nothing"), itree::Value::unit())};
    ExploreOptions o;
    o.walks = 1;
    o.depth = 2;
    ExploreStats s = exploreSerial(patrol().tree, tiny, o);
    CHECK(s.outsideAlphabet > 0);
    CHECK_FALSE(s.ok());
}
