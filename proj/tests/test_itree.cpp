#include "doctest.h"

#include "itree/itree.hpp"
#include "itree/laws.hpp"

using namespace itree;

namespace {

Event ev(const char* n) { return Event(Channel::intern(std::string("t.") + n, n), Value::unit()); }

ITree pre(Event e, const ITree& k)
{
    Choices cs;
    cs.append(e, Lazy::now(k));
    return ITree::vis(std::move(cs));
}

}  // namespace

TEST_CASE("values print canonically")
{
    CHECK(Value::unit().str() == "()");
    CHECK(Value::integer(-3).str() == "-3");
    CHECK(pair(Value::dir(Dir::In), Value::integer(-3)).str() == "(Din,-3)");
    CHECK(Value::enumLit("Angle", 0, "Front", "Chemical_Angle").str() == "Chemical_Angle_Front");
    CHECK(Value::boolean(true).str() == "True");
    CHECK_THROWS(Value::list({Value::unit(), Value::unit(), Value::unit()}, 2));
}

TEST_CASE("events are interned")
{
    Event a = Event(Channel::intern("t.x", "X"), Value::integer(1));
    Event b = Event(Channel::intern("t.x"), Value::integer(1));
    CHECK(a == b);
    CHECK(a.str() == "X 1");
    CHECK(Event() != a);
    EventSet s{a};
    CHECK(s.contains(b));
    CHECK(!s.contains(ev("other")));
}

TEST_CASE("basic trees")
{
    CHECK(observe(stop()).kind == Observation::Kind::Stuck);
    ITree d = div();
    REQUIRE(d.isSil());
    CHECK(d.next().force().isSil());
    CHECK(d.next().force().next().force().isSil());
    Event a = ev("a");
    ITree r = run({a});
    REQUIRE(r.isVis());
    ITree r2 = r.choices().at(a).force();
    CHECK(r2.choices().keys() == std::vector<Event>{a});
}

TEST_CASE("observe strips silent steps within budget")
{
    Observation o = observe(ITree::sil(Lazy::now(skip())), 10);
    CHECK(o.kind == Observation::Kind::Terminated);
    CHECK(o.value == Value::unit());
    CHECK(o.taus == 1);
    Observation dv = observe(div(), 100);
    CHECK(dv.kind == Observation::Kind::TauBudgetExceeded);
    CHECK(dv.taus == 100);
    Observation c = observe(pre(ev("a"), skip()), 10);
    CHECK(c.kind == Observation::Kind::Choices);
    CHECK(c.events() == std::vector<Event>{ev("a")});
}

TEST_CASE("bind equations")
{
    auto succ = [](const Value& v) { return ret(Value::integer(v.asInt() + 1)); };
    CHECK(approxEq(itree::bind(ret(Value::integer(5)), [](const Value& v) { return ret(v); }), ret(Value::integer(5)), 10));
    ITree b = itree::bind(ITree::sil(Lazy::now(ret(Value::integer(1)))), succ);
    CHECK(approxEq(b, ITree::sil(Lazy::now(ret(Value::integer(2)))), 10));
    CHECK(approxEq(itree::bind(stop(), succ), stop(), 10));
}

TEST_CASE("iterate and loop")
{
    CHECK(approxEq(iterate([](const Value&) { return false; }, [](const Value& v) { return ret(v); }, Value::integer(0)),
                   ret(Value::integer(0)), 10));
    ITree it = iterate([](const Value& s) { return s.asInt() < 2; },
                       [](const Value& s) { return ret(Value::integer(s.asInt() + 1)); }, Value::integer(0));
    Observation o = observe(it);
    CHECK(o.kind == Observation::Kind::Terminated);
    CHECK(o.value == Value::integer(2));

    Channel cnt = Channel::intern("t.count", "count");
    ITree l = loop([cnt](const Value& s) {
        Choices cs;
        cs.append(Event(cnt, s), Lazy::now(ret(Value::integer(s.asInt() + 1))));
        return ITree::vis(std::move(cs));
    }, Value::integer(0));
    ITree cur = l;
    for (int i = 0; i < 3; ++i) {
        Observation ob = observe(cur);
        REQUIRE(ob.kind == Observation::Kind::Choices);
        CHECK(ob.events() == std::vector<Event>{Event(cnt, Value::integer(i))});
        cur = ob.node.choices()[0].second.force();
    }
}

TEST_CASE("approxEq")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        ITree p = laws::randomTree(rng, laws::smallUniverse(), 5);
        CHECK(approxEq(p, p, 10));
    }
    CHECK(approxEq(stop(), ITree::vis({}), 3));
    CHECK_FALSE(approxEq(div(), ITree::sil(Lazy::now(stop())), 2));
    // menu order is not significant
    Event a = ev("a"), b = ev("b");
    Choices x, y;
    x.append(a, Lazy::now(skip()));
    x.append(b, Lazy::now(stop()));
    y.append(b, Lazy::now(stop()));
    y.append(a, Lazy::now(skip()));
    CHECK(approxEq(ITree::vis(x), ITree::vis(y), 5));
}
