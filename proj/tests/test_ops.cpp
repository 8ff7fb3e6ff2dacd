#include "doctest.h"

#include "itree/laws.hpp"
#include "itree/ops.hpp"

using namespace itree;

namespace {

Event ev(const char* n) { return Event(Channel::intern(std::string("t.") + n, n), Value::unit()); }

ITree pre(Event e, const ITree& k)
{
    Choices cs;
    cs.append(e, Lazy::now(k));
    return ITree::vis(std::move(cs));
}

ITree menu(std::initializer_list<std::pair<Event, ITree>> es)
{
    Choices cs;
    for (const auto& [x, k] : es)
        cs.insert(x, Lazy::now(k));
    return ITree::vis(std::move(cs));
}

const Value one = Value::integer(1), two = Value::integer(2);

}  // namespace

TEST_CASE("prefixes and guards")
{
    Channel flag = Channel::intern("t.flag", "flag");
    Observation o = observe(outp(flag));
    CHECK(o.events() == std::vector<Event>{Event(flag, Value::unit())});
    CHECK(approxEq(guard(false), stop(), 5));
    CHECK(approxEq(guard(true), skip(), 5));
    Channel gas = Channel::intern("t.gas", "gas");
    std::vector<Value> vs{Value::list({}, 2), Value::list({one}, 2)};
    ITree g = inp(gas, vs);
    REQUIRE(g.choices().size() == 2);
    for (size_t i = 0; i < 2; ++i)
        CHECK(g.choices()[i].second.force().value() == vs[i]);
}

TEST_CASE("generalised choice equations")
{
    MergeFn m = mergeExclFn();
    CHECK(approxEq(genchoice(ret(one), m, ret(one)), ret(one), 5));
    CHECK(approxEq(genchoice(ret(one), m, ret(two)), stop(), 5));
    ITree p = pre(ev("a"), skip());
    ITree g = genchoice(ITree::sil(Lazy::now(p)), m, pre(ev("b"), skip()));
    REQUIRE(g.isSil());
    CHECK(approxEq(g.next().force(), genchoice(p, m, pre(ev("b"), skip())), 5));
    CHECK(approxEq(genchoice(ret(one), m, p), ret(one), 5));
    Choices sample;
    sample.append(ev("a"), Lazy::now(skip()));
    CHECK(wellFormedMerge(mergeExclFn(), sample));
    CHECK(wellFormedMerge(overrideFn(), sample));
    CHECK_FALSE(wellFormedMerge([](const Choices& f, const Choices&) { return f; }, sample));
}

TEST_CASE("external choice")
{
    Event a = ev("a"), b = ev("b"), e1 = ev("e1"), e2 = ev("e2"), e3 = ev("e3");
    CHECK(approxEq(extchoice(pre(a, ret(one)), pre(a, ret(two))), stop(), 5));
    ITree p = menu({{a, ret(one)}, {b, stop()}});
    CHECK(approxEq(extchoice(p, stop()), p, 10));
    ITree lhs = menu({{e1, ret(one)}, {e2, ret(two)}});
    ITree rhs = menu({{e3, skip()}, {e2, stop()}});
    CHECK(approxEq(extchoice(lhs, rhs), menu({{e1, ret(one)}, {e3, skip()}}), 10));
}

TEST_CASE("biased choice prefers the left operand")
{
    Event a = ev("a"), b = ev("b");
    CHECK(approxEq(extchoiceBiased(pre(a, ret(one)), pre(a, ret(two))), pre(a, ret(one)), 5));
    ITree p = menu({{a, ret(one)}});
    CHECK(approxEq(extchoiceBiased(stop(), p), p, 5));
    CHECK(approxEq(extchoiceBiased(pre(a, ret(one)), pre(b, ret(two))), menu({{a, ret(one)}, {b, ret(two)}}), 5));
}

TEST_CASE("parallel composition")
{
    Event a = ev("a"), b = ev("b"), c = ev("c");
    CHECK(approxEq(parallel(ret(one), ret(two), EventSet{}), ret(pair(one, two)), 5));
    ITree s = parallel(pre(a, skip()), pre(a, skip()), EventSet{a});
    CHECK(approxEq(s, pre(a, ret(pair(Value::unit(), Value::unit()))), 5));
    CHECK(approxEq(parallel(pre(a, skip()), stop(), EventSet{b}), pre(a, parallel(skip(), stop(), EventSet{b})), 5));
    // synchronised, then right-only, then left-only
    ITree l = menu({{a, skip()}, {b, skip()}});
    ITree r = menu({{c, skip()}, {a, skip()}});
    CHECK(parallel(l, r, EventSet{a}).choices().keys() == std::vector<Event>{a, c, b});
    // off-sync events offered by both sides are dropped
    CHECK(parallel(pre(b, skip()), pre(b, skip()), EventSet{}).choices().empty());
    // a terminated side blocks the synchronised events of the other
    ITree t = parallel(skip(), menu({{a, skip()}, {b, skip()}}), EventSet{a});
    CHECK(t.choices().keys() == std::vector<Event>{b});
}

TEST_CASE("hiding")
{
    Event a = ev("a"), b = ev("b"), c = ev("c"), d = ev("d");
    ITree P = pre(c, ret(one)), Q = pre(d, ret(two));
    ITree ab = menu({{a, P}, {b, Q}});
    CHECK(approxEq(hide(ab, EventSet{a}), ITree::sil(Lazy::now(hide(P, EventSet{a}))), 10));
    CHECK(approxEq(hide(ab, EventSet{a, b}), stop(), 10));
    CHECK(approxEq(hide(ret(one), EventSet{a}), ret(one), 10));
    CHECK(approxEq(hidep(ab, {a, b}), ITree::sil(Lazy::now(P)), 10));
    CHECK(approxEq(hidep(ab, {b, a}), ITree::sil(Lazy::now(Q)), 10));
    CHECK_FALSE(approxEq(hidep(ab, {a, b}), hidep(ab, {b, a}), 10));
    CHECK(approxEq(hidep(ab, {}), ab, 10));
    CHECK(approxEq(hidep(ab, {a, b}), hidepFold(ab, {a, b}), 10));
}

TEST_CASE("renaming")
{
    Event e1 = ev("e1"), e2 = ev("e2"), e3 = ev("e3"), e4 = ev("e4"), e = ev("e"), ea = ev("ea"), eb = ev("eb");
    ITree P = ret(one), Q = ret(two), R = ret(Value::integer(3));
    ITree three = menu({{e1, P}, {e2, Q}, {e3, R}});
    CHECK(approxEq(rename(three, Renaming{{e1, e}, {e2, e}, {e3, ea}, {e4, eb}}), menu({{ea, R}}), 10));
    CHECK(approxEq(rename(ret(one), Renaming{{e1, e}}), ret(one), 10));
    Event a = ev("a"), c = ev("c");
    CHECK(approxEq(rename(pre(a, skip()), Renaming{{a, c}}), pre(c, skip()), 10));

    RenamingSeq rs{{e1, e}, {e2, e}, {e3, ea}, {e4, eb}};
    CHECK(approxEq(renamep(three, rs), menu({{e, P}, {ea, R}}), 10));
    CHECK(renamep(three, rs).choices().keys() == std::vector<Event>{e, ea});
    RenamingSeq rs2{{e2, e}, {e1, e}, {e3, ea}, {e4, eb}};
    CHECK(approxEq(renamep(three, rs2), menu({{e, Q}, {ea, R}}), 10));
    CHECK(approxEq(renamep(three, RenamingSeq{}), stop(), 10));
    CHECK(approxEq(renamep(three, rs), renamepSpec(three, rs), 10));
}

TEST_CASE("interrupt")
{
    Event a = ev("a"), b = ev("b");
    ITree Q = pre(b, ret(two));
    CHECK(approxEq(interrupt(ret(one), Q), ret(one), 5));
    CHECK(approxEq(interrupt(pre(a, ret(one)), pre(a, ret(two))), pre(a, ret(two)), 5));
    ITree i = interrupt(pre(a, ret(one)), Q);
    CHECK(approxEq(i, menu({{a, interrupt(ret(one), Q)}, {b, ret(two)}}), 10));
}

TEST_CASE("exception")
{
    Event a = ev("a"), b = ev("b");
    ITree P = ret(one), Q = ret(two);
    CHECK(approxEq(exception(ret(one), EventSet{a}, Q), ret(one), 5));
    CHECK(approxEq(exception(pre(a, P), EventSet{a}, Q), pre(a, Q), 5));
    CHECK(approxEq(exception(pre(b, P), EventSet{a}, Q), pre(b, exception(P, EventSet{a}, Q)), 5));
}

TEST_CASE("property suite")
{
    laws::Options o;
    o.cases = 200;
    for (const auto& r : laws::runSerial(o)) {
        INFO(r.name << "\n" << r.counterexample);
        CHECK(r.ok());
    }
    for (const auto& x : laws::microExamples()) {
        INFO(x.name);
        CHECK(x.ok);
    }
}

TEST_CASE("parallel law runner agrees with the serial reference")
{
    laws::Options o;
    o.cases = 100;
    o.brokenMerge = true;
    auto s = laws::runSerial(o);
    auto p = laws::runParallel(o);
    REQUIRE(s.size() == p.size());
    bool anyFailed = false;
    for (size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].failures == p[i].failures);
        CHECK(s[i].firstFailure == p[i].firstFailure);
        CHECK(s[i].counterexample == p[i].counterexample);
        anyFailed = anyFailed || !s[i].ok();
    }
    CHECK(anyFailed);
}
