// One pass/fail line per primary acceptance criterion.
// Usage: acceptance [models-dir] [scenarios-dir]
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anim/animator.hpp"
#include "anim/explore.hpp"
#include "itree/finmap.hpp"
#include "itree/laws.hpp"
#include "rc/semantics.hpp"

using namespace itree;

namespace {

std::string modelsDir = ACCEPTANCE_MODELS_DIR;
std::string scenariosDir = ACCEPTANCE_SCENARIOS_DIR;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool c, const std::string& what)
    {
        if (!c && ok) {
            ok = false;
            detail = what;
        }
    }
};

struct Loaded {
    std::shared_ptr<rc::Model> model;
    std::shared_ptr<rc::Semantics> sem;
    ITree tree = stop();
};

Loaded load(const std::string& name)
{
    Loaded l;
    l.model = rc::Model::load(modelsDir + "/" + name + ".json");
    l.sem = std::make_shared<rc::Semantics>(l.model);
    l.tree = l.sem->module();
    return l;
}

std::vector<std::string> texts(const anim::Menu& m)
{
    std::vector<std::string> out;
    for (const Event& e : m.events)
        out.push_back(anim::eventText(e));
    return out;
}

bool hasText(const anim::Menu& m, const std::string& t)
{
    for (const auto& s : texts(m))
        if (s == t)
            return true;
    return false;
}

// Relation kernel.

using Seq = RenSeq<Event, Event>;
using Rel = FinRel<Event, Event>;

bool sameRel(const Rel& a, const Rel& b)
{
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i]))
            return false;
    return true;
}

// The oracles walk a kernel result alongside the input and check that it
// holds exactly the input items satisfying the defining predicate, in order.
template <typename S, typename Keep>
bool filtered(const S& in, const S& out, Keep keep)
{
    size_t j = 0;
    for (size_t i = 0; i < in.size(); ++i)
        if (keep(i)) {
            if (j == out.size() || !(out[j] == in[i]))
                return false;
            ++j;
        }
    return j == out.size();
}

bool dreslOracle(const EventSet& a, const Seq& rs, const Seq& out)
{
    return filtered(rs, out, [&](size_t i) { return a.contains(rs[i].first); });
}

// an item survives iff no earlier item has the same target
bool dropDupOracle(const Seq& rs, const Seq& out)
{
    return filtered(rs, out, [&](size_t i) {
        for (size_t j = 0; j < i; ++j)
            if (rs[j].second == rs[i].second)
                return false;
        return true;
    });
}

// {(x,y) in R | forall y'. (x,y') in R => y = y'}
bool mkFunctionalOracle(const Rel& r, const Rel& out)
{
    return filtered(r, out, [&](size_t i) {
        for (const auto& [x, y] : r)
            if (x == r[i].first && !(y == r[i].second))
                return false;
        return true;
    });
}

Outcome relationKernel()
{
    Outcome o;
    Event e1("acc.e1"), e2("acc.e2"), e3("acc.e3"), e4("acc.e4"), e("acc.e"), ea("acc.ea"), eb("acc.eb");

    Rel r{{e1, e2}, {e1, e3}, {e2, e3}};
    o.require(sameRel(mkFunctional(r), Rel{{e2, e3}}) && mkFunctionalOracle(r, mkFunctional(r)),
              "mkFunctional worked example");
    Seq rs{{e1, e}, {e2, e}, {e3, ea}, {e4, eb}};
    EventSet a{e1, e2, e4};
    Seq restricted = dresl(a, rs);
    o.require(restricted == Seq{{e1, e}, {e2, e}, {e4, eb}}, "dresl worked example");
    o.require(dropDup(restricted) == Seq{{e1, e}, {e4, eb}}, "dropDup worked example");

    // every sequence of distinct pairs, length <= 5, over a 4-event universe
    std::vector<Event> u{Event("acc.a"), Event("acc.b"), Event("acc.c"), Event("acc.d")};
    std::vector<std::pair<Event, Event>> pairs;
    for (const Event& s : u)
        for (const Event& t : u)
            pairs.emplace_back(s, t);
    std::vector<EventSet> subsets(16);
    for (unsigned mask = 0; mask < 16; ++mask)
        for (size_t k = 0; k < 4; ++k)
            if (mask & (1u << k))
                subsets[mask].insert(u[k]);
    size_t total = 0, bad = 0;
    for (int len = 0; len <= 5; ++len) {
        long long count = 1;
        for (int k = 0; k < len; ++k)
            count *= 16;
#pragma omp parallel for schedule(static) reduction(+ : total, bad)
        for (long long code = 0; code < count; ++code) {
            // digits of code in base 16 pick the pairs; repeated digits are
            // not sequences of the type
            unsigned used = 0;
            bool distinct = true;
            long long c = code;
            for (int k = 0; k < len; ++k, c /= 16) {
                unsigned bit = 1u << (c % 16);
                distinct = distinct && !(used & bit);
                used |= bit;
            }
            if (!distinct)
                continue;
            Seq s;
            c = code;
            for (int k = 0; k < len; ++k, c /= 16)
                s.push(pairs[static_cast<size_t>(c % 16)].first, pairs[static_cast<size_t>(c % 16)].second);
            if (!dropDupOracle(s, dropDup(s)))
                ++bad;
            for (const EventSet& sub : subsets)
                if (!dreslOracle(sub, s, dresl(sub, s)))
                    ++bad;
            Rel inv = inverse(ran(dropDup(s)));
            Rel plain;
            plain.reserve(s.size());
            for (const auto& [x, y] : s)
                plain.append(x, y);
            if (!mkFunctionalOracle(inv, mkFunctional(inv)) || !mkFunctionalOracle(plain, mkFunctional(plain)))
                ++bad;
            ++total;
        }
    }
    o.require(total == 571457, "enumerated " + std::to_string(total) + " sequences");
    o.require(bad == 0, std::to_string(bad) + " oracle disagreements");
    if (o.ok)
        o.detail = "3 worked examples, " + std::to_string(total) + " sequences agree with the oracles";
    return o;
}

Outcome operatorLaws()
{
    Outcome o;
    laws::Options opts;
    opts.cases = 1000;
    opts.genDepth = 5;
    opts.eqDepth = 10;
    size_t cases = 0;
    for (const auto& r : laws::runParallel(opts)) {
        cases += r.cases;
        o.require(r.ok() && r.cases == opts.cases, r.name + ": " + r.counterexample);
    }
    size_t examples = 0;
    for (const auto& e : laws::microExamples()) {
        ++examples;
        o.require(e.ok, "example " + e.name);
    }
    o.require(examples == 6, "expected 6 micro-examples");
    if (o.ok)
        o.detail = std::to_string(laws::lawNames().size()) + " laws x 1000 trees, " + std::to_string(examples) +
                   " micro-examples";
    return o;
}

const std::vector<std::string> kPatrolInitial{
    "Reset_PatrolMod Din",      "Cal_PatrolMod (Din,-3)", "Cal_PatrolMod (Din,-2)", "Cal_PatrolMod (Din,-1)",
    "Cal_PatrolMod (Din,0)",    "Cal_PatrolMod (Din,1)",  "Cal_PatrolMod (Din,2)",  "Cal_PatrolMod (Din,3)"};

Outcome patrolS1()
{
    Outcome o;
    Loaded l = load("patrol");
    anim::Session s(l.tree);
    o.require(texts(s.menu()) == kPatrolInitial, "initial menu");
    s.chooseText("Cal_PatrolMod (Din,-3)");
    for (const char* t : {"Right_PatrolMod (Dout,-2)", "Right_PatrolMod (Dout,-2)", "Right_PatrolMod (Dout,-1)",
                          "Right_PatrolMod (Dout,-1)", "Right_PatrolMod (Dout,0)"}) {
        o.require(texts(s.menu()) == std::vector<std::string>{t}, std::string("forced ") + t);
        if (!o.ok)
            return o;
        s.choose(1);
    }
    std::vector<std::string> eight = kPatrolInitial;
    eight[0] = "Right_PatrolMod (Dout,0)";
    o.require(texts(s.menu()) == eight, "8-event menu with Right_PatrolMod (Dout,0)");
    s.choose(1);
    o.require(texts(s.menu()) == kPatrolInitial, "initial menu returns");
    if (o.ok)
        o.detail = "8 -> 5 forced rights -> 8 -> initial";
    return o;
}

Outcome patrolCyclic()
{
    Outcome o;
    Loaded l = load("patrol");
    std::ostringstream d;
    const char* sep = "";
    for (const char* name : {"scenario2", "scenario3"}) {
        anim::Scenario sc = anim::loadScenario(scenariosDir + "/" + name + ".scn");
        o.require(sc.cyclic, std::string(name) + " is not cyclic");
        size_t cycle = sc.trace.size() - sc.cycleStart;
        anim::Report r = anim::replay(l.tree, sc, sc.cycleStart + 3 * cycle);
        o.require(r.ok() && r.cycles >= 3, std::string(name) + " " + anim::kindName(r.outcome) + " at " +
                                               std::to_string(r.accepted) + ": " + r.expected);
        d << sep << sc.name << " " << r.cycles << " cycles";
        sep = "; ";
    }
    if (o.ok)
        o.detail = d.str();
    return o;
}

Outcome resetGating()
{
    Outcome o;
    Loaded l = load("patrol");
    const std::string reset = "Reset_PatrolMod Din";
    // the SCE-PR-1 path: position 0 at the start and after the last right
    // has been taken, nonzero or update pending everywhere else
    std::vector<std::string> path{"Cal_PatrolMod (Din,-3)",   "Right_PatrolMod (Dout,-2)", "Right_PatrolMod (Dout,-2)",
                                  "Right_PatrolMod (Dout,-1)", "Right_PatrolMod (Dout,-1)", "Right_PatrolMod (Dout,0)",
                                  "Right_PatrolMod (Dout,0)"};
    anim::Session s(l.tree);
    std::ostringstream seen;
    for (size_t i = 0; i <= path.size(); ++i) {
        bool atZero = i == 0 || i == path.size();
        bool offered = hasText(s.menu(), reset);
        seen << (offered ? "R" : ".");
        o.require(offered == atZero, "menu " + std::to_string(i) + (offered ? " offers" : " lacks") + " reset");
        if (i < path.size())
            s.chooseText(path[i]);
    }
    // mid-trace reset is refused under maximal progress
    for (const char* name : {"reset", "reset-after-right"}) {
        anim::Report r = anim::replay(l.tree, anim::loadScenario(scenariosDir + "/" + name + ".scn"), 6);
        o.require(r.outcome == anim::Report::Outcome::Refused, std::string(name) + " was not refused");
    }
    if (o.ok)
        o.detail = "menus " + seen.str() + ", mid-trace reset refused";
    return o;
}

Outcome chemicalStop()
{
    Outcome o;
    Loaded l = load("chemical");
    anim::Session s(l.tree);
    o.require(s.menu().events.size() == 22, "initial menu size " + std::to_string(s.menu().events.size()));
    s.chooseText("RandomWalkCall ()");
    o.require(s.menu().events.size() == 21, "gas menu size " + std::to_string(s.menu().events.size()));
    s.chooseText("Gas (Din,[(0,0),(1,1)])");
    o.require(texts(s.menu()) == std::vector<std::string>{"MoveCall (0,Chemical_Angle_Front)"}, "forced MoveCall");
    s.choose(1);
    o.require(texts(s.menu()) == std::vector<std::string>{"Flag Dout"}, "forced Flag");
    s.choose(1);
    o.require(s.menu().kind == anim::Menu::Kind::Terminated && s.menu().value.str() == "()", "Terminated: ()");
    if (o.ok)
        o.detail = "22 -> 21 -> MoveCall -> Flag -> Terminated: ()";
    return o;
}

Outcome chemicalPrefix()
{
    Outcome o;
    Loaded l = load("chemical");
    anim::Scenario sc = anim::loadScenario(scenariosDir + "/sce-acd-2.scn");
    o.require(sc.trace.size() == 6, "prefix has " + std::to_string(sc.trace.size()) + " events");
    anim::Session s(l.tree);
    std::vector<size_t> sizes;
    for (const auto& t : sc.trace) {
        sizes.push_back(s.menu().events.size());
        try {
            s.chooseText(t);
        } catch (const anim::AnimError& e) {
            o.require(false, e.what());
            return o;
        }
    }
    o.require(sizes == std::vector<size_t>{22, 21, 22, 24, 23, 22}, "menu sizes differ");
    o.require(anim::replay(l.tree, sc, sc.trace.size()).ok(), "replay refused");
    if (o.ok)
        o.detail = "6 events, menus 22 21 22 24 23 22";
    return o;
}

Outcome specFunctions()
{
    Outcome o;
    Loaded l = load("chemical");
    const rc::Model& m = *l.model;
    size_t n = 0;
    for (const Value& s : l.model->typeTable().resolve("seq(GasSensor)")->values) {
        if (s.size() == 0) {
            o.require(m.solve("intensity", {s}).kind == rc::Solution::Kind::PreconditionViolated,
                      "intensity([]) is not a precondition violation");
            continue;
        }
        // brute force: maximal intensity, location of its first occurrence
        int64_t best = -1;
        size_t arg = 0;
        for (size_t k = 0; k < s.size(); ++k)
            if (s[k][1].asInt() > best) {
                best = s[k][1].asInt();
                arg = k;
            }
        rc::Solution in = m.solve("intensity", {s});
        rc::Solution loc = m.solve("location", {s});
        rc::Solution ang = m.solve("angle", {Value::integer(static_cast<int64_t>(arg))});
        o.require(in.kind == rc::Solution::Kind::Ok && in.value == Value::integer(best), "intensity " + s.str());
        o.require(loc.kind == rc::Solution::Kind::Ok && ang.kind == rc::Solution::Kind::Ok && loc.value == ang.value,
                  "location " + s.str());
        ++n;
    }
    if (o.ok)
        o.detail = std::to_string(n) + " sequences unique and oracle-equal, intensity([]) rejected";
    return o;
}

Outcome determinism()
{
    Outcome o;
    std::ostringstream d;
    const char* sep = "";
    for (const char* name : {"patrol", "chemical"}) {
        Loaded l = load(name);
        anim::ExploreOptions opts;
        opts.walks = 64;
        opts.depth = 200;
        opts.tauBudget = 10000;
        opts.expandChildren = true;
        anim::ExploreStats st = anim::exploreParallel(l.tree, l.sem->alphabet(), opts);
        o.require(st.ok(), std::string(name) + ": " + st.firstProblem);
        d << sep << name << " " << st.menus << " menus, max " << st.maxTaus << " taus";
        sep = "; ";
    }
    if (o.ok)
        o.detail = d.str();
    return o;
}

struct Criterion {
    const char* name;
    double limit;  // seconds
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    if (argc > 1)
        modelsDir = argv[1];
    if (argc > 2)
        scenariosDir = argv[2];
    std::vector<Criterion> cs{
        {"relation kernel", 1, relationKernel},
        {"operator laws", 30, operatorLaws},
        {"patrol SCE-PR-1", 5, patrolS1},
        {"patrol SCE-PR-2/3 cyclic", 5, patrolCyclic},
        {"reset gating", 5, resetGating},
        {"chemical SCE-ACD-1", 10, chemicalStop},
        {"chemical SCE-ACD-2 prefix", 10, chemicalPrefix},
        {"specification functions", 10, specFunctions},
        {"determinism sweep", 60, determinism},
    };
    int failed = 0;
    for (size_t i = 0; i < cs.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cs[i].run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.ok && secs >= cs[i].limit) {
            o.ok = false;
            o.detail += " (over the " + std::to_string(static_cast<int>(cs[i].limit)) + " s limit)";
        }
        failed += !o.ok;
        std::printf("%s [%zu] %-26s %7.3f s  %s\n", o.ok ? "PASS" : "FAIL", i + 1, cs[i].name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", cs.size() - static_cast<size_t>(failed), cs.size());
    return failed == 0 ? 0 : 1;
}
