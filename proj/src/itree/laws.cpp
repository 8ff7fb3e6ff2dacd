#include "itree/laws.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <unordered_set>

namespace itree::laws {

namespace {

uint64_t splitmix(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Event ev(const char* n) { return Event(Channel::intern(std::string("law.") + n, n), Value::unit()); }

}  // namespace

const Universe& smallUniverse()
{
    static const Universe u{
        {ev("a"), ev("b"), ev("c"), ev("d")},
        {Value::integer(0), Value::integer(1), Value::integer(2)},
    };
    return u;
}

ITree randomTree(std::mt19937_64& rng, const Universe& u, size_t depth)
{
    auto pick = [&](size_t n) { return static_cast<size_t>(rng() % n); };
    if (depth <= 1)
        return pick(4) == 0 ? stop() : ITree::ret(u.values[pick(u.values.size())]);
    size_t r = pick(10);
    if (r < 2)
        return ITree::ret(u.values[pick(u.values.size())]);
    if (r < 4)
        return ITree::sil(Lazy::now(randomTree(rng, u, depth - 1)));
    std::vector<Event> es = u.events;
    std::shuffle(es.begin(), es.end(), rng);
    es.resize(pick(std::min<size_t>(es.size(), 3) + 1));
    Choices cs;
    for (Event e : es)
        cs.append(e, Lazy::now(randomTree(rng, u, depth - 1)));
    return ITree::vis(std::move(cs));
}

Kont randomKont(uint64_t seed, const Universe& u, size_t depth)
{
    return [seed, &u, depth](const Value& v) {
        std::mt19937_64 r(splitmix(seed ^ v.hash()));
        return randomTree(r, u, depth);
    };
}

bool distinctKeys(const ITree& p, size_t depth)
{
    if (depth == 0)
        return true;
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return true;
    case ITree::Kind::Sil:
        return distinctKeys(p.next().force(), depth - 1);
    case ITree::Kind::Vis: {
        std::unordered_set<uint32_t> seen;
        for (const auto& [e, c] : p.choices())
            if (!seen.insert(e.id()).second)
                return false;
        for (const auto& [e, c] : p.choices())
            if (!distinctKeys(c.force(), depth - 1))
                return false;
        return true;
    }
    }
    return false;
}

namespace {

using Failure = std::optional<std::string>;

struct Case {
    ITree p, q, r;
    uint64_t seed;
};

std::string operands(const Case& c)
{
    return "P = " + show(c.p, 8) + "\nQ = " + show(c.q, 8);
}

MergeFn brokenMergeFn()
{
    // forgets the right operand: M(∅, F) = ∅ ≠ F
    return [](const Choices& f, const Choices&) { return f; };
}

HideList randomHideList(std::mt19937_64& rng, const Universe& u)
{
    HideList el = u.events;
    std::shuffle(el.begin(), el.end(), rng);
    el.resize(rng() % (el.size() + 1));
    return el;
}

RenamingSeq randomRenSeq(std::mt19937_64& rng, const Universe& u)
{
    RenamingSeq rs;
    size_t n = rng() % 7;
    for (size_t i = 0; i < n; ++i) {
        Event s = u.events[rng() % u.events.size()];
        Event t = u.events[rng() % u.events.size()];
        bool dup = false;
        for (const auto& [a, b] : rs)
            dup = dup || (a == s && b == t);
        if (!dup)
            rs.append(s, t);
    }
    return rs;
}

struct Law {
    std::string name;
    std::function<Failure(const Case&, const Options&)> check;
};

const std::vector<Law>& allLaws()
{
    static const std::vector<Law> laws = [] {
        std::vector<Law> ls;
        auto eq = [](const ITree& a, const ITree& b, const Options& o) { return approxEq(a, b, o.eqDepth); };
        auto choiceMerge = [](const Options& o) { return o.brokenMerge ? brokenMergeFn() : mergeExclFn(); };

        ls.push_back({"stop is a unit of choice", [=](const Case& c, const Options& o) -> Failure {
                          for (const MergeFn& m : {choiceMerge(o), overrideFn()})
                              if (!eq(genchoice(c.p, m, stop()), c.p, o) || !eq(genchoice(stop(), m, c.p), c.p, o))
                                  return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"div is a zero of choice", [=](const Case& c, const Options& o) -> Failure {
                          for (const MergeFn& m : {choiceMerge(o), overrideFn()})
                              if (!eq(genchoice(c.p, m, div()), div(), o) || !eq(genchoice(div(), m, c.p), div(), o))
                                  return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"external choice commutes", [=](const Case& c, const Options& o) -> Failure {
                          MergeFn m = choiceMerge(o);
                          if (!eq(genchoice(c.p, m, c.q), genchoice(c.q, m, c.p), o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"converse merge", [=](const Case& c, const Options& o) -> Failure {
                          MergeFn m = overrideFn();
                          if (!eq(genchoice(c.p, m, c.q), genchoice(c.q, converse(m), c.p), o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"bind left unit", [=](const Case& c, const Options& o) -> Failure {
                          Kont k = randomKont(c.seed, smallUniverse(), 3);
                          for (const Value& v : smallUniverse().values)
                              if (!eq(itree::bind(ret(v), k), k(v), o))
                                  return "v = " + v.str();
                          return std::nullopt;
                      }});
        ls.push_back({"bind right unit", [=](const Case& c, const Options& o) -> Failure {
                          if (!eq(itree::bind(c.p, [](const Value& v) { return ret(v); }), c.p, o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"bind associativity", [=](const Case& c, const Options& o) -> Failure {
                          Kont k1 = randomKont(c.seed + 1, smallUniverse(), 3);
                          Kont k2 = randomKont(c.seed + 2, smallUniverse(), 3);
                          ITree lhs = itree::bind(itree::bind(c.p, k1), k2);
                          ITree rhs = itree::bind(c.p, [k1, k2](const Value& x) { return itree::bind(k1(x), k2); });
                          if (!eq(lhs, rhs, o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"silent steps take priority", [=](const Case& c, const Options& o) -> Failure {
                          ITree lhs = extchoice(ITree::sil(Lazy::now(c.p)), c.q);
                          if (!lhs.isSil() || !eq(lhs.next().force(), extchoice(c.p, c.q), o))
                              return operands(c);
                          Observation ob = observe(extchoice(ITree::sil(Lazy::now(c.p)), c.q));
                          if (ob.taus < 1)
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"prioritised hiding is a fold of hides", [=](const Case& c, const Options& o) -> Failure {
                          std::mt19937_64 rng(c.seed ^ 0x68696465ULL);
                          HideList el = randomHideList(rng, smallUniverse());
                          if (!eq(hidep(c.p, el), hidepFold(c.p, el), o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"prioritised renaming matches its equation", [=](const Case& c, const Options& o) -> Failure {
                          std::mt19937_64 rng(c.seed ^ 0x72656eULL);
                          RenamingSeq rs = randomRenSeq(rng, smallUniverse());
                          if (!eq(renamep(c.p, rs), renamepSpec(c.p, rs), o))
                              return operands(c);
                          return std::nullopt;
                      }});
        ls.push_back({"operators stay deterministic", [=](const Case& c, const Options& o) -> Failure {
                          std::mt19937_64 rng(c.seed ^ 0x646574ULL);
                          const Universe& u = smallUniverse();
                          EventSet sync{u.events[0], u.events[1]};
                          RenamingSeq rs = randomRenSeq(rng, u);
                          Renaming rho;
                          for (const auto& [s, t] : rs)
                              rho.append(s, t);
                          std::vector<ITree> outs = {
                              parallel(c.p, c.q, sync), interleave(c.p, c.q), extchoice(c.p, c.q),
                              extchoiceBiased(c.p, c.q), interrupt(c.p, c.q), exception(c.p, sync, c.q),
                              renamep(c.p, rs), rename(c.p, rho), hidep(c.p, randomHideList(rng, u)),
                          };
                          for (const ITree& t : outs)
                              if (!distinctKeys(t, o.eqDepth))
                                  return operands(c);
                          return std::nullopt;
                      }});
        return ls;
    }();
    return laws;
}

Case makeCase(const Options& o, size_t i)
{
    uint64_t seed = splitmix(o.seed * 0x100000001b3ULL + i);
    std::mt19937_64 rng(seed);
    const Universe& u = smallUniverse();
    Case c{randomTree(rng, u, o.genDepth), randomTree(rng, u, o.genDepth), randomTree(rng, u, o.genDepth), seed};
    return c;
}

std::vector<Failure> evalCase(const Options& o, size_t i)
{
    Case c = makeCase(o, i);
    std::vector<Failure> out;
    for (const Law& l : allLaws())
        out.push_back(l.check(c, o));
    return out;
}

std::vector<LawResult> reduce(const Options& o, const std::vector<std::vector<Failure>>& perCase)
{
    std::vector<LawResult> rs;
    for (const Law& l : allLaws())
        rs.push_back(LawResult{l.name, o.cases, 0, 0, {}});
    for (size_t i = 0; i < perCase.size(); ++i)
        for (size_t k = 0; k < rs.size(); ++k)
            if (perCase[i][k]) {
                if (rs[k].failures++ == 0) {
                    rs[k].firstFailure = i;
                    rs[k].counterexample = *perCase[i][k];
                }
            }
    return rs;
}

}  // namespace

std::vector<std::string> lawNames()
{
    std::vector<std::string> ns;
    for (const Law& l : allLaws())
        ns.push_back(l.name);
    return ns;
}

std::vector<LawResult> runSerial(const Options& o)
{
    std::vector<std::vector<Failure>> perCase(o.cases);
    for (size_t i = 0; i < o.cases; ++i)
        perCase[i] = evalCase(o, i);
    return reduce(o, perCase);
}

std::vector<LawResult> runParallel(const Options& o)
{
    std::vector<std::vector<Failure>> perCase(o.cases);
    smallUniverse();  // intern before the team starts
    const long n = static_cast<long>(o.cases);
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i)
        perCase[i] = evalCase(o, static_cast<size_t>(i));
    return reduce(o, perCase);
}

std::vector<Example> microExamples()
{
    auto e = [](const char* n) { return ev(n); };
    auto pre = [](Event x, const ITree& k) {
        Choices cs;
        cs.append(x, Lazy::now(k));
        return ITree::vis(std::move(cs));
    };
    auto menu = [](std::initializer_list<std::pair<Event, ITree>> es) {
        Choices cs;
        for (const auto& [x, k] : es)
            cs.insert(x, Lazy::now(k));
        return ITree::vis(std::move(cs));
    };
    const ITree P = ret(Value::integer(1)), Q = ret(Value::integer(2)), R = ret(Value::integer(3));
    const Event e1 = e("e1"), e2 = e("e2"), e3 = e("e3"), e4 = e("e4");
    const Event ee = e("e"), ea = e("ea"), eb = e("eb"), a = e("a"), b = e("b"), c = e("c"), d = e("d");
    const ITree three = menu({{e1, P}, {e2, Q}, {e3, R}});
    const size_t k = 10;

    std::vector<Example> xs;

    Renaming rho{{e1, ee}, {e2, ee}, {e3, ea}, {e4, eb}};
    xs.push_back({"renaming blocks many-to-one conflicts", approxEq(rename(three, rho), menu({{ea, R}}), k)});

    RenamingSeq rs{{e1, ee}, {e2, ee}, {e3, ea}, {e4, eb}};
    RenamingSeq rs2{{e2, ee}, {e1, ee}, {e3, ea}, {e4, eb}};
    xs.push_back({"prioritised renaming keeps the earliest pair",
                  approxEq(renamep(three, rs), menu({{ee, P}, {ea, R}}), k) &&
                      approxEq(renamep(three, rs2), menu({{ee, Q}, {ea, R}}), k)});

    const ITree P2 = pre(c, P), Q2 = pre(d, Q);
    const ITree ab = menu({{a, P2}, {b, Q2}});
    xs.push_back({"prioritised hiding [a,b]", approxEq(hidep(ab, {a, b}), ITree::sil(Lazy::now(P2)), k)});
    xs.push_back({"prioritised hiding [b,a]", approxEq(hidep(ab, {b, a}), ITree::sil(Lazy::now(Q2)), k)});

    xs.push_back({"interrupt gives shared events to the interrupter", approxEq(interrupt(pre(a, P), pre(a, Q)), pre(a, Q), k)});

    xs.push_back({"exception switches on a listed event",
                  approxEq(exception(pre(a, P), EventSet{a}, Q), pre(a, Q), k) &&
                      approxEq(exception(pre(b, P), EventSet{a}, Q), pre(b, P), k)});
    return xs;
}

}  // namespace itree::laws
