#include "doctest.h"

#include <algorithm>
#include <set>
#include <functional>
#include <random>
#include <string>

#include "itree/finmap.hpp"

using namespace itree;

namespace {

using M = FinMap<std::string, int>;
using Seq = RenSeq<std::string, std::string>;

bool sameMap(const M& a, const M& b)
{
    if (a.size() != b.size())
        return false;
    for (const auto& [k, v] : a)
        if (!b.contains(k) || b.at(k) != v)
            return false;
    return true;
}

struct Names {
    std::set<std::string> s;
    bool contains(const std::string& x) const { return s.count(x) != 0; }
};

// naive quadratic oracle: item i survives iff no j < i shares its target
Seq dropDupNaive(const Seq& rs)
{
    Seq out;
    for (size_t i = 0; i < rs.size(); ++i) {
        bool earlier = false;
        for (size_t j = 0; j < i; ++j)
            earlier = earlier || rs[j].second == rs[i].second;
        if (!earlier)
            out.append(rs[i].first, rs[i].second);
    }
    return out;
}

}  // namespace

TEST_CASE("override agrees with the right operand on its domain")
{
    M f{{"a", 1}, {"b", 2}};
    M g{{"b", 3}};
    CHECK(sameMap(override(f, g), M{{"a", 1}, {"b", 3}}));
    CHECK(sameMap(override(f, M{}), f));
    CHECK(sameMap(override(M{}, M{{"c", 4}}), M{{"c", 4}}));
    CHECK(override(f, M{{"c", 5}}).keys() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("exclusive merge drops shared keys")
{
    M f{{"e1", 1}, {"e2", 2}};
    M g{{"e3", 3}, {"e2", 4}};
    CHECK(sameMap(mergeExcl(f, g), M{{"e1", 1}, {"e3", 3}}));
    CHECK(sameMap(mergeExcl(M{}, f), f));
    CHECK(sameMap(mergeExcl(f, M{}), f));
    CHECK(mergeExcl(M{{"a", 1}}, M{{"a", 2}}).empty());
}

TEST_CASE("restriction and inverse")
{
    M f{{"a", 1}, {"b", 2}};
    Names a{{"a"}};
    CHECK(sameMap(antiRestrict(a, f), M{{"b", 2}}));
    CHECK(sameMap(domRestrict(a, f), M{{"a", 1}}));
    FinRel<std::string, std::string> r{{"e1", "e"}};
    auto inv = inverse(r);
    REQUIRE(inv.size() == 1);
    CHECK(inv[0] == std::make_pair(std::string("e"), std::string("e1")));
}

TEST_CASE("duplicate keys are rejected")
{
    M f;
    f.insert("a", 1);
    CHECK_THROWS_AS(f.insert("a", 2), std::invalid_argument);
    Seq s;
    s.push("a", "b");
    CHECK_THROWS_AS(s.push("a", "b"), std::invalid_argument);
}

TEST_CASE("mkFunctional keeps the functional part")
{
    FinRel<std::string, std::string> r{{"e1", "e2"}, {"e1", "e3"}, {"e2", "e3"}};
    auto f = mkFunctional(r);
    REQUIRE(f.size() == 1);
    CHECK(f[0] == std::make_pair(std::string("e2"), std::string("e3")));
    CHECK(mkFunctional(FinRel<std::string, std::string>{}).empty());
    FinRel<std::string, std::string> fn{{"a", "x"}, {"b", "y"}};
    CHECK(mkFunctional(fn).size() == 2);
    CHECK(mkFunctional(mkFunctional(r)).size() == f.size());
}

TEST_CASE("dresl and dropDup on the worked example")
{
    Seq rs{{"e1", "e"}, {"e2", "e"}, {"e3", "ea"}, {"e4", "eb"}};
    Names a{{"e1", "e2", "e4"}};
    Seq r = dresl(a, rs);
    CHECK(r == Seq{{"e1", "e"}, {"e2", "e"}, {"e4", "eb"}});
    CHECK(dropDup(r) == Seq{{"e1", "e"}, {"e4", "eb"}});
    CHECK(dresl(Names{}, rs).empty());
    CHECK(dresl(Names{{"e1", "e2", "e3", "e4"}}, rs) == rs);
    CHECK(dropDup(Seq{}).empty());
    Seq distinct{{"a", "x"}, {"b", "y"}};
    CHECK(dropDup(distinct) == distinct);
}

TEST_CASE("dropDup and dresl agree with quadratic oracles on all short sequences")
{
    const std::vector<std::string> u{"a", "b", "c", "d"};
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& s : u)
        for (const auto& t : u)
            pairs.emplace_back(s, t);
    size_t checked = 0, bad = 0;
    std::vector<size_t> idx;
    std::function<void()> go = [&] {
        Seq rs;
        for (size_t i : idx)
            rs.append(pairs[i].first, pairs[i].second);
        Seq dd = dropDup(rs);
        std::set<std::string> targets;
        for (const auto& [s, t] : dd)
            targets.insert(t);
        if (!(dd == dropDupNaive(rs)) || targets.size() != dd.size())
            ++bad;
        for (unsigned mask = 0; mask < 16; ++mask) {
            Names a;
            for (size_t k = 0; k < 4; ++k)
                if (mask & (1u << k))
                    a.s.insert(u[k]);
            Seq naive;
            for (const auto& [s, t] : rs)
                if (a.contains(s))
                    naive.append(s, t);
            if (!(dresl(a, rs) == naive))
                ++bad;
        }
        ++checked;
        if (idx.size() == 3)
            return;
        for (size_t i = 0; i < pairs.size(); ++i) {
            if (std::find(idx.begin(), idx.end(), i) != idx.end())
                continue;
            idx.push_back(i);
            go();
            idx.pop_back();
        }
    };
    go();
    CHECK(bad == 0);
    CHECK(checked == 1 + 16 + 16 * 15 + 16 * 15 * 14);
}

TEST_CASE("small vectors spill to the heap and keep their contents")
{
    detail::SmallVec<std::string, 2> v;
    for (int i = 0; i < 20; ++i)
        v.emplace_back("item" + std::to_string(i));
    REQUIRE(v.size() == 20);
    CHECK(v[19] == "item19");
    detail::SmallVec<std::string, 2> copy = v;
    detail::SmallVec<std::string, 2> moved = std::move(copy);
    CHECK(moved == v);
    CHECK(copy.empty());
    detail::SmallVec<std::string, 2> small;
    small.emplace_back("a");
    detail::SmallVec<std::string, 2> inlineMoved = std::move(small);
    CHECK(inlineMoved.size() == 1);
    CHECK(inlineMoved[0] == "a");
    v = inlineMoved;
    CHECK(v.size() == 1);
    v = v;
    CHECK(v[0] == "a");
    // appending an element of the vector itself while it grows
    detail::SmallVec<std::string, 1> self;
    self.emplace_back("x");
    self.emplace_back(self[0]);
    CHECK(self[1] == "x");
}

TEST_CASE("long sequences agree with the quadratic oracles")
{
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        Seq rs;
        size_t n = 30 + rng() % 50;
        FinRel<std::string, std::string> r;
        for (size_t i = 0; i < n; ++i) {
            std::string s = "s" + std::to_string(rng() % 12), t = "t" + std::to_string(rng() % 12);
            rs.append(s, t);
            r.append(s, t);
        }
        CHECK(dropDup(rs) == dropDupNaive(rs));
        auto f = mkFunctional(r);
        FinRel<std::string, std::string> naive;
        for (const auto& [x, y] : r) {
            bool unique = true;
            for (const auto& [x2, y2] : r)
                unique = unique && (x2 != x || y2 == y);
            if (unique)
                naive.append(x, y);
        }
        REQUIRE(f.size() == naive.size());
        for (size_t i = 0; i < f.size(); ++i)
            CHECK(f[i] == naive[i]);
    }
}
