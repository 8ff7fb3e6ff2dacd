#include "doctest.h"
#include "printers.hpp"

#include <algorithm>

#include "rc/model.hpp"
#include "rc/semantics.hpp"

using namespace rc;
using itree::Value;

namespace {

std::shared_ptr<Model> patrol() { return Model::load(MODELS_DIR "/patrol.json"); }
std::shared_ptr<Model> chemical() { return Model::load(MODELS_DIR "/chemical.json"); }

// A minimal single-machine module; body is spliced into the machine object.
std::string tiny(const std::string& body, const std::string& extra = "")
{
    return R"({"config": {"min_int": -1, "max_int": 1}, "types": [], "functions": [)" + extra +
           R"(], "module": {"name": "M", "platform": {"events": [{"name": "e", "type": "int"}]},
        "controllers": [{"name": "C", "events": [{"name": "e", "type": "int"}],
          "machines": [{"name": "S", "events": [{"name": "e", "type": "int"}], )" +
           body + R"(}],
          "connections": [{"from": "C", "from_event": "e", "to": "S", "to_event": "e"}]}],
        "connections": [{"from": "RP", "from_event": "e", "to": "C", "to_event": "e"}]}})";
}

Value gs(std::initializer_list<std::pair<int, int>> xs)
{
    std::vector<Value> items;
    for (auto [c, i] : xs)
        items.push_back(Value::record("GasSensor", {Value::integer(c), Value::integer(i)}));
    return Value::list(items, 2);
}

Res evalIn(const Model& m, const std::string& src, Env env = {})
{
    Symbols sym;
    sym.types = const_cast<TypeTable*>(&m.types());
    sym.ctx = &m;
    return eval(*parseExpr(src, sym), env, m);
}

}  // namespace

TEST_CASE("patrol model structure")
{
    auto m = patrol();
    const ModuleDef& md = m->module();
    CHECK(md.name == "PatrolMod");
    CHECK(md.platform.variables.size() == 1);
    REQUIRE(md.controllers.size() == 1);
    CHECK(md.controllers[0].machines.size() == 2);
    CHECK(md.controllers[0].shared.size() == 1);
    CHECK(md.controllers[0].shared[0].name == "x");
}

TEST_CASE("chemical model structure")
{
    auto m = chemical();
    const ModuleDef& md = m->module();
    REQUIRE(md.controllers.size() == 2);
    CHECK(md.controllers[0].machines[0].name == "GasAnalysis");
    CHECK(md.controllers[1].machines[0].name == "Movement");
    CHECK(md.controllers[1].operations.size() == 1);
}

TEST_CASE("type enumeration")
{
    auto p = patrol();
    auto c = chemical();
    TypeTable& pt = p->typeTable();
    TypeTable& ct = c->typeTable();
    auto ints = pt.resolve("int")->values;
    REQUIRE(ints.size() == 7);
    CHECK(ints.front() == Value::integer(-3));
    CHECK(ints.back() == Value::integer(3));
    CHECK(ct.resolve("GasSensor")->values.size() == 4);
    auto seqs = ct.resolve("seq(GasSensor)")->values;
    CHECK(seqs.size() == 21);
    CHECK(seqs.back().str() == "[(1,1),(1,1)]");
    CHECK(ct.resolve("real")->values.size() == 2);
    CHECK(ct.resolve("Loc")->values.size() == 3);
    // stable across loads
    CHECK(chemical()->typeTable().resolve("seq(GasSensor)")->values == seqs);
    // enumeration is duplicate free
    auto sorted = seqs;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("default values")
{
    auto c = chemical();
    TypeTable& t = c->typeTable();
    CHECK(defaultValue(*t.resolve("int")) == Value::integer(0));
    CHECK(defaultValue(*t.resolve("Angle")).str() == "Chemical_Angle_Front");
    CHECK(defaultValue(*t.resolve("seq(GasSensor)")).size() == 0);
    CHECK(defaultValue(*t.resolve("GasSensor")).str() == "(0,0)");
}

TEST_CASE("expression evaluation")
{
    auto c = chemical();
    Env env;
    env.bind("d1", Value::integer(1));
    env.bind("d0", Value::integer(0));
    CHECK(*evalIn(*c, "d1 - d0", env) == Value::integer(1));
    CHECK(*evalIn(*c, "forall x : nat | x < 2 @ x < 3") == Value::boolean(true));
    Env g;
    g.bind("g", gs({{0, 1}}));
    CHECK(*evalIn(*c, "size(g)", g) == Value::integer(1));
    CHECK(*evalIn(*c, "g[0].i", g) == Value::integer(1));
    // out of range index and arithmetic leaving the core range block
    CHECK_FALSE(evalIn(*c, "g[1]", g).has_value());
    CHECK_FALSE(evalIn(*c, "2 + 1").has_value());
    // bounded append refuses to grow past the bound
    Env full;
    full.bind("g", gs({{0, 0}, {1, 1}}));
    CHECK_FALSE(evalIn(*c, "append(g, g[0])", full).has_value());
}

TEST_CASE("specification functions")
{
    auto c = chemical();
    CHECK(c->solve("intensity", {gs({{0, 0}, {1, 1}})}).value == Value::integer(1));
    CHECK(c->solve("intensity", {gs({})}).kind == Solution::Kind::PreconditionViolated);
    CHECK(c->solve("location", {gs({{0, 0}, {1, 1}})}).value == c->solve("angle", {Value::integer(1)}).value);
    CHECK(c->solve("angle", {Value::integer(0)}).value.str() == "Chemical_Angle_Front");
    CHECK(c->solve("analysis", {gs({})}).value.str() == "Chemical_Status_noGas");
    CHECK(c->solve("analysis", {gs({{0, 1}, {1, 0}})}).value.str() == "Chemical_Status_gasD");
    CHECK(c->solve("goreq", {Value::integer(1), Value::integer(1)}).value == Value::boolean(true));
}

TEST_CASE("specification functions match brute force on every gas sequence")
{
    auto c = chemical();
    for (const Value& s : c->typeTable().resolve("seq(GasSensor)")->values) {
        if (s.size() == 0) {
            CHECK(c->solve("intensity", {s}).kind == Solution::Kind::PreconditionViolated);
            CHECK(c->solve("location", {s}).kind == Solution::Kind::PreconditionViolated);
            continue;
        }
        int64_t best = -1;
        size_t arg = 0;
        for (size_t k = 0; k < s.size(); ++k)
            if (s[k][1].asInt() > best) {
                best = s[k][1].asInt();
                arg = k;
            }
        Solution in = c->solve("intensity", {s});
        REQUIRE(in.kind == Solution::Kind::Ok);
        CHECK(in.value == Value::integer(best));
        Solution loc = c->solve("location", {s});
        REQUIRE(loc.kind == Solution::Kind::Ok);
        CHECK(loc.value.label() == (arg == 0 ? "Front" : "Right"));
    }
}

TEST_CASE("non-unique specification is reported")
{
    auto m = Model::parse(tiny(R"("nodes": [{"name": "i0", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "A"}])",
                               R"({"name": "any", "params": [], "result": "int", "post": ["true"]},
                                  {"name": "none", "params": [], "result": "int", "post": ["false"]})"));
    CHECK(m->solve("any", {}).kind == Solution::Kind::NonUnique);
    CHECK(m->solve("none", {}).kind == Solution::Kind::NoSolution);
    CHECK_THROWS_AS(m->call("any", {}), ModelError);
}

TEST_CASE("config overrides")
{
    auto m = Model::load(MODELS_DIR "/patrol.json", {{"max_int", "2"}, {"min_int", "-2"}});
    CHECK(m->typeTable().resolve("int")->values.size() == 5);
    CHECK_THROWS_AS(Model::load(MODELS_DIR "/patrol.json", {{"MAX", "9"}}), ModelError);
}

TEST_CASE("validation errors")
{
    const std::string ok = R"("nodes": [{"name": "i0", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "A"}])";
    CHECK_NOTHROW(Model::parse(tiny(ok)));
    CHECK_THROWS_AS(Model::parse(tiny(R"("nodes": [{"name": "i0", "kind": "initial"},
        {"name": "i1", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "A"}, {"name": "t1", "from": "i1", "to": "A"}])")),
                    ModelError);
    CHECK_THROWS_AS(Model::parse(tiny(R"("nodes": [{"name": "i0", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "B"}])")),
                    ModelError);
    CHECK_THROWS_AS(Model::parse(tiny(R"("nodes": [{"name": "i0", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "A"},
                        {"name": "t1", "from": "A", "to": "A", "trigger": "e?y"}])")),
                    ModelError);
    CHECK_THROWS_AS(Model::parse(tiny(R"("nodes": [{"name": "i0", "kind": "initial"}, {"name": "A"}],
        "transitions": [{"name": "t0", "from": "i0", "to": "A", "action": "e!(1 +"}])")),
                    ModelError);
    CHECK_THROWS_AS(Model::parse(tiny(R"("variables": [{"name": "v", "type": "nosuch"}], )" + ok)), ModelError);
    CHECK_THROWS_AS(Model::parse("{not json"), ModelError);
    CHECK_THROWS_AS(Model::load("/nonexistent/model.json"), ModelError);
}

TEST_CASE("compiled machine offers its first triggers")
{
    auto m = patrol();
    Semantics s(m);
    auto o = itree::observe(s.machine("Ctrl", "MoveSTM"));
    REQUIRE(o.kind == itree::Observation::Kind::Choices);
    auto es = o.events();
    bool reset = false;
    for (const auto& e : es)
        reset = reset || e.str().find("reset") != std::string::npos;
    CHECK(reset);
}
