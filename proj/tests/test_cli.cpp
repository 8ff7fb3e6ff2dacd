#include "doctest.h"

#include <sstream>

#include "cli/commands.hpp"
#include "golden_match.hpp"

using namespace cli;

namespace {

CliConfig modelConfig(const std::string& name)
{
    CliConfig c;
    c.model = std::string(MODELS_DIR) + "/" + name + ".json";
    return c;
}

struct Run {
    int code;
    std::string out, err;
};

Run animate(const CliConfig& c, const std::string& input)
{
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cmdAnimate(c, in, out, err, true);
    return {code, out.str(), err.str()};
}

template <typename F>
Run run(F f)
{
    std::ostringstream out, err;
    int code = f(out, err);
    return {code, out.str(), err.str()};
}

Run check(const std::string& model, const std::string& scenario, std::optional<size_t> steps)
{
    CliConfig c = modelConfig(model);
    c.scenario = std::string(SCENARIOS_DIR) + "/" + scenario + ".scn";
    c.maxSteps = steps;
    return run([&](std::ostream& o, std::ostream& e) { return cmdCheck(c, o, e); });
}

}  // namespace

TEST_CASE("config overrides parse")
{
    auto ov = parseOverrides({"min_int=-2,max_int=2", "MAX = 1"});
    CHECK(ov.size() == 3);
    CHECK(ov["min_int"] == "-2");
    CHECK(ov["MAX"] == "1");
    CHECK_THROWS_AS(parseOverrides({"min_int"}), UsageError);
    CHECK_THROWS_AS(parseOverrides({"=3"}), UsageError);
    CHECK_THROWS_AS(parseOverrides({"a=1,,b=2"}), UsageError);
}

TEST_CASE("animate prints menus and prompts")
{
    Run r = animate(modelConfig("patrol"), "2\n");
    CHECK(r.code == kOk);
    CHECK(r.out.find("Starting ITree Simulation...\n") == 0);
    CHECK(r.out.find("[Choose: 1-8]: 2\nEvents: (1) Right_PatrolMod (Dout,-2);\n[Choose: 1-1]: ") !=
          std::string::npos);

    Run c = animate(modelConfig("chemical"), "1\n9\n1\n1\n");
    CHECK(c.code == kOk);
    CHECK(c.out.size() > 20);
    CHECK(c.out.substr(c.out.size() - 15) == "Terminated: ()\n");
}

TEST_CASE("animate recovers from bad input")
{
    CliConfig c = modelConfig("patrol");
    c.annotate = true;
    Run r = animate(c, "0\n9\nabc\n2\nhistory\nreset\nquit\n");
    CHECK(r.code == kOk);
    CHECK(r.out.find("Invalid choice: invalid index 0, expected 1-8") != std::string::npos);
    CHECK(r.out.find("Invalid choice: invalid index 9, expected 1-8") != std::string::npos);
    CHECK(r.out.find("Invalid choice: expected a number") != std::string::npos);
    CHECK(r.out.find("[Choose: 1-8]: 2 Cal_PatrolMod (Din,-3)\n") != std::string::npos);
    CHECK(r.out.find("history\n  Cal_PatrolMod (Din,-3)\n") != std::string::npos);
    // reset prints the banner and the initial menu again
    size_t at = r.out.find("reset\nStarting ITree Simulation...\nEvents: (1) Reset_PatrolMod Din;");
    CHECK(at != std::string::npos);
}

TEST_CASE("load errors exit with a usage code")
{
    CliConfig c;
    c.model = "/nonexistent/model.json";
    Run r = animate(c, "");
    CHECK(r.code == kUsage);
    CHECK(r.err.find("model error") == 0);

    CliConfig bad = modelConfig("patrol");
    bad.overrides = {{"max_int", "x"}};
    CHECK(animate(bad, "").code == kUsage);
    CHECK(animate(CliConfig{}, "").code == kUsage);
}

TEST_CASE("check reports acceptance and refusals")
{
    Run s1 = check("patrol", "scenario1", 42);
    CHECK(s1.code == kOk);
    CHECK(s1.out == "Accepted: Scenario1, 42 events, 6 cycles\n");

    Run reset = check("patrol", "reset", 6);
    CHECK(reset.code == kCheckFailed);
    CHECK(reset.out.find("Refused: Reset at event 2: Left_PatrolMod (Dout,-1)") == 0);

    Run late = check("patrol", "reset-after-right", std::nullopt);
    CHECK(late.code == kCheckFailed);
    CHECK(late.out.find("at event 3: Reset_PatrolMod Din") != std::string::npos);

    CHECK(check("patrol", "empty", 0).code == kOk);
    CHECK(check("chemical", "sce-acd-1", std::nullopt).code == kOk);
    CHECK(check("chemical", "sce-acd-2", std::nullopt).code == kOk);

    // a patrol scenario against the chemical alphabet is rejected up front
    Run wrong = check("chemical", "scenario1", std::nullopt);
    CHECK(wrong.code == kUsage);
    CHECK(wrong.err.find("not in the module alphabet") != std::string::npos);
}

TEST_CASE("replay prints each choice")
{
    CliConfig c = modelConfig("chemical");
    c.scenario = std::string(SCENARIOS_DIR) + "/sce-acd-1.scn";
    Run r = run([&](std::ostream& o, std::ostream& e) { return cmdReplay(c, o, e); });
    CHECK(r.code == kOk);
    CHECK(r.out.find("[Choose: 1-21]: 9   Gas (Din,[(0,0),(1,1)])\n") != std::string::npos);
    CHECK(r.out.find("Accepted: SCE-ACD-1, 4 events\n") != std::string::npos);
}

TEST_CASE("laws command")
{
    CliConfig c;
    c.cases = 100;
    Run ok = run([&](std::ostream& o, std::ostream& e) { return cmdLaws(c, o, e); });
    CHECK(ok.code == kOk);
    CHECK(ok.out.find("FAIL") == std::string::npos);

    c.brokenMerge = true;
    Run broken = run([&](std::ostream& o, std::ostream& e) { return cmdLaws(c, o, e); });
    CHECK(broken.code == kCheckFailed);
    CHECK(broken.out.find("counterexample:") != std::string::npos);

    c.cases = 0;
    CHECK(run([&](std::ostream& o, std::ostream& e) { return cmdLaws(c, o, e); }).code == kUsage);
}

TEST_CASE("explore command")
{
    CliConfig c = modelConfig("patrol");
    c.walks = 4;
    c.exploreDepth = 50;
    Run r = run([&](std::ostream& o, std::ostream& e) { return cmdExplore(c, o, e); });
    CHECK(r.code == kOk);
    CHECK(r.out.find("duplicate menus 0, budget overruns 0") != std::string::npos);
}

TEST_CASE("golden matcher")
{
    using golden::mismatch;
    const auto npos = std::string::npos;
    CHECK(mismatch("a b\n c", "ab c\n") == npos);
    CHECK(mismatch("# comment\nab", "ab") == npos);
    CHECK(mismatch("ab", "abc") == 2);
    CHECK(mismatch("abc", "ab") == 0);
    CHECK(mismatch("(1) x; ...; (9) y;", "(1)x;(2)z;(3)w;(9)y;") == npos);
    CHECK(mismatch("(1) x; ...; (9) y;", "(1)x;(2)z;(9)q;") != npos);
    // only a token-initial ellipsis is a wildcard
    CHECK(mismatch("Starting...", "Starting...") == npos);
    CHECK(mismatch("Starting...", "StartingXYZ") != npos);
    CHECK(mismatch("a ...", "abcdef") == npos);
}
