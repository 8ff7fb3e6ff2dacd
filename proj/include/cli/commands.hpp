#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "itree/itree.hpp"
#include "rc/model.hpp"

namespace cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    std::string model;
    rc::Model::Overrides overrides;
    size_t tauBudget = itree::kDefaultTauBudget;
    std::string scenario;
    std::optional<size_t> maxSteps;
    bool annotate = false;  // animate: append the chosen event to each echoed choice

    // laws
    uint64_t seed = 1;
    size_t cases = 1000;
    size_t depth = 5;
    size_t eqDepth = 10;
    bool brokenMerge = false;
    bool serial = false;

    // explore
    size_t walks = 32;
    size_t exploreDepth = 200;

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string modelsDir = "models";
    std::string staticDir;
    size_t idleMinutes = 30;
};

// Accepts "k=v" items, each possibly a comma-separated list.
rc::Model::Overrides parseOverrides(const std::vector<std::string>& items);

// Interactive animation; `echo` repeats each input line, for piped stdin.
int cmdAnimate(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err, bool echo);
// Replays a scenario printing each step, then the verdict.
int cmdReplay(const CliConfig& c, std::ostream& out, std::ostream& err);
// Verdict only: exit 0 iff the scenario is accepted for maxSteps.
int cmdCheck(const CliConfig& c, std::ostream& out, std::ostream& err);
int cmdLaws(const CliConfig& c, std::ostream& out, std::ostream& err);
int cmdExplore(const CliConfig& c, std::ostream& out, std::ostream& err);
// Blocks until SIGINT or SIGTERM.
int cmdServe(const CliConfig& c, std::ostream& out, std::ostream& err);

}  // namespace cli
