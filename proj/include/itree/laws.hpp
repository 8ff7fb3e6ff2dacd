#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "itree/ops.hpp"

namespace itree::laws {

// Small event/value universe for generated trees.
struct Universe {
    std::vector<Event> events;
    std::vector<Value> values;
};

const Universe& smallUniverse();

// Finite random tree of at most depth constructor layers.
ITree randomTree(std::mt19937_64& rng, const Universe& u, size_t depth);

// Deterministic continuation: the tree depends only on (seed, argument).
Kont randomKont(uint64_t seed, const Universe& u, size_t depth);

// No reachable Visible node within depth has a repeated event.
bool distinctKeys(const ITree& p, size_t depth);

struct Options {
    uint64_t seed = 1;
    size_t cases = 1000;
    size_t genDepth = 5;
    size_t eqDepth = 10;
    bool brokenMerge = false;  // replaces ⊙ by a merge violating the identity law
};

struct LawResult {
    std::string name;
    size_t cases = 0;
    size_t failures = 0;
    size_t firstFailure = 0;       // case index
    std::string counterexample;   // printed operands of the first failure
    bool ok() const { return failures == 0; }
};

std::vector<std::string> lawNames();

// Serial reference runner.
std::vector<LawResult> runSerial(const Options& o);
// OpenMP runner; agrees with runSerial on every field.
std::vector<LawResult> runParallel(const Options& o);

struct Example {
    std::string name;
    bool ok = false;
};

// The worked operator examples (renaming, prioritised hiding, interrupt,
// exception).
std::vector<Example> microExamples();

}  // namespace itree::laws
