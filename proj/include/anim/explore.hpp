#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itree/ops.hpp"

namespace anim {

struct ExploreOptions {
    size_t walks = 32;
    size_t depth = 200;
    uint64_t seed = 1;
    size_t tauBudget = itree::kDefaultTauBudget;
    // observe every child of each visited menu, not only the chosen one
    bool expandChildren = false;
};

struct ExploreStats {
    size_t walks = 0;
    size_t steps = 0;             // events taken
    size_t menus = 0;             // stable menus inspected
    size_t duplicateMenus = 0;    // menus offering an event twice
    size_t tauOverruns = 0;       // observations exceeding the budget
    size_t outsideAlphabet = 0;   // offered events not in the module alphabet
    size_t terminated = 0;        // walks ending in Ret
    size_t stuck = 0;             // walks ending in a deadlock
    size_t maxTaus = 0;           // longest silent run seen
    std::string firstProblem;     // description of the first violation

    bool ok() const { return duplicateMenus == 0 && tauOverruns == 0 && outsideAlphabet == 0; }
    bool operator==(const ExploreStats& o) const;
};

// Seeded random walks; walk i depends only on (seed, i), so both runners
// agree exactly. An empty alphabet disables the alphabet check.
ExploreStats exploreSerial(const itree::ITree& root, const itree::EventSet& alphabet, const ExploreOptions& o);
ExploreStats exploreParallel(const itree::ITree& root, const itree::EventSet& alphabet, const ExploreOptions& o);

}  // namespace anim
