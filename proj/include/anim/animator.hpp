#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "itree/ops.hpp"

namespace anim {

using itree::Event;
using itree::ITree;

class AnimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// What the animator shows after compressing silent steps.
struct Menu {
    enum class Kind { Choices, Terminated, Stuck, TauBudget };
    Kind kind = Kind::Stuck;
    std::vector<Event> events;  // Choices, numbered from 1 in this order
    itree::Value value;         // Terminated
    size_t taus = 0;
};

const char* kindName(Menu::Kind k);

Menu observeMenu(const ITree& p, size_t tauBudget, ITree* stable = nullptr);

// Display text of an event, e.g. "Cal_PatrolMod (Din,-3)".
std::string eventText(const Event& e);
// Text with all whitespace removed, used for matching.
std::string normalize(const std::string& s);

// Single-threaded stepping state over a compiled tree.
class Session {
public:
    explicit Session(ITree initial, size_t tauBudget = itree::kDefaultTauBudget);

    const Menu& menu() const { return menu_; }
    const std::vector<Event>& history() const { return history_; }
    size_t tauBudget() const { return budget_; }

    // index is 1-based
    const Menu& choose(size_t index);
    const Menu& choose(const Event& e);
    // matches the menu entry whose text equals s modulo whitespace
    const Menu& chooseText(const std::string& s);
    const Menu& reset();

    // replays the history from the initial tree and compares the menus
    bool consistent() const;

private:
    ITree initial_;
    ITree current_;
    size_t budget_;
    Menu menu_;
    std::vector<Event> history_;
};

// A trace given as event texts; a cyclic scenario repeats from cycleStart.
struct Scenario {
    std::string name;
    std::vector<std::string> trace;
    bool cyclic = false;
    size_t cycleStart = 0;
};

// Lines hold one event each in menu text form. "@name <n>" names the
// scenario, "@cycle <i>" makes it cyclic from trace position i, and '#'
// starts a comment.
Scenario parseScenario(const std::string& text);
Scenario loadScenario(const std::string& path);
// throws AnimError naming the first event that is not in the alphabet
void checkScenario(const Scenario& sc, const itree::EventSet& alphabet);

struct Report {
    enum class Outcome { Accepted, Refused, Terminated, Stuck, Divergence };
    Outcome outcome = Outcome::Accepted;
    size_t accepted = 0;  // events replayed
    size_t cycles = 0;    // completed passes over the cyclic part
    std::string expected; // event text at the first refusal
    Menu menu;            // menu at the point replay stopped
    bool ok() const { return outcome == Outcome::Accepted; }
};

const char* kindName(Report::Outcome o);

// Replays up to maxSteps events; non-cyclic scenarios stop at their end.
Report replay(const ITree& p, const Scenario& sc, size_t maxSteps, size_t tauBudget = itree::kDefaultTauBudget);

bool traceMember(const ITree& p, const std::vector<std::string>& trace,
                 size_t tauBudget = itree::kDefaultTauBudget);

}  // namespace anim
