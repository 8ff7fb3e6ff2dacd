#include "anim/explore.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "anim/animator.hpp"

namespace anim {

bool ExploreStats::operator==(const ExploreStats& o) const
{
    return walks == o.walks && steps == o.steps && menus == o.menus && duplicateMenus == o.duplicateMenus &&
           tauOverruns == o.tauOverruns && outsideAlphabet == o.outsideAlphabet && terminated == o.terminated &&
           stuck == o.stuck && maxTaus == o.maxTaus && firstProblem == o.firstProblem;
}

namespace {

struct WalkResult {
    ExploreStats s;
    size_t problemStep = SIZE_MAX;
};

void note(WalkResult& w, size_t step, const std::string& what)
{
    if (w.s.firstProblem.empty()) {
        w.s.firstProblem = what;
        w.problemStep = step;
    }
}

// Checks one stable observation; returns false when the walk cannot go on.
bool inspect(WalkResult& w, const Menu& m, const itree::EventSet& alphabet, size_t step, size_t walk)
{
    w.s.maxTaus = std::max(w.s.maxTaus, m.taus);
    std::string where = "walk " + std::to_string(walk) + " step " + std::to_string(step);
    switch (m.kind) {
    case Menu::Kind::TauBudget:
        ++w.s.tauOverruns;
        note(w, step, where + ": silent steps exceed the budget");
        return false;
    case Menu::Kind::Terminated:
    case Menu::Kind::Stuck:
        return false;
    case Menu::Kind::Choices:
        break;
    }
    ++w.s.menus;
    std::unordered_set<uint32_t> seen;
    for (const Event& e : m.events) {
        if (!seen.insert(e.id()).second) {
            ++w.s.duplicateMenus;
            note(w, step, where + ": duplicate event " + eventText(e));
            break;
        }
    }
    if (!alphabet.empty())
        for (const Event& e : m.events)
            if (!alphabet.contains(e)) {
                ++w.s.outsideAlphabet;
                note(w, step, where + ": event outside the alphabet " + eventText(e));
                break;
            }
    return !m.events.empty();
}

WalkResult walk(const itree::ITree& root, const itree::EventSet& alphabet, const ExploreOptions& o, size_t i)
{
    WalkResult w;
    w.s.walks = 1;
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + i);
    itree::ITree cur = root;
    Menu m = observeMenu(cur, o.tauBudget, &cur);
    for (size_t step = 0;; ++step) {
        if (!inspect(w, m, alphabet, step, i)) {
            if (m.kind == Menu::Kind::Terminated)
                ++w.s.terminated;
            else if (m.kind != Menu::Kind::TauBudget)
                ++w.s.stuck;
            break;
        }
        if (step == o.depth)
            break;
        if (o.expandChildren)
            for (const auto& [e, c] : cur.choices()) {
                (void)e;
                inspect(w, observeMenu(c.force(), o.tauBudget), alphabet, step + 1, i);
            }
        std::uniform_int_distribution<size_t> pick(0, m.events.size() - 1);
        const Event e = m.events[pick(rng)];
        m = observeMenu(cur.choices().find(e)->force(), o.tauBudget, &cur);
        ++w.s.steps;
    }
    return w;
}

void merge(ExploreStats& acc, const WalkResult& w)
{
    acc.walks += w.s.walks;
    acc.steps += w.s.steps;
    acc.menus += w.s.menus;
    acc.duplicateMenus += w.s.duplicateMenus;
    acc.tauOverruns += w.s.tauOverruns;
    acc.outsideAlphabet += w.s.outsideAlphabet;
    acc.terminated += w.s.terminated;
    acc.stuck += w.s.stuck;
    acc.maxTaus = std::max(acc.maxTaus, w.s.maxTaus);
    if (acc.firstProblem.empty())
        acc.firstProblem = w.s.firstProblem;
}

}  // namespace

ExploreStats exploreSerial(const itree::ITree& root, const itree::EventSet& alphabet, const ExploreOptions& o)
{
    ExploreStats acc;
    for (size_t i = 0; i < o.walks; ++i)
        merge(acc, walk(root, alphabet, o, i));
    return acc;
}

ExploreStats exploreParallel(const itree::ITree& root, const itree::EventSet& alphabet, const ExploreOptions& o)
{
    std::vector<WalkResult> rs(o.walks);
    const long n = static_cast<long>(o.walks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i)
        rs[static_cast<size_t>(i)] = walk(root, alphabet, o, static_cast<size_t>(i));
    ExploreStats acc;
    for (const auto& w : rs)
        merge(acc, w);
    return acc;
}

}  // namespace anim
