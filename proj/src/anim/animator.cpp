#include "anim/animator.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace anim {

const char* kindName(Menu::Kind k)
{
    switch (k) {
    case Menu::Kind::Choices:
        return "choices";
    case Menu::Kind::Terminated:
        return "terminated";
    case Menu::Kind::Stuck:
        return "stuck";
    case Menu::Kind::TauBudget:
        return "tau_budget";
    }
    return "?";
}

const char* kindName(Report::Outcome o)
{
    switch (o) {
    case Report::Outcome::Accepted:
        return "accepted";
    case Report::Outcome::Refused:
        return "refused";
    case Report::Outcome::Terminated:
        return "terminated";
    case Report::Outcome::Stuck:
        return "stuck";
    case Report::Outcome::Divergence:
        return "possible divergence";
    }
    return "?";
}

Menu observeMenu(const ITree& p, size_t tauBudget, ITree* stable)
{
    itree::Observation o = itree::observe(p, tauBudget);
    Menu m;
    m.taus = o.taus;
    switch (o.kind) {
    case itree::Observation::Kind::Choices:
        m.kind = Menu::Kind::Choices;
        m.events = o.events();
        break;
    case itree::Observation::Kind::Terminated:
        m.kind = Menu::Kind::Terminated;
        m.value = o.value;
        break;
    case itree::Observation::Kind::Stuck:
        m.kind = Menu::Kind::Stuck;
        break;
    case itree::Observation::Kind::TauBudgetExceeded:
        m.kind = Menu::Kind::TauBudget;
        break;
    }
    if (stable)
        *stable = o.node;
    return m;
}

std::string eventText(const Event& e) { return e.str(); }

std::string normalize(const std::string& s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(c);
    return out;
}

Session::Session(ITree initial, size_t tauBudget) : initial_(initial), current_(initial), budget_(tauBudget)
{
    menu_ = observeMenu(current_, budget_, &current_);
}

const Menu& Session::choose(size_t index)
{
    if (menu_.kind == Menu::Kind::Terminated)
        throw AnimError("terminated");
    if (menu_.kind != Menu::Kind::Choices)
        throw AnimError(std::string("no choices: ") + kindName(menu_.kind));
    if (index < 1 || index > menu_.events.size())
        throw AnimError("invalid index " + std::to_string(index) + ", expected 1-" +
                        std::to_string(menu_.events.size()));
    return choose(menu_.events[index - 1]);
}

const Menu& Session::choose(const Event& e)
{
    if (menu_.kind == Menu::Kind::Terminated)
        throw AnimError("terminated");
    const itree::Lazy* next = current_.isVis() ? current_.choices().find(e) : nullptr;
    if (!next)
        throw AnimError("event not enabled: " + eventText(e));
    ITree t = next->force();
    history_.push_back(e);
    menu_ = observeMenu(t, budget_, &current_);
    return menu_;
}

const Menu& Session::chooseText(const std::string& s)
{
    std::string want = normalize(s);
    if (menu_.kind == Menu::Kind::Choices)
        for (const Event& e : menu_.events)
            if (normalize(eventText(e)) == want)
                return choose(e);
    throw AnimError("event not enabled: " + s);
}

const Menu& Session::reset()
{
    history_.clear();
    current_ = initial_;
    menu_ = observeMenu(current_, budget_, &current_);
    return menu_;
}

bool Session::consistent() const
{
    ITree t = initial_;
    Menu m = observeMenu(t, budget_, &t);
    for (const Event& e : history_) {
        const itree::Lazy* next = t.isVis() ? t.choices().find(e) : nullptr;
        if (!next)
            return false;
        m = observeMenu(next->force(), budget_, &t);
    }
    return m.kind == menu_.kind && m.events == menu_.events;
}

Scenario parseScenario(const std::string& text)
{
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    size_t lineNo = 0;
    bool haveCycle = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (line[0] == '@') {
            std::istringstream ds(line.substr(1));
            std::string key, arg;
            ds >> key;
            std::getline(ds >> std::ws, arg);
            if (key == "name") {
                sc.name = arg;
            } else if (key == "cycle") {
                try {
                    size_t pos = 0;
                    long long v = std::stoll(arg, &pos);
                    if (pos != arg.size() || v < 0)
                        throw std::invalid_argument(arg);
                    sc.cycleStart = static_cast<size_t>(v);
                } catch (const std::exception&) {
                    throw AnimError("line " + std::to_string(lineNo) + ": @cycle expects a trace index");
                }
                sc.cyclic = true;
                haveCycle = true;
            } else {
                throw AnimError("line " + std::to_string(lineNo) + ": unknown directive @" + key);
            }
            continue;
        }
        sc.trace.push_back(line);
    }
    if (haveCycle && sc.cycleStart >= sc.trace.size())
        throw AnimError("@cycle index " + std::to_string(sc.cycleStart) + " is past the end of the trace");
    return sc;
}

Scenario loadScenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw AnimError("cannot open scenario " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    Scenario sc = parseScenario(ss.str());
    if (sc.name.empty()) {
        size_t s = path.find_last_of('/');
        sc.name = path.substr(s == std::string::npos ? 0 : s + 1);
    }
    return sc;
}

void checkScenario(const Scenario& sc, const itree::EventSet& alphabet)
{
    std::vector<std::string> known;
    for (const Event& e : alphabet.elements())
        known.push_back(normalize(eventText(e)));
    for (size_t i = 0; i < sc.trace.size(); ++i) {
        std::string n = normalize(sc.trace[i]);
        bool found = false;
        for (const auto& k : known)
            if (k == n) {
                found = true;
                break;
            }
        if (!found)
            throw AnimError("scenario event " + std::to_string(i + 1) + " is not in the module alphabet: " +
                            sc.trace[i]);
    }
}

Report replay(const ITree& p, const Scenario& sc, size_t maxSteps, size_t tauBudget)
{
    Session s(p, tauBudget);
    Report r;
    size_t pos = 0;
    while (r.accepted < maxSteps) {
        if (pos == sc.trace.size()) {
            if (!sc.cyclic || sc.trace.empty())
                break;
            pos = sc.cycleStart;
            ++r.cycles;
        }
        const Menu& m = s.menu();
        if (m.kind != Menu::Kind::Choices) {
            r.outcome = m.kind == Menu::Kind::Terminated ? Report::Outcome::Terminated
                        : m.kind == Menu::Kind::Stuck    ? Report::Outcome::Stuck
                                                         : Report::Outcome::Divergence;
            r.expected = sc.trace[pos];
            r.menu = m;
            return r;
        }
        try {
            s.chooseText(sc.trace[pos]);
        } catch (const AnimError&) {
            r.outcome = Report::Outcome::Refused;
            r.expected = sc.trace[pos];
            r.menu = m;
            return r;
        }
        ++pos;
        ++r.accepted;
    }
    if (sc.cyclic && pos == sc.trace.size())
        ++r.cycles;
    r.menu = s.menu();
    return r;
}

bool traceMember(const ITree& p, const std::vector<std::string>& trace, size_t tauBudget)
{
    Scenario sc;
    sc.trace = trace;
    return replay(p, sc, trace.size(), tauBudget).ok();
}

}  // namespace anim
