#include "cli/commands.hpp"

#include <csignal>
#include <iostream>
#include <sstream>
#include <thread>

#include "anim/animator.hpp"
#include "anim/explore.hpp"
#include "itree/laws.hpp"
#include "rc/semantics.hpp"
#include "service/service.hpp"

namespace cli {

namespace {

struct Loaded {
    std::shared_ptr<rc::Model> model;
    std::shared_ptr<rc::Semantics> sem;
    itree::ITree tree = itree::stop();
};

Loaded load(const CliConfig& c)
{
    if (c.model.empty())
        throw UsageError("--model is required");
    Loaded l;
    l.model = rc::Model::load(c.model, c.overrides);
    l.sem = std::make_shared<rc::Semantics>(l.model);
    l.tree = l.sem->module();
    return l;
}

std::string menuLine(const anim::Menu& m)
{
    std::string s = "Events:";
    for (size_t i = 0; i < m.events.size(); ++i)
        s += " (" + std::to_string(i + 1) + ") " + anim::eventText(m.events[i]) + ";";
    return s;
}

std::string trim(const std::string& s)
{
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// Prints a non-choice menu; returns the exit code it implies.
int finalMenu(const anim::Menu& m, std::ostream& out)
{
    switch (m.kind) {
    case anim::Menu::Kind::Terminated:
        out << "Terminated: " << m.value.str() << "\n";
        return kOk;
    case anim::Menu::Kind::Stuck:
        out << "Deadlock: no events enabled\n";
        return kCheckFailed;
    case anim::Menu::Kind::TauBudget:
        out << "Possible divergence: more than " << m.taus << " silent steps\n";
        return kCheckFailed;
    case anim::Menu::Kind::Choices:
        break;
    }
    return kOk;
}

template <typename F>
int guarded(std::ostream& err, F&& f)
{
    try {
        return f();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const rc::ModelError& e) {
        err << "model error: " << e.what() << "\n";
    } catch (const anim::AnimError& e) {
        err << "scenario error: " << e.what() << "\n";
    } catch (const svc::ServiceError& e) {
        err << "error: " << e.what() << "\n";
    }
    return kUsage;
}

struct Prepared {
    Loaded l;
    anim::Scenario sc;
    size_t maxSteps = 0;
};

Prepared prepare(const CliConfig& c)
{
    if (c.scenario.empty())
        throw UsageError("--scenario is required");
    Prepared p{load(c), anim::loadScenario(c.scenario), 0};
    anim::checkScenario(p.sc, p.l.sem->alphabet());
    size_t len = p.sc.trace.size();
    // cyclic scenarios default to three passes over the cycle
    p.maxSteps = c.maxSteps.value_or(p.sc.cyclic ? len + 2 * (len - p.sc.cycleStart) : len);
    return p;
}

int verdict(const anim::Report& r, const anim::Scenario& sc, std::ostream& out)
{
    if (r.ok()) {
        out << "Accepted: " << sc.name << ", " << r.accepted << " events";
        if (sc.cyclic)
            out << ", " << r.cycles << " cycles";
        out << "\n";
        return kOk;
    }
    out << "Refused: " << sc.name << " at event " << r.accepted + 1 << ": " << r.expected << " ("
        << anim::kindName(r.outcome) << ")\n";
    if (r.menu.kind == anim::Menu::Kind::Choices)
        out << menuLine(r.menu) << "\n";
    else
        finalMenu(r.menu, out);
    return kCheckFailed;
}

}  // namespace

rc::Model::Overrides parseOverrides(const std::vector<std::string>& items)
{
    rc::Model::Overrides ov;
    for (const auto& item : items) {
        std::istringstream ss(item);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            kv = trim(kv);
            size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size())
                throw UsageError("--config expects key=value, got '" + kv + "'");
            ov[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
        }
    }
    return ov;
}

int cmdAnimate(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err, bool echo)
{
    return guarded(err, [&] {
        Loaded l = load(c);
        anim::Session s(l.tree, c.tauBudget);
        out << l.model->module().banner << "\n";
        bool showMenu = true;
        while (s.menu().kind == anim::Menu::Kind::Choices) {
            const anim::Menu& m = s.menu();
            if (showMenu)
                out << menuLine(m) << "\n";
            showMenu = true;
            out << "[Choose: 1-" << m.events.size() << "]: " << std::flush;
            std::string line;
            if (!std::getline(in, line)) {
                out << "\n";
                return int(kOk);
            }
            line = trim(line);
            std::string error;
            bool chose = false;
            if (line == "quit" || line == "q") {
                if (echo)
                    out << line << "\n";
                return int(kOk);
            }
            if (line != "reset" && line != "history") {
                try {
                    size_t pos = 0;
                    long long k = std::stoll(line, &pos);
                    if (pos != line.size())
                        throw std::invalid_argument(line);
                    if (k < 1)
                        throw anim::AnimError("invalid index " + line + ", expected 1-" +
                                              std::to_string(m.events.size()));
                    s.choose(static_cast<size_t>(k));
                    chose = true;
                } catch (const anim::AnimError& e) {
                    error = e.what();
                } catch (const std::exception&) {
                    error = "expected a number, reset, history or quit";
                }
            }
            if (echo) {
                out << line;
                if (chose && c.annotate)
                    out << " " << anim::eventText(s.history().back());
                out << "\n";
            }
            if (line == "reset") {
                s.reset();
                out << l.model->module().banner << "\n";
            } else if (line == "history") {
                for (const auto& e : s.history())
                    out << "  " << anim::eventText(e) << "\n";
                showMenu = false;
            } else if (!chose) {
                out << "Invalid choice: " << error << "\n";
                showMenu = false;
            }
        }
        return finalMenu(s.menu(), out);
    });
}

int cmdReplay(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Prepared p = prepare(c);
        // step through a session so each choice index can be printed
        anim::Session s(p.l.tree, c.tauBudget);
        out << p.l.model->module().banner << "\n";
        size_t pos = 0;
        for (size_t step = 0; step < p.maxSteps && !p.sc.trace.empty(); ++step) {
            if (pos == p.sc.trace.size()) {
                if (!p.sc.cyclic)
                    break;
                pos = p.sc.cycleStart;
            }
            const anim::Menu& m = s.menu();
            if (m.kind != anim::Menu::Kind::Choices)
                break;
            std::string want = anim::normalize(p.sc.trace[pos]);
            for (size_t i = 0; i < m.events.size(); ++i)
                if (anim::normalize(anim::eventText(m.events[i])) == want) {
                    out << "[Choose: 1-" << m.events.size() << "]: " << i + 1 << "   "
                        << anim::eventText(m.events[i]) << "\n";
                    s.choose(i + 1);
                    ++pos;
                    break;
                }
            if (s.history().size() != step + 1)
                break;
        }
        anim::Report r = anim::replay(p.l.tree, p.sc, p.maxSteps, c.tauBudget);
        return verdict(r, p.sc, out);
    });
}

int cmdCheck(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Prepared p = prepare(c);
        anim::Report r = anim::replay(p.l.tree, p.sc, p.maxSteps, c.tauBudget);
        return verdict(r, p.sc, out);
    });
}

int cmdLaws(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (c.cases == 0)
            throw UsageError("--cases must be positive");
        if (c.depth == 0 || c.eqDepth == 0)
            throw UsageError("--depth and --eq-depth must be positive");
        itree::laws::Options o;
        o.seed = c.seed;
        o.cases = c.cases;
        o.genDepth = c.depth;
        o.eqDepth = c.eqDepth;
        o.brokenMerge = c.brokenMerge;
        auto results = c.serial ? itree::laws::runSerial(o) : itree::laws::runParallel(o);
        bool ok = true;
        for (const auto& r : results) {
            if (r.ok()) {
                out << "ok    " << r.name << " (" << r.cases << " cases)\n";
                continue;
            }
            ok = false;
            out << "FAIL  " << r.name << " (" << r.failures << "/" << r.cases << " cases, first at case "
                << r.firstFailure << ")\n      counterexample: " << r.counterexample << "\n";
        }
        for (const auto& e : itree::laws::microExamples()) {
            out << (e.ok ? "ok    " : "FAIL  ") << "example " << e.name << "\n";
            ok = ok && e.ok;
        }
        return int(ok ? kOk : kCheckFailed);
    });
}

int cmdExplore(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (c.walks == 0)
            throw UsageError("--walks must be positive");
        Loaded l = load(c);
        anim::ExploreOptions o;
        o.walks = c.walks;
        o.depth = c.exploreDepth;
        o.seed = c.seed;
        o.tauBudget = c.tauBudget;
        auto st = c.serial ? anim::exploreSerial(l.tree, l.sem->alphabet(), o)
                           : anim::exploreParallel(l.tree, l.sem->alphabet(), o);
        out << "walks " << st.walks << ", steps " << st.steps << ", menus " << st.menus << ", terminated "
            << st.terminated << ", stuck " << st.stuck << ", longest silent run " << st.maxTaus << "\n"
            << "duplicate menus " << st.duplicateMenus << ", budget overruns " << st.tauOverruns
            << ", events outside alphabet " << st.outsideAlphabet << "\n";
        if (!st.ok())
            out << "first problem: " << st.firstProblem << "\n";
        return int(st.ok() ? kOk : kCheckFailed);
    });
}

int cmdServe(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        svc::ServiceOptions so;
        so.idleTimeout = std::chrono::minutes(c.idleMinutes);
        so.tauBudget = c.tauBudget;
        auto mgr = std::make_shared<svc::SessionManager>(std::make_shared<svc::Registry>(c.modelsDir), so);
        svc::ServerOptions o;
        o.host = c.host;
        o.port = c.port;
        o.staticDir = c.staticDir;
        svc::Server server(mgr, o);

        // signals are taken by a waiting thread so stop() runs outside a handler
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);

        int port = server.bind();
        if (port < 0)
            throw UsageError("cannot bind " + c.host + ":" + std::to_string(c.port));
        out << "Serving " << mgr->models().size() << " models on http://" << c.host << ":" << port << "\n"
            << std::flush;
        std::thread waiter([&] {
            int sig = 0;
            sigwait(&set, &sig);
            server.stop();
        });
        server.listen();
        // listen can also end on its own; wake the waiter
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        return int(kOk);
    });
}

}  // namespace cli
