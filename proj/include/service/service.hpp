#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "anim/animator.hpp"
#include "json.hpp"
#include "rc/semantics.hpp"

namespace svc {

using Json = nlohmann::json;

// Error carrying the HTTP status it maps to.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

struct Compiled {
    std::shared_ptr<const rc::Model> model;
    std::shared_ptr<const rc::Semantics> semantics;
    itree::ITree tree = itree::stop();
};

// Model files found in a directory, compiled on demand and cached per
// configuration.
class Registry {
public:
    explicit Registry(const std::string& dir);
    void add(const std::string& id, const std::string& path);

    std::vector<std::string> ids() const;
    Json describe() const;
    std::shared_ptr<const Compiled> compile(const std::string& id, const rc::Model::Overrides& ov);

private:
    mutable std::mutex mu_;
    std::map<std::string, std::string> paths_;
    std::map<std::string, std::shared_ptr<const Compiled>> cache_;
};

Json valueJson(const itree::Value& v);
Json eventJson(const itree::Event& e, size_t index);
// MenuPayload: {kind, events: [{index, channel, payload_text, payload}], history_len}
Json menuPayload(const anim::Menu& m, size_t historyLen);

struct ServiceOptions {
    std::chrono::seconds idleTimeout{30 * 60};
    size_t tauBudget = itree::kDefaultTauBudget;
};

class SessionManager {
public:
    using Clock = std::chrono::steady_clock;

    SessionManager(std::shared_ptr<Registry> reg, ServiceOptions o = {});

    // {session, model, banner, menu}
    Json create(const std::string& modelId, const rc::Model::Overrides& ov);
    // menu payload plus the appended history entry under "event"
    Json choose(const std::string& sid, int64_t index);
    Json history(const std::string& sid);
    Json reset(const std::string& sid);
    Json models() const { return registry_->describe(); }

    size_t live() const;
    // drops sessions idle since before now - timeout; returns how many
    size_t expire(Clock::time_point now);

private:
    struct Entry {
        std::mutex mu;
        std::unique_ptr<anim::Session> session;
        Clock::time_point lastUsed;
    };
    std::shared_ptr<Entry> find(const std::string& sid);
    std::string freshId();

    std::shared_ptr<Registry> registry_;
    ServiceOptions opts_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string staticDir;  // served at / when set
};

class Server {
public:
    Server(std::shared_ptr<SessionManager> mgr, ServerOptions o);
    ~Server();
    // port 0 picks a free port; returns the bound port or -1
    int bind();
    // blocks until stop()
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace svc
