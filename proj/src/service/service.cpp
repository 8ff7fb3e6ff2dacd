#include "service/service.hpp"

#include <filesystem>
#include <random>

#include "httplib.h"

namespace svc {

namespace fs = std::filesystem;

Registry::Registry(const std::string& dir)
{
    if (dir.empty())
        return;
    if (!fs::is_directory(dir))
        throw ServiceError(500, "models directory not found: " + dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            paths_[e.path().stem().string()] = e.path().string();
}

void Registry::add(const std::string& id, const std::string& path)
{
    std::lock_guard lk(mu_);
    paths_[id] = path;
}

std::vector<std::string> Registry::ids() const
{
    std::lock_guard lk(mu_);
    std::vector<std::string> out;
    for (const auto& [id, p] : paths_)
        out.push_back(id);
    return out;
}

Json Registry::describe() const
{
    Json out = Json::array();
    for (const auto& id : ids())
        out.push_back({{"id", id}});
    return out;
}

std::shared_ptr<const Compiled> Registry::compile(const std::string& id, const rc::Model::Overrides& ov)
{
    std::string key = id;
    for (const auto& [k, v] : ov)
        key += "\n" + k + "=" + v;
    std::string path;
    {
        std::lock_guard lk(mu_);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
        auto p = paths_.find(id);
        if (p == paths_.end())
            throw ServiceError(404, "unknown model: " + id);
        path = p->second;
    }
    auto c = std::make_shared<Compiled>();
    try {
        c->model = rc::Model::load(path, ov);
        c->semantics = std::make_shared<rc::Semantics>(c->model);
    } catch (const rc::ModelError& e) {
        throw ServiceError(400, e.what());
    }
    c->tree = c->semantics->module();
    std::lock_guard lk(mu_);
    return cache_.emplace(key, c).first->second;
}

Json valueJson(const itree::Value& v)
{
    using K = itree::Value::Kind;
    switch (v.kind()) {
    case K::Unit:
        return nullptr;
    case K::Bool:
        return v.asBool();
    case K::Int:
        return v.asInt();
    case K::Enum:
    case K::Dir:
    case K::Id:
        return v.str();
    case K::Record: {
        Json fs = Json::array();
        for (const auto& x : v.items())
            fs.push_back(valueJson(x));
        return {{"record", v.typeName()}, {"fields", fs}};
    }
    case K::List:
    case K::Tuple: {
        Json xs = Json::array();
        for (const auto& x : v.items())
            xs.push_back(valueJson(x));
        return xs;
    }
    }
    return nullptr;
}

Json eventJson(const itree::Event& e, size_t index)
{
    Json j = {{"channel", e.channel().display()},
              {"payload_text", e.payload().str()},
              {"payload", valueJson(e.payload())},
              {"text", anim::eventText(e)}};
    if (index > 0)
        j["index"] = index;
    return j;
}

Json menuPayload(const anim::Menu& m, size_t historyLen)
{
    Json events = Json::array();
    for (size_t i = 0; i < m.events.size(); ++i)
        events.push_back(eventJson(m.events[i], i + 1));
    Json j = {{"kind", anim::kindName(m.kind)}, {"events", events}, {"history_len", historyLen}};
    if (m.kind == anim::Menu::Kind::Terminated)
        j["value"] = m.value.str();
    return j;
}

SessionManager::SessionManager(std::shared_ptr<Registry> reg, ServiceOptions o) : registry_(std::move(reg)), opts_(o) {}

std::string SessionManager::freshId()
{
    static thread_local std::random_device rd;
    static const char* hex = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 8; ++i) {
        uint32_t x = rd();
        for (int k = 0; k < 8; ++k, x >>= 4)
            id.push_back(hex[x & 15]);
    }
    return id;
}

Json SessionManager::create(const std::string& modelId, const rc::Model::Overrides& ov)
{
    expire(Clock::now());
    auto c = registry_->compile(modelId, ov);
    auto e = std::make_shared<Entry>();
    e->session = std::make_unique<anim::Session>(c->tree, opts_.tauBudget);
    e->lastUsed = Clock::now();
    Json menu = menuPayload(e->session->menu(), 0);
    std::string id;
    {
        std::lock_guard lk(mu_);
        do
            id = freshId();
        while (sessions_.count(id));
        sessions_[id] = e;
    }
    return {{"session", id}, {"model", modelId}, {"banner", c->model->module().banner}, {"menu", menu}};
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& sid)
{
    expire(Clock::now());
    std::lock_guard lk(mu_);
    auto it = sessions_.find(sid);
    if (it == sessions_.end())
        throw ServiceError(404, "unknown or expired session");
    return it->second;
}

Json SessionManager::choose(const std::string& sid, int64_t index)
{
    auto e = find(sid);
    std::lock_guard lk(e->mu);
    e->lastUsed = Clock::now();
    anim::Session& s = *e->session;
    if (s.menu().kind == anim::Menu::Kind::Terminated)
        throw ServiceError(409, "terminated");
    if (s.menu().kind != anim::Menu::Kind::Choices)
        throw ServiceError(409, std::string("no choices: ") + anim::kindName(s.menu().kind));
    if (index < 1 || static_cast<size_t>(index) > s.menu().events.size())
        throw ServiceError(400, "invalid index " + std::to_string(index) + ", expected 1-" +
                                    std::to_string(s.menu().events.size()));
    s.choose(static_cast<size_t>(index));
    Json j = menuPayload(s.menu(), s.history().size());
    j["event"] = eventJson(s.history().back(), 0);
    return j;
}

Json SessionManager::history(const std::string& sid)
{
    auto e = find(sid);
    std::lock_guard lk(e->mu);
    e->lastUsed = Clock::now();
    Json h = Json::array();
    for (const auto& ev : e->session->history())
        h.push_back(eventJson(ev, 0));
    return {{"history", h}};
}

Json SessionManager::reset(const std::string& sid)
{
    auto e = find(sid);
    std::lock_guard lk(e->mu);
    e->lastUsed = Clock::now();
    return menuPayload(e->session->reset(), 0);
}

size_t SessionManager::live() const
{
    std::lock_guard lk(mu_);
    return sessions_.size();
}

size_t SessionManager::expire(Clock::time_point now)
{
    std::lock_guard lk(mu_);
    size_t n = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        std::unique_lock el(it->second->mu, std::try_to_lock);
        // a session in use is not idle
        if (el.owns_lock() && now - it->second->lastUsed > opts_.idleTimeout) {
            el.unlock();
            it = sessions_.erase(it);
            ++n;
        } else {
            ++it;
        }
    }
    return n;
}

struct Server::Impl {
    std::shared_ptr<SessionManager> mgr;
    ServerOptions opts;
    httplib::Server http;
};

namespace {

void reply(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f)
{
    try {
        reply(res, 200, f());
    } catch (const ServiceError& e) {
        reply(res, e.status(), {{"error", e.what()}});
    } catch (const Json::exception& e) {
        reply(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
    } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
    }
}

Json body(const httplib::Request& req)
{
    if (req.body.empty())
        return Json::object();
    Json j = Json::parse(req.body);
    if (!j.is_object())
        throw ServiceError(400, "request body must be a JSON object");
    return j;
}

}  // namespace

Server::Server(std::shared_ptr<SessionManager> mgr, ServerOptions o) : impl_(std::make_unique<Impl>())
{
    impl_->mgr = std::move(mgr);
    impl_->opts = std::move(o);
    auto& http = impl_->http;
    auto m = impl_->mgr;

    http.Get("/models", [m](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { return Json{{"models", m->models()}}; });
    });
    http.Post("/sessions", [m](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Json b = body(req);
            if (!b.contains("model") || !b["model"].is_string())
                throw ServiceError(400, "missing model");
            Json cfg = b.value("config", Json::object());
            if (!cfg.is_object())
                throw ServiceError(400, "config must be an object");
            rc::Model::Overrides ov;
            for (const auto& [k, v] : cfg.items())
                ov[k] = v.is_string() ? v.get<std::string>() : v.dump();
            return m->create(b["model"].get<std::string>(), ov);
        });
    });
    http.Post(R"(/sessions/([0-9a-f]+)/choice)", [m](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Json b = body(req);
            if (!b.contains("index") || !b["index"].is_number_integer())
                throw ServiceError(400, "missing integer index");
            return m->choose(req.matches[1], b["index"].get<int64_t>());
        });
    });
    http.Get(R"(/sessions/([0-9a-f]+)/history)", [m](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return m->history(req.matches[1]); });
    });
    http.Post(R"(/sessions/([0-9a-f]+)/reset)", [m](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return m->reset(req.matches[1]); });
    });
    if (!impl_->opts.staticDir.empty() && !http.set_mount_point("/", impl_->opts.staticDir))
        throw ServiceError(500, "static directory not found: " + impl_->opts.staticDir);
}

Server::~Server() { stop(); }

int Server::bind()
{
    if (impl_->opts.port == 0)
        return impl_->http.bind_to_any_port(impl_->opts.host);
    return impl_->http.bind_to_port(impl_->opts.host, impl_->opts.port) ? impl_->opts.port : -1;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop()
{
    if (impl_)
        impl_->http.stop();
}

}  // namespace svc
