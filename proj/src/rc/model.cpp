#include "rc/model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace rc {

using json = nlohmann::ordered_json;

const char* kindName(Solution::Kind k)
{
    switch (k) {
    case Solution::Kind::Ok:
        return "ok";
    case Solution::Kind::PreconditionViolated:
        return "precondition violated";
    case Solution::Kind::NoSolution:
        return "no solution";
    case Solution::Kind::NonUnique:
        return "non-unique solution";
    }
    return "?";
}

const Node* Machine::node(const std::string& n) const
{
    for (const auto& x : nodes)
        if (x.name == n)
            return &x;
    return nullptr;
}

const EventDecl* Machine::event(const std::string& n) const
{
    for (const auto& x : events)
        if (x.name == n)
            return &x;
    return nullptr;
}

const VarDecl* Machine::variable(const std::string& n) const
{
    for (const auto* vs : {&params, &variables, &shared})
        for (const auto& x : *vs)
            if (x.name == n)
                return &x;
    return nullptr;
}

bool Machine::isShared(const std::string& n) const
{
    for (const auto& x : shared)
        if (x.name == n)
            return true;
    return false;
}

const Machine* Controller::machine(const std::string& n) const
{
    for (const auto& x : machines)
        if (x.name == n)
            return &x;
    return nullptr;
}

const Machine* Controller::operation(const std::string& n) const
{
    for (const auto& x : operations)
        if (x.name == n)
            return &x;
    return nullptr;
}

const EventDecl* Controller::event(const std::string& n) const
{
    for (const auto& x : events)
        if (x.name == n)
            return &x;
    return nullptr;
}

const EventDecl* Platform::event(const std::string& n) const
{
    for (const auto& x : events)
        if (x.name == n)
            return &x;
    return nullptr;
}

const OpDecl* Platform::operation(const std::string& n) const
{
    for (const auto& x : operations)
        if (x.name == n)
            return &x;
    return nullptr;
}

const Controller* ModuleDef::controller(const std::string& n) const
{
    for (const auto& x : controllers)
        if (x.name == n)
            return &x;
    return nullptr;
}

const SpecFunction* Model::function(const std::string& n) const
{
    auto it = functions_.find(n);
    return it == functions_.end() ? nullptr : &it->second;
}

Solution Model::solve(const std::string& fn, const std::vector<Value>& args) const
{
    const SpecFunction* f = function(fn);
    if (!f)
        throw ModelError("unknown function: " + fn);
    if (f->params.size() != args.size())
        throw ModelError("function " + fn + " expects " + std::to_string(f->params.size()) + " arguments");
    auto key = std::make_pair(fn, args);
    {
        std::lock_guard<std::mutex> lk(memoMu_);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
    }
    Env env;
    for (size_t i = 0; i < args.size(); ++i)
        env.bind(f->params[i].name, args[i]);
    Solution s;
    bool preOk = true;
    for (const auto& p : f->pre)
        preOk = preOk && holds(*p, env, *this);
    if (!preOk) {
        s.kind = Solution::Kind::PreconditionViolated;
    } else {
        size_t found = 0;
        for (const Value& r : f->result->values) {
            env.bind("result", r);
            bool ok = true;
            for (const auto& q : f->post)
                ok = ok && holds(*q, env, *this);
            env.pop();
            if (ok && found++ == 0)
                s.value = r;
        }
        s.kind = found == 0 ? Solution::Kind::NoSolution
                 : found > 1 ? Solution::Kind::NonUnique
                             : Solution::Kind::Ok;
    }
    std::lock_guard<std::mutex> lk(memoMu_);
    memo_.emplace(key, s);
    return s;
}

Res Model::call(const std::string& fn, const std::vector<Value>& args) const
{
    Solution s = solve(fn, args);
    switch (s.kind) {
    case Solution::Kind::Ok:
        return s.value;
    case Solution::Kind::PreconditionViolated:
        return std::nullopt;
    default: {
        std::string a;
        for (size_t i = 0; i < args.size(); ++i)
            a += (i ? "," : "") + args[i].str();
        throw ModelError("function " + fn + "(" + a + "): " + kindName(s.kind));
    }
    }
}

class ModelLoader {
public:
    explicit ModelLoader(Model& m) : m_(m) {}

    void load(const json& doc, const Model::Overrides& ov)
    {
        json cfg = doc.value("config", json::object());
        for (const auto& [k, v] : ov)
            cfg[k] = literalJson(v);
        CoreConfig c;
        auto num = [&](const char* k, int64_t& out) {
            if (!cfg.contains(k))
                return;
            if (!cfg.at(k).is_number_integer())
                throw ModelError(std::string("config ") + k + " must be an integer, got " + cfg.at(k).dump());
            out = cfg.at(k).get<int64_t>();
        };
        num("min_int", c.minInt);
        num("max_int", c.maxInt);
        num("max_nat", c.maxNat);
        num("min_real", c.minReal);
        num("max_real", c.maxReal);
        num("seq_bound", c.seqBound);
        config_ = cfg;
        m_.types_ = std::make_unique<TypeTable>(c);
        loadTypes(doc.value("types", json::array()));
        loadFunctions(doc.value("functions", json::array()));
        if (!doc.contains("module"))
            throw ModelError("model has no module");
        loadModule(doc.at("module"));
        validate();
    }

private:
    static json literalJson(const std::string& v)
    {
        if (v == "true" || v == "false")
            return v == "true";
        try {
            size_t n = 0;
            long long x = std::stoll(v, &n);
            if (n == v.size())
                return x;
        } catch (const std::exception&) {
        }
        return v;
    }

    static std::string str(const json& j, const char* k, const std::string& dflt = {})
    {
        if (!j.contains(k) || j.at(k).is_null())
            return dflt;
        return j.at(k).get<std::string>();
    }

    static std::string need(const json& j, const char* k, const std::string& where)
    {
        if (!j.contains(k))
            throw ModelError(where + ": missing '" + k + "'");
        return j.at(k).get<std::string>();
    }

    Value typedValue(const json& v, const TypeP& t, const std::string& where)
    {
        Value out;
        if (v.is_boolean())
            out = Value::boolean(v.get<bool>());
        else if (v.is_number_integer())
            out = Value::integer(v.get<int64_t>());
        else if (v.is_string()) {
            const Value* lit = m_.types_->literal(v.get<std::string>());
            if (!lit)
                throw ModelError(where + ": unknown literal " + v.get<std::string>());
            out = *lit;
        } else {
            throw ModelError(where + ": unsupported constant value");
        }
        if (!t->contains(out))
            throw ModelError(where + ": value " + out.str() + " outside type " + t->name);
        return out;
    }

    void loadTypes(const json& ts)
    {
        for (const auto& t : ts) {
            std::string name = need(t, "name", "type");
            std::string kind = need(t, "kind", "type " + name);
            if (kind == "primitive") {
                m_.types_->definePrimitive(name, t.at("card").get<int64_t>());
            } else if (kind == "enum") {
                m_.types_->defineEnum(name, t.at("literals").get<std::vector<std::string>>(), str(t, "package"));
            } else if (kind == "record") {
                std::vector<std::pair<std::string, std::string>> fs;
                for (const auto& f : t.at("fields"))
                    fs.emplace_back(need(f, "name", "field"), need(f, "type", "field"));
                m_.types_->defineRecord(name, fs);
            } else {
                throw ModelError("type " + name + ": unknown kind " + kind);
            }
        }
    }

    std::vector<VarDecl> vars(const json& j, const char* key)
    {
        std::vector<VarDecl> out;
        if (!j.contains(key))
            return out;
        for (const auto& v : j.at(key)) {
            VarDecl d{need(v, "name", key), m_.types_->resolve(need(v, "type", key))};
            for (const auto& o : out)
                if (o.name == d.name)
                    throw ModelError("duplicate declaration: " + d.name);
            out.push_back(d);
        }
        return out;
    }

    std::vector<EventDecl> events(const json& j)
    {
        std::vector<EventDecl> out;
        if (!j.contains("events"))
            return out;
        for (const auto& e : j.at("events")) {
            EventDecl d{need(e, "name", "event"), nullptr};
            if (e.contains("type") && !e.at("type").is_null())
                d.type = m_.types_->resolve(e.at("type").get<std::string>());
            out.push_back(d);
        }
        return out;
    }

    Symbols symbols(const std::map<std::string, Value>& constants)
    {
        Symbols s;
        s.types = m_.types_.get();
        s.ctx = &m_;
        s.constants = constants;
        return s;
    }

    void loadFunctions(const json& fs)
    {
        for (const auto& f : fs) {
            SpecFunction sf;
            sf.name = need(f, "name", "function");
            sf.params = vars(f, "params");
            sf.result = m_.types_->resolve(need(f, "result", "function " + sf.name));
            m_.functions_[sf.name] = sf;
        }
        Symbols sym = symbols({});
        for (const auto& f : fs) {
            SpecFunction& sf = m_.functions_.at(f.at("name").get<std::string>());
            for (const auto& p : f.value("pre", json::array()))
                sf.pre.push_back(parseExpr(p.get<std::string>(), sym));
            for (const auto& p : f.value("post", json::array()))
                sf.post.push_back(parseExpr(p.get<std::string>(), sym));
            if (sf.post.empty())
                throw ModelError("function " + sf.name + " has no postcondition");
        }
    }

    std::map<std::string, Value> constants(const json& j, const std::string& owner)
    {
        std::map<std::string, Value> out;
        if (!j.contains("constants"))
            return out;
        for (const auto& c : j.at("constants")) {
            std::string n = need(c, "name", owner);
            TypeP t = m_.types_->resolve(need(c, "type", owner + "." + n));
            json v;
            if (config_.contains(n))
                v = config_.at(n);
            else if (c.contains("value"))
                v = c.at("value");
            else
                throw ModelError(owner + ": constant " + n + " has no value in the configuration");
            out[n] = typedValue(v, t, owner + "." + n);
        }
        return out;
    }

    Machine machine(const json& j, bool operation)
    {
        Machine mc;
        mc.name = need(j, "name", operation ? "operation" : "machine");
        std::string where = mc.name;
        mc.params = vars(j, "params");
        mc.variables = vars(j, "variables");
        mc.shared = vars(j, "requires");
        mc.constants = constants(j, where);
        mc.events = events(j);
        if (j.contains("operations"))
            mc.operations = j.at("operations").get<std::vector<std::string>>();
        Symbols sym = symbols(mc.constants);
        auto act = [&](const json& n, const char* k) -> ActionP {
            std::string s = str(n, k);
            return s.empty() ? nullptr : parseAction(s, sym);
        };
        for (const auto& n : j.at("nodes")) {
            Node nd;
            nd.name = need(n, "name", where + " node");
            std::string kind = str(n, "kind", "state");
            nd.kind = kind == "initial" ? Node::Kind::Initial : kind == "final" ? Node::Kind::Final : Node::Kind::State;
            if (kind != "initial" && kind != "final" && kind != "state")
                throw ModelError(where + "." + nd.name + ": unknown node kind " + kind);
            nd.entry = act(n, "entry");
            nd.during = act(n, "during");
            nd.exit = act(n, "exit");
            if (mc.node(nd.name))
                throw ModelError(where + ": duplicate node " + nd.name);
            mc.nodes.push_back(nd);
        }
        for (const auto& t : j.value("transitions", json::array())) {
            Transition tr;
            tr.name = need(t, "name", where + " transition");
            tr.from = need(t, "from", where + "." + tr.name);
            tr.to = need(t, "to", where + "." + tr.name);
            tr.trigger = parseTrigger(str(t, "trigger"), sym);
            std::string g = str(t, "guard");
            if (!g.empty())
                tr.guard = parseExpr(g, sym);
            tr.action = act(t, "action");
            for (const auto& o : mc.transitions)
                if (o.name == tr.name)
                    throw ModelError(where + ": duplicate transition " + tr.name);
            mc.transitions.push_back(tr);
        }
        return mc;
    }

    std::vector<Connection> connections(const json& j)
    {
        std::vector<Connection> out;
        for (const auto& c : j.value("connections", json::array()))
            out.push_back(Connection{need(c, "from", "connection"), need(c, "from_event", "connection"),
                                     need(c, "to", "connection"), need(c, "to_event", "connection"),
                                     c.value("async", false)});
        return out;
    }

    void loadModule(const json& j)
    {
        ModuleDef& md = m_.module_;
        md.name = need(j, "name", "module");
        md.eventSuffix = str(j, "event_suffix");
        md.banner = str(j, "banner", md.banner);
        if (j.contains("platform")) {
            const json& p = j.at("platform");
            md.platform.name = str(p, "name", "RP");
            md.platform.events = events(p);
            md.platform.variables = vars(p, "variables");
            for (const auto& o : p.value("operations", json::array()))
                md.platform.operations.push_back(OpDecl{need(o, "name", "operation"), vars(o, "params")});
        }
        for (const auto& c : j.value("controllers", json::array())) {
            Controller ct;
            ct.name = need(c, "name", "controller");
            ct.events = events(c);
            ct.shared = vars(c, "requires");
            for (const auto& o : c.value("operations", json::array()))
                ct.operations.push_back(machine(o, true));
            for (const auto& s : c.value("machines", json::array()))
                ct.machines.push_back(machine(s, false));
            ct.connections = connections(c);
            md.controllers.push_back(std::move(ct));
        }
        md.connections = connections(j);
    }

    // Checks every reference of a machine body.
    void checkMachine(const Machine& mc, const Controller& ct, bool operation)
    {
        const std::string& w = mc.name;
        size_t initials = 0;
        for (const auto& n : mc.nodes)
            if (n.kind == Node::Kind::Initial)
                ++initials;
        if (initials != 1)
            throw ModelError(w + ": expected exactly one initial junction, found " + std::to_string(initials));
        auto needVar = [&](const std::string& v, const std::string& ctx) {
            if (!mc.variable(v))
                throw ModelError(w + ": " + ctx + " refers to undeclared variable " + v);
        };
        auto needEvent = [&](const std::string& e, const std::string& ctx) -> const EventDecl& {
            const EventDecl* d = mc.event(e);
            if (!d)
                throw ModelError(w + ": " + ctx + " refers to undeclared event " + e);
            return *d;
        };
        auto checkExpr = [&](const ExprP& e, const std::string& ctx, const std::string& extra) {
            if (!e)
                return;
            std::vector<std::string> fv;
            freeVars(*e, fv);
            for (const auto& v : fv)
                if (v != extra)
                    needVar(v, ctx);
        };
        std::function<void(const ActionP&, const std::string&)> checkAction = [&](const ActionP& a, const std::string& ctx) {
            if (!a)
                return;
            switch (a->kind) {
            case Action::Kind::Skip:
                break;
            case Action::Kind::Assign:
                needVar(a->name, ctx);
                checkExpr(a->expr, ctx, {});
                break;
            case Action::Kind::Output:
                if (!needEvent(a->name, ctx).type)
                    throw ModelError(w + ": " + ctx + " outputs a value on untyped event " + a->name);
                checkExpr(a->expr, ctx, {});
                break;
            case Action::Kind::Input:
                if (!needEvent(a->name, ctx).type)
                    throw ModelError(w + ": " + ctx + " inputs from untyped event " + a->name);
                needVar(a->target, ctx);
                break;
            case Action::Kind::Signal:
                if (needEvent(a->name, ctx).type)
                    throw ModelError(w + ": " + ctx + " signals typed event " + a->name + " without a value");
                break;
            case Action::Kind::Call: {
                if (std::find(mc.operations.begin(), mc.operations.end(), a->name) == mc.operations.end())
                    throw ModelError(w + ": " + ctx + " calls undeclared operation " + a->name);
                size_t arity = 0;
                if (const Machine* op = ct.operation(a->name))
                    arity = op->params.size();
                else if (const OpDecl* po = m_.module_.platform.operation(a->name))
                    arity = po->params.size();
                else
                    throw ModelError(w + ": operation " + a->name + " is neither defined nor provided by the platform");
                if (arity != a->args.size())
                    throw ModelError(w + ": " + ctx + " calls " + a->name + " with " + std::to_string(a->args.size()) +
                                     " arguments, expected " + std::to_string(arity));
                for (const auto& x : a->args)
                    checkExpr(x, ctx, {});
                break;
            }
            case Action::Kind::Seq:
                for (const auto& s : a->steps)
                    checkAction(s, ctx);
                break;
            }
        };
        for (const auto& n : mc.nodes) {
            checkAction(n.entry, n.name + " entry");
            checkAction(n.during, n.name + " during");
            checkAction(n.exit, n.name + " exit");
        }
        for (const auto& t : mc.transitions) {
            std::string ctx = "transition " + t.name;
            const Node* src = mc.node(t.from);
            const Node* dst = mc.node(t.to);
            if (!src || !dst)
                throw ModelError(w + ": " + ctx + " connects undeclared nodes");
            if (src->kind == Node::Kind::Final)
                throw ModelError(w + ": " + ctx + " leaves a final state");
            if (dst->kind == Node::Kind::Initial)
                throw ModelError(w + ": " + ctx + " enters the initial junction");
            if (src->kind == Node::Kind::Initial && (t.trigger.kind != Trigger::Kind::None || t.guard))
                throw ModelError(w + ": " + ctx + " from the initial junction has a trigger or guard");
            if (operation && t.trigger.kind != Trigger::Kind::None)
                throw ModelError(w + ": triggers inside operations are not supported (" + ctx + ")");
            std::string binder;
            if (t.trigger.kind != Trigger::Kind::None) {
                const EventDecl& ev = needEvent(t.trigger.event, ctx);
                bool typed = t.trigger.kind != Trigger::Kind::Simple;
                if (typed != static_cast<bool>(ev.type))
                    throw ModelError(w + ": " + ctx + " trigger does not match the type of event " + ev.name);
            }
            if (t.trigger.kind == Trigger::Kind::Input) {
                binder = t.trigger.binder;
                needVar(binder, ctx);
            }
            checkExpr(t.trigger.value, ctx, {});
            checkExpr(t.guard, ctx, binder);
            checkAction(t.action, ctx);
        }
        for (const auto& n : mc.nodes)
            if (n.kind == Node::Kind::Initial) {
                size_t out = 0;
                for (const auto& t : mc.transitions)
                    out += t.from == n.name;
                if (out != 1)
                    throw ModelError(w + ": the initial junction needs exactly one outgoing transition");
            }
        for (const auto& r : mc.shared) {
            bool found = false;
            for (const auto& v : ct.shared)
                found = found || (v.name == r.name && v.type == r.type);
            if (!found)
                throw ModelError(w + ": required variable " + r.name + " is not required by controller " + ct.name);
        }
    }

    void validate()
    {
        const ModuleDef& md = m_.module_;
        if (md.controllers.empty())
            throw ModelError("module " + md.name + " has no controllers");
        for (const auto& ct : md.controllers) {
            for (const auto& op : ct.operations)
                checkMachine(op, ct, true);
            for (const auto& mc : ct.machines) {
                checkMachine(mc, ct, false);
                for (const auto& o : mc.operations)
                    if (!ct.operation(o) && !md.platform.operation(o))
                        throw ModelError(mc.name + ": operation " + o + " is neither defined nor provided");
            }
            for (const auto& r : ct.shared) {
                bool found = false;
                for (const auto& v : md.platform.variables)
                    found = found || (v.name == r.name && v.type == r.type);
                if (!found)
                    throw ModelError(ct.name + ": required variable " + r.name + " is not provided by the platform");
            }
            for (const auto& c : ct.connections) {
                for (const auto& [comp, ev] : {std::pair{c.from, c.fromEvent}, std::pair{c.to, c.toEvent}}) {
                    if (comp == ct.name) {
                        if (!ct.event(ev))
                            throw ModelError(ct.name + ": connection uses undeclared event " + ev);
                    } else if (const Machine* mc = ct.machine(comp)) {
                        if (!mc->event(ev))
                            throw ModelError(ct.name + ": connection uses undeclared event " + comp + "." + ev);
                    } else {
                        throw ModelError(ct.name + ": connection names unknown component " + comp);
                    }
                }
                if (c.async)
                    throw ModelError(ct.name + ": asynchronous connections inside controllers are not supported");
            }
        }
        for (const auto& c : md.connections) {
            for (const auto& [comp, ev] : {std::pair{c.from, c.fromEvent}, std::pair{c.to, c.toEvent}}) {
                if (comp == md.platform.name) {
                    if (!md.platform.event(ev))
                        throw ModelError(md.name + ": connection uses undeclared platform event " + ev);
                } else if (const Controller* ct = md.controller(comp)) {
                    if (!ct->event(ev))
                        throw ModelError(md.name + ": connection uses undeclared event " + comp + "." + ev);
                } else {
                    throw ModelError(md.name + ": connection names unknown component " + comp);
                }
            }
            if (c.async && (c.from == md.platform.name || c.to == md.platform.name))
                throw ModelError(md.name + ": asynchronous platform connections are not supported");
        }
    }

    Model& m_;
    json config_;
};

std::shared_ptr<Model> Model::parse(const std::string& text, const Overrides& ov)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model syntax error: ") + e.what());
    }
    std::shared_ptr<Model> m(new Model());
    try {
        ModelLoader(*m).load(doc, ov);
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed model: ") + e.what());
    }
    return m;
}

std::shared_ptr<Model> Model::load(const std::string& path, const Overrides& ov)
{
    std::ifstream in(path);
    if (!in)
        throw ModelError("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), ov);
}

}  // namespace rc
