#include "rc/semantics.hpp"

#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace rc {

using itree::Channel;
using itree::Choices;
using itree::Dir;
using itree::Event;
using itree::EventSet;
using itree::HideList;
using itree::ITree;
using itree::Lazy;
using itree::RenamingSeq;
using itree::Value;
using itree::later;

Value defaultValue(const Type& t)
{
    switch (t.kind) {
    case Type::Kind::Int:
    case Type::Kind::Nat:
    case Type::Kind::Real:
    case Type::Kind::Prim:
        if (t.contains(Value::integer(0)))
            return Value::integer(0);
        break;
    case Type::Kind::Seq:
        return Value::list({}, t.bound);
    case Type::Kind::Record: {
        std::vector<Value> fs;
        for (const auto& f : t.fields)
            fs.push_back(defaultValue(*f.second));
        return Value::record(t.name, fs);
    }
    case Type::Kind::Tuple: {
        std::vector<Value> is;
        for (const auto& i : t.items)
            is.push_back(defaultValue(*i));
        return Value::tuple(is);
    }
    default:
        break;
    }
    if (t.values.empty())
        throw ModelError("type " + t.name + " is empty");
    return t.values.front();
}

namespace {

std::string cap(std::string s)
{
    if (!s.empty())
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

Value tidv(const std::string& t) { return Value::id("TID_" + t); }
Value sidv(const std::string& s) { return Value::id("SID_" + s); }
const Value& din()
{
    static const Value v = Value::dir(Dir::In);
    return v;
}
const Value& dout()
{
    static const Value v = Value::dir(Dir::Out);
    return v;
}

std::vector<Value> payloads(const Value& d, const TypeP& t)
{
    if (!t)
        return {d};
    std::vector<Value> out;
    for (const Value& v : t->values)
        out.push_back(itree::pair(d, v));
    return out;
}

// Connection payload: the carried value, or unit for untyped events.
std::vector<Value> connPayloads(const TypeP& t) { return t ? t->values : std::vector<Value>{Value::unit()}; }

Value argValue(const std::vector<Value>& args) { return args.empty() ? Value::unit() : Value::tuple(args); }

std::vector<Value> argTuples(const std::vector<VarDecl>& params)
{
    std::vector<std::vector<Value>> acc{{}};
    for (const auto& p : params) {
        std::vector<std::vector<Value>> next;
        for (const auto& pre : acc)
            for (const Value& v : p.type->values) {
                auto x = pre;
                x.push_back(v);
                next.push_back(std::move(x));
            }
        acc = std::move(next);
    }
    std::vector<Value> out;
    for (const auto& a : acc)
        out.push_back(argValue(a));
    return out;
}

std::shared_ptr<const EventSet> makeSet(const std::vector<Event>& es) { return std::make_shared<const EventSet>(es); }

struct VarSlot {
    std::string name;
    TypeP type;
    bool shared = false;
    Channel get, set, setExt;
};

struct EvChans {
    TypeP type;
    Channel e, e_;
};

// A machine or defined-operation scope: its channels and precomputed sets.
struct Scope {
    const Model* model = nullptr;
    const Controller* ct = nullptr;
    const Machine* m = nullptr;
    const Scope* caller = nullptr;  // set for defined operations
    std::string prefix;
    Value self;
    Channel internal, terminate, enter, entered, exit, exited;
    std::vector<VarSlot> vars;
    std::map<std::string, size_t> slot;
    std::map<std::string, EvChans> events;
    std::map<std::string, Channel> opCalls;
    std::map<std::string, const Scope*> defined;
    std::vector<Value> sids;
    std::vector<const Node*> states;
    const Transition* initial = nullptr;
    std::map<std::string, std::vector<const Transition*>> outgoing;
    std::vector<Value> store0;

    std::shared_ptr<const EventSet> memSync, initFlow, termSet;
    std::vector<std::shared_ptr<const EventSet>> flowSync;
    HideList flowList, localList, internalList, opHide;
    RenamingSeq triggerMap;

    Channel ch(const std::string& n) const { return Channel::intern(prefix + "." + n); }

    const VarSlot& var(const std::string& n) const
    {
        auto it = slot.find(n);
        if (it != slot.end())
            return vars[it->second];
        if (caller)
            return caller->var(n);
        throw ModelError(prefix + ": no variable " + n);
    }
    const EvChans& event(const std::string& n) const
    {
        auto it = events.find(n);
        if (it != events.end())
            return it->second;
        if (caller)
            return caller->event(n);
        throw ModelError(prefix + ": no event " + n);
    }
    const Channel* opCall(const std::string& n) const
    {
        auto it = opCalls.find(n);
        if (it != opCalls.end())
            return &it->second;
        return caller ? caller->opCall(n) : nullptr;
    }
};

struct CtrlScope {
    const Controller* ct = nullptr;
    std::string prefix;
    Channel terminate;
    std::vector<const Scope*> machines;
    std::vector<RenamingSeq> toCtrl;                          // per machine
    std::vector<std::shared_ptr<const EventSet>> composeSync;  // per nesting level
    HideList connList, memList;
    std::shared_ptr<const EventSet> memSync, termSet;
    struct Prop {
        TypeP type;
        Channel in;
        std::vector<Channel> out;
    };
    std::vector<Prop> props;  // set_EXT_x -> set_EXT_x_<stm>...
};

struct ModScope {
    std::string prefix;
    Channel terminate;
    std::vector<const CtrlScope*> ctrls;
    std::vector<RenamingSeq> toMod;
    std::vector<std::shared_ptr<const EventSet>> composeSync;
    struct Buffer {
        TypeP type;
        Channel in, out;
    };
    std::vector<Buffer> buffers;
    std::shared_ptr<const EventSet> bufSync, memSync, termSet;
    std::vector<CtrlScope::Prop> props;
    HideList hideList;
    EventSet alphabet;
};

using ScopeP = std::shared_ptr<const Scope>;
using Step = std::function<ITree()>;

ITree chain(const std::shared_ptr<const std::vector<Step>>& steps, size_t i)
{
    if (i == steps->size())
        return itree::skip();
    return itree::then((*steps)[i](), [steps, i] { return chain(steps, i + 1); });
}

ITree seq(std::vector<Step> steps) { return chain(std::make_shared<const std::vector<Step>>(std::move(steps)), 0); }

ITree action(const ScopeP& s, const ActionP& a);
ITree nodes(const ScopeP& s);
ITree memory(const ScopeP& s, const std::vector<Value>& store);

// Reads the named variables from memory, then continues with them bound.
ITree readThen(const ScopeP& s, const std::shared_ptr<const std::vector<std::string>>& names, size_t i, const Env& env,
               const std::function<ITree(Env&)>& k)
{
    if (i == names->size()) {
        Env e = env;
        return k(e);
    }
    const VarSlot& v = s->var((*names)[i]);
    return itree::bind(itree::inp(v.get, v.type->values), [s, names, i, env, k](const Value& x) {
        Env e = env;
        e.bind((*names)[i], x);
        return readThen(s, names, i + 1, e, k);
    });
}

ITree withVars(const ScopeP& s, const std::vector<ExprP>& es, const std::function<ITree(Env&)>& k)
{
    auto names = std::make_shared<std::vector<std::string>>();
    for (const auto& e : es)
        if (e)
            freeVars(*e, *names);
    return readThen(s, names, 0, Env(), k);
}

ITree callDefined(const ScopeP& s, const std::string& op, const std::vector<Value>& args)
{
    ScopeP o(s, s->defined.at(op));
    std::vector<Step> steps;
    for (size_t i = 0; i < args.size(); ++i) {
        const VarSlot& p = o->vars[i];
        if (!p.type->contains(args[i]))
            return itree::stop();
        Channel set = p.set;
        Value v = args[i];
        steps.push_back([set, v] { return itree::outp(set, v); });
    }
    steps.push_back([o] { return itree::hidep(nodes(o), o->flowList); });
    ITree par = itree::parallel(seq(std::move(steps)), memory(o, o->store0), o->memSync);
    return itree::hidep(itree::exception(par, o->termSet, itree::skip()), o->opHide);
}

ITree action(const ScopeP& s, const ActionP& a)
{
    if (!a)
        return itree::skip();
    const Model& model = *s->model;
    switch (a->kind) {
    case Action::Kind::Skip:
        return itree::skip();
    case Action::Kind::Assign:
        return withVars(s, {a->expr}, [s, a, &model](Env& env) {
            Res r = eval(*a->expr, env, model);
            const VarSlot& v = s->var(a->name);
            if (!r || !v.type->contains(*r))
                return itree::stop();
            return itree::outp(v.set, *r);
        });
    case Action::Kind::Output:
        return withVars(s, {a->expr}, [s, a, &model](Env& env) {
            Res r = eval(*a->expr, env, model);
            const EvChans& ev = s->event(a->name);
            if (!r || !ev.type->contains(*r))
                return itree::stop();
            return itree::outp(ev.e, itree::pair(dout(), *r));
        });
    case Action::Kind::Input: {
        const EvChans& ev = s->event(a->name);
        const VarSlot& v = s->var(a->target);
        Channel set = v.set;
        TypeP vt = v.type;
        return itree::bind(itree::inp(ev.e, payloads(din(), ev.type)), [set, vt](const Value& p) {
            if (!vt->contains(p[1]))
                return itree::stop();
            return itree::outp(set, p[1]);
        });
    }
    case Action::Kind::Signal:
        return itree::outp(s->event(a->name).e, dout());
    case Action::Kind::Call:
        return withVars(s, a->args, [s, a, &model](Env& env) {
            std::vector<Value> args;
            for (const auto& x : a->args) {
                Res r = eval(*x, env, model);
                if (!r)
                    return itree::stop();
                args.push_back(*r);
            }
            if (s->defined.count(a->name))
                return callDefined(s, a->name, args);
            const Channel* c = s->opCall(a->name);
            if (!c)
                throw ModelError(s->prefix + ": operation " + a->name + " has no call channel");
            return itree::outp(*c, argValue(args));
        });
    case Action::Kind::Seq: {
        std::vector<Step> steps;
        for (const auto& x : a->steps)
            steps.push_back([s, x] { return action(s, x); });
        return seq(std::move(steps));
    }
    }
    return itree::stop();
}

ITree trigger(const ScopeP& s, const Transition* t)
{
    Value tid = tidv(t->name);
    const Trigger& tr = t->trigger;
    if (tr.kind == Trigger::Kind::None)
        return itree::outp(s->internal, tid);
    const EvChans& ev = s->event(tr.event);
    if (tr.kind == Trigger::Kind::Simple)
        return itree::outp(ev.e_, Value::tuple({tid, din()}));
    const Value& d = tr.kind == Trigger::Kind::Output ? dout() : din();
    std::vector<Value> vs;
    for (const Value& w : ev.type->values)
        vs.push_back(Value::tuple({tid, d, w}));
    ITree in = itree::inp(ev.e_, vs);
    if (tr.kind != Trigger::Kind::Input)
        return in;
    const VarSlot& b = s->var(tr.binder);
    Channel set = b.set;
    TypeP bt = b.type;
    return itree::bind(in, [set, bt](const Value& p) {
        if (!bt->contains(p[2]))
            return itree::stop();
        return itree::outp(set, p[2]);
    });
}

ITree transition(const ScopeP& s, const Transition* t)
{
    const Node* src = s->m->node(t->from);
    Value tgt = sidv(t->to);
    if (src->kind == Node::Kind::Initial) {
        Value p = itree::pair(s->self, tgt);
        return seq({
            [s, t] { return itree::outp(s->internal, tidv(t->name)); },
            [s, t] { return action(s, t->action); },
            [s, p] { return itree::outp(s->enter, p); },
            [s, p] { return itree::outp(s->entered, p); },
        });
    }
    Value sv = sidv(t->from);
    Value self = itree::pair(sv, sv);
    Value move = itree::pair(sv, tgt);
    std::vector<Step> steps{
        [s, t] { return trigger(s, t); },
        [s, self] { return itree::outp(s->exit, self); },
        [s, src] { return action(s, src->exit); },
        [s, self] { return itree::outp(s->exited, self); },
        [s, t] { return action(s, t->action); },
        [s, move] { return itree::outp(s->enter, move); },
    };
    if (t->to != t->from)
        steps.push_back([s, move] { return itree::outp(s->entered, move); });
    return seq(std::move(steps));
}

ITree outgoing(const ScopeP& s, const Node* n, const Value& me)
{
    std::vector<ITree> selfs, others;
    auto it = s->outgoing.find(n->name);
    if (it != s->outgoing.end())
        for (const Transition* t : it->second) {
            bool self = t->to == n->name;
            Value r = Value::tuple({Value::boolean(self), me});
            (self ? selfs : others).push_back(itree::bind(transition(s, t), [r](const Value&) { return itree::ret(r); }));
        }
    return itree::extchoice(itree::extchoiceAll(selfs), itree::extchoiceAll(others));
}

ITree stateBody(const ScopeP& s, const Node* n, const Value& me, const Value& r)
{
    Value from = r[1];
    return itree::then(action(s, n->entry), [s, n, me, from] {
        return itree::then(itree::outp(s->entered, itree::pair(from, me)), [s, n, me] {
            ITree during = itree::then(action(s, n->during), [] { return itree::stop(); });
            return itree::interrupt(during, outgoing(s, n, me));
        });
    });
}

ITree state(const ScopeP& s, const Node* n)
{
    Value me = sidv(n->name);
    auto ins = std::make_shared<std::vector<Value>>();
    for (const Value& x : s->sids)
        if (x != me)
            ins->push_back(itree::pair(x, me));
    if (n->kind == Node::Kind::Final)
        return itree::loop([s, me, ins](const Value&) {
            return itree::bind(itree::inp(s->enter, *ins), [s, me](const Value& sd) {
                return itree::then(itree::outp(s->entered, itree::pair(sd[0], me)), [s] {
                    return itree::then(itree::outp(s->terminate), [] { return itree::stop(); });
                });
            });
        });
    return itree::loop([s, n, me, ins](const Value&) {
        return itree::bind(itree::inp(s->enter, *ins), [s, n, me](const Value& sd) {
            ITree it = itree::iterate([](const Value& r) { return r[0].asBool(); },
                                      [s, n, me](const Value& r) { return stateBody(s, n, me, r); },
                                      Value::tuple({Value::boolean(true), sd[0]}));
            return itree::then(it, [] { return itree::skip(); });
        });
    });
}

ITree composeStates(const ScopeP& s, size_t i)
{
    if (i + 1 == s->states.size())
        return state(s, s->states[i]);
    return itree::parallel(state(s, s->states[i]), composeStates(s, i + 1), s->flowSync[i]);
}

ITree nodes(const ScopeP& s)
{
    return itree::parallel(transition(s, s->initial), composeStates(s, 0), s->initFlow);
}

// Variable store plus trigger availability, as a single looping choice.
ITree memory(const ScopeP& s, const std::vector<Value>& store)
{
    Choices cs;
    auto offer = [&](const Event& e, const std::vector<Value>& st) {
        cs.append(e, later([s, st] { return memory(s, st); }));
    };
    for (size_t i = 0; i < s->vars.size(); ++i) {
        const VarSlot& v = s->vars[i];
        offer(Event(v.get, store[i]), store);
        for (const Value& w : v.type->values) {
            auto st = store;
            st[i] = w;
            offer(Event(v.set, w), st);
        }
        if (v.shared)
            for (const Value& w : v.type->values) {
                auto st = store;
                st[i] = w;
                offer(Event(v.setExt, w), st);
            }
    }
    Env env;
    for (size_t i = 0; i < s->vars.size(); ++i)
        env.bind(s->vars[i].name, store[i]);
    const Model& model = *s->model;
    for (const Transition& t : s->m->transitions) {
        Value tid = tidv(t.name);
        const Trigger& tr = t.trigger;
        auto ok = [&] { return !t.guard || holds(*t.guard, env, model); };
        switch (tr.kind) {
        case Trigger::Kind::None:
            if (ok())
                offer(Event(s->internal, tid), store);
            break;
        case Trigger::Kind::Simple:
            if (ok())
                offer(Event(s->event(tr.event).e_, Value::tuple({tid, din()})), store);
            break;
        case Trigger::Kind::Input: {
            const EvChans& ev = s->event(tr.event);
            const VarSlot& b = s->var(tr.binder);
            for (const Value& w : ev.type->values) {
                if (!b.type->contains(w))
                    continue;
                env.bind(tr.binder, w);
                if (ok())
                    offer(Event(ev.e_, Value::tuple({tid, din(), w})), store);
                env.pop();
            }
            break;
        }
        case Trigger::Kind::Output:
        case Trigger::Kind::Sync: {
            if (!ok())
                break;
            const EvChans& ev = s->event(tr.event);
            Res r = eval(*tr.value, env, model);
            if (r && ev.type->contains(*r))
                offer(Event(ev.e_, Value::tuple({tid, tr.kind == Trigger::Kind::Output ? dout() : din(), *r})), store);
            break;
        }
        }
    }
    return ITree::vis(std::move(cs));
}

ITree stm(const ScopeP& s)
{
    ITree n = itree::hidep(nodes(s), s->flowList);
    ITree p = itree::parallel(n, memory(s, s->store0), s->memSync);
    ITree r = itree::renamep(itree::hidep(p, s->localList), s->triggerMap);
    return itree::hidep(itree::exception(r, s->termSet, itree::skip()), s->internalList);
}

// Controller memory: forwards external updates to every requiring machine.
ITree propagate(const std::shared_ptr<const std::vector<CtrlScope::Prop>>& props)
{
    Choices cs;
    for (const auto& p : *props)
        for (const Value& w : p.type->values)
            cs.append(Event(p.in, w), later([props, &p, w] {
                std::vector<Step> steps;
                for (Channel c : p.out)
                    steps.push_back([c, w] { return itree::outp(c, w); });
                return itree::then(seq(std::move(steps)), [props] { return propagate(props); });
            }));
    return ITree::vis(std::move(cs));
}

ITree buffer(const std::shared_ptr<const ModScope>& ms, size_t b, const std::optional<Value>& held)
{
    const auto& buf = ms->buffers[b];
    Choices cs;
    for (const Value& w : buf.type ? buf.type->values : std::vector<Value>{Value::unit()})
        cs.append(Event(buf.in, w), later([ms, b, w] { return buffer(ms, b, w); }));
    if (held)
        cs.append(Event(buf.out, *held), later([ms, b] { return buffer(ms, b, std::nullopt); }));
    return ITree::vis(std::move(cs));
}

}  // namespace

struct Semantics::Impl {
    std::shared_ptr<const Model> model;
    std::deque<Scope> scopes;
    std::deque<CtrlScope> ctrls;
    std::shared_ptr<ModScope> mod;
    std::shared_ptr<const std::vector<CtrlScope::Prop>> modProps;
    std::vector<std::shared_ptr<const std::vector<CtrlScope::Prop>>> ctrlProps;

    // platform operations reachable from a machine, through defined operations
    void reachableOps(const Controller& ct, const Machine& m, std::set<std::string>& out, std::set<std::string>& seen) const
    {
        for (const auto& o : m.operations) {
            if (const Machine* d = ct.operation(o)) {
                if (seen.insert(o).second)
                    reachableOps(ct, *d, out, seen);
            } else {
                out.insert(o);
            }
        }
    }

    Scope& buildScope(const Controller& ct, const Machine& m, const std::string& prefix, const Scope* caller,
                      std::vector<std::string>& active)
    {
        scopes.emplace_back();
        Scope& sc = scopes.back();
        sc.model = model.get();
        sc.ct = &ct;
        sc.m = &m;
        sc.caller = caller;
        sc.prefix = prefix;
        sc.self = sidv(m.name);
        sc.internal = sc.ch("internal");
        sc.terminate = sc.ch("terminate");
        sc.enter = sc.ch("enter");
        sc.entered = sc.ch("entered");
        sc.exit = sc.ch("exit");
        sc.exited = sc.ch("exited");

        auto addVar = [&](const VarDecl& d, bool shared) {
            VarSlot v{d.name, d.type, shared, sc.ch("get_" + d.name), sc.ch("set_" + d.name), {}};
            if (shared)
                v.setExt = sc.ch("set_EXT_" + d.name);
            sc.slot[d.name] = sc.vars.size();
            sc.vars.push_back(v);
        };
        for (const auto& d : m.params)
            addVar(d, false);
        for (const auto& d : m.variables)
            addVar(d, false);
        if (!caller)
            for (const auto& d : m.shared)
                addVar(d, true);
        for (const auto& v : sc.vars)
            sc.store0.push_back(defaultValue(*v.type));

        if (!caller) {
            for (const auto& e : m.events)
                sc.events[e.name] = EvChans{e.type, sc.ch(e.name), sc.ch(e.name + "_")};
            std::set<std::string> ops, seen;
            reachableOps(ct, m, ops, seen);
            for (const auto& o : ops)
                sc.opCalls[o] = sc.ch(o + "Call");
        }

        sc.sids.push_back(sc.self);
        for (const auto& n : m.nodes) {
            if (n.kind == Node::Kind::Initial) {
                for (const auto& t : m.transitions)
                    if (t.from == n.name)
                        sc.initial = &t;
                continue;
            }
            sc.states.push_back(&n);
            sc.sids.push_back(sidv(n.name));
        }
        if (sc.states.empty())
            throw ModelError(m.name + ": no states");
        for (const auto& t : m.transitions)
            if (m.node(t.from)->kind != Node::Kind::Initial)
                sc.outgoing[t.from].push_back(&t);

        // flow events
        std::vector<Event> initFlow;
        for (const Node* n : sc.states) {
            Value p = itree::pair(sc.self, sidv(n->name));
            initFlow.push_back(Event(sc.enter, p));
            initFlow.push_back(Event(sc.entered, p));
        }
        sc.initFlow = makeSet(initFlow);
        const Channel flowCh[] = {sc.enter, sc.entered, sc.exit, sc.exited};
        for (size_t i = 0; i + 1 < sc.states.size(); ++i) {
            Value h = sidv(sc.states[i]->name);
            std::vector<Event> es;
            for (size_t j = i + 1; j < sc.states.size(); ++j) {
                Value t = sidv(sc.states[j]->name);
                for (Channel c : flowCh) {
                    es.push_back(Event(c, itree::pair(h, t)));
                    es.push_back(Event(c, itree::pair(t, h)));
                }
            }
            sc.flowSync.push_back(makeSet(es));
        }
        for (Channel c : flowCh)
            for (const Value& a : sc.sids)
                for (const Value& b : sc.sids)
                    sc.flowList.push_back(Event(c, itree::pair(a, b)));

        // memory synchronisation and hiding lists
        std::vector<Event> sync;
        for (const auto& v : sc.vars)
            for (const Value& w : v.type->values) {
                sync.push_back(Event(v.get, w));
                sync.push_back(Event(v.set, w));
            }
        for (const auto& v : sc.vars) {
            for (const Value& w : v.type->values)
                sc.localList.push_back(Event(v.get, w));
            if (!v.shared)
                for (const Value& w : v.type->values)
                    sc.localList.push_back(Event(v.set, w));
        }
        for (const auto& t : m.transitions) {
            Event in(sc.internal, tidv(t.name));
            sync.push_back(in);
            sc.internalList.push_back(in);
        }
        if (caller) {
            for (const auto& t : m.transitions)
                if (t.trigger.kind != Trigger::Kind::None)
                    throw ModelError(m.name + ": triggers inside operations are not supported");
        } else {
            for (const auto& t : m.transitions) {
                const Trigger& tr = t.trigger;
                if (tr.kind == Trigger::Kind::None)
                    continue;
                const EvChans& ev = sc.event(tr.event);
                Value tid = tidv(t.name);
                if (tr.kind == Trigger::Kind::Simple) {
                    Event src(ev.e_, Value::tuple({tid, din()}));
                    sync.push_back(src);
                    sc.triggerMap.append(src, Event(ev.e, din()));
                    continue;
                }
                const Value& d = tr.kind == Trigger::Kind::Output ? dout() : din();
                for (const Value& w : ev.type->values) {
                    Event src(ev.e_, Value::tuple({tid, d, w}));
                    sync.push_back(src);
                    sc.triggerMap.append(src, Event(ev.e, itree::pair(d, w)));
                }
            }
            auto id = [&](const Event& e) { sc.triggerMap.append(e, e); };
            id(Event(sc.terminate, Value::unit()));
            for (const auto& t : m.transitions)
                id(Event(sc.internal, tidv(t.name)));
            for (const auto& v : sc.vars)
                if (v.shared)
                    for (const Value& w : v.type->values) {
                        id(Event(v.set, w));
                        id(Event(v.setExt, w));
                    }
            for (const auto& [name, ev] : sc.events) {
                (void)name;
                for (const Value& d : {din(), dout()})
                    for (const Value& p : payloads(d, ev.type))
                        id(Event(ev.e, p));
            }
            for (const auto& [op, c] : sc.opCalls) {
                const OpDecl* decl = model->module().platform.operation(op);
                if (!decl)
                    throw ModelError(m.name + ": operation " + op + " is not provided by the platform");
                for (const Value& a : argTuples(decl->params))
                    id(Event(c, a));
            }
        }
        sc.memSync = makeSet(sync);
        sc.termSet = makeSet({Event(sc.terminate, Value::unit())});
        if (caller) {
            sc.opHide = sc.localList;
            for (const auto& v : sc.vars)
                if (v.shared)
                    for (const Value& w : v.type->values)
                        sc.opHide.push_back(Event(v.set, w));
            for (const Event& e : sc.internalList)
                sc.opHide.push_back(e);
            sc.opHide.push_back(Event(sc.terminate, Value::unit()));
        }

        // defined operations called from this scope
        for (const auto& o : m.operations) {
            const Machine* d = ct.operation(o);
            if (!d)
                continue;
            if (std::find(active.begin(), active.end(), o) != active.end())
                throw ModelError(m.name + ": recursive operation " + o);
            active.push_back(o);
            Scope& os = buildScope(ct, *d, prefix + ".op." + o, &sc, active);
            active.pop_back();
            sc.defined[o] = &os;
        }
        return sc;
    }

    void build()
    {
        const ModuleDef& md = model->module();
        mod = std::make_shared<ModScope>();
        ModScope& ms = *mod;
        ms.prefix = md.name;
        auto mch = [&](const std::string& n, const std::string& display = {}) {
            return display.empty() ? Channel::intern(ms.prefix + "." + n)
                                   : Channel::intern(ms.prefix + "." + n, display);
        };
        ms.terminate = mch("terminate");
        ms.termSet = makeSet({Event(ms.terminate, Value::unit())});
        std::vector<Event> modConn, bufEvents, memEvents;

        for (const auto& ct : md.controllers) {
            ctrls.emplace_back();
            CtrlScope& cs = ctrls.back();
            cs.ct = &ct;
            cs.prefix = md.name + "." + ct.name;
            auto cch = [&](const std::string& n) { return Channel::intern(cs.prefix + "." + n); };
            cs.terminate = cch("terminate");
            cs.termSet = makeSet({Event(cs.terminate, Value::unit())});
            for (const auto& m : ct.machines) {
                std::vector<std::string> active;
                cs.machines.push_back(&buildScope(ct, m, cs.prefix + "." + m.name, nullptr, active));
            }

            // connection channels inside the controller
            struct Conn {
                const Connection* c;
                Channel ch;
                TypeP type;
            };
            std::vector<Conn> conns;
            for (const auto& c : ct.connections) {
                if (c.from == ct.name || c.to == ct.name)
                    continue;
                const EventDecl* e = ct.machine(c.from)->event(c.fromEvent);
                conns.push_back(Conn{&c, cch("conn." + c.from + "." + c.fromEvent), e->type});
                for (const Value& v : connPayloads(e->type))
                    cs.connList.push_back(Event(conns.back().ch, v));
            }

            std::vector<Event> memSync;
            for (const auto& v : ct.shared) {
                CtrlScope::Prop p{v.type, cch("set_EXT_" + v.name), {}};
                for (const auto& m : ct.machines)
                    if (m.isShared(v.name))
                        p.out.push_back(cch("set_EXT_" + v.name + "_" + m.name));
                for (Channel c : p.out)
                    for (const Value& w : v.type->values) {
                        memSync.push_back(Event(c, w));
                        cs.memList.push_back(Event(c, w));
                    }
                cs.props.push_back(p);
            }
            cs.memSync = makeSet(memSync);

            for (const Scope* sc : cs.machines) {
                const Machine& m = *sc->m;
                RenamingSeq rs;
                rs.append(Event(sc->terminate, Value::unit()), Event(cs.terminate, Value::unit()));
                for (const auto& v : sc->vars)
                    if (v.shared) {
                        Channel set = cch("set_" + v.name), ext = cch("set_EXT_" + v.name + "_" + m.name);
                        for (const Value& w : v.type->values) {
                            rs.append(Event(v.set, w), Event(set, w));
                            rs.append(Event(v.setExt, w), Event(ext, w));
                        }
                    }
                for (const auto& c : ct.connections) {
                    if (c.from == m.name || c.to == m.name) {
                        bool boundary = c.from == ct.name || c.to == ct.name;
                        const std::string& mine = c.from == m.name ? c.fromEvent : c.toEvent;
                        const EvChans& ev = sc->event(mine);
                        if (boundary) {
                            const std::string& theirs = c.from == ct.name ? c.fromEvent : c.toEvent;
                            Channel target = cch(theirs);
                            for (const Value& d : {din(), dout()})
                                for (const Value& p : payloads(d, ev.type))
                                    rs.append(Event(ev.e, p), Event(target, p));
                        } else {
                            Channel target;
                            for (const auto& k : conns)
                                if (k.c == &c)
                                    target = k.ch;
                            const Value& d = c.from == m.name ? dout() : din();
                            if (ev.type)
                                for (const Value& w : ev.type->values)
                                    rs.append(Event(ev.e, itree::pair(d, w)), Event(target, w));
                            else
                                rs.append(Event(ev.e, d), Event(target, Value::unit()));
                        }
                    }
                }
                for (const auto& [op, c] : sc->opCalls) {
                    Channel target = cch(op + "Call");
                    for (const Value& a : argTuples(md.platform.operation(op)->params))
                        rs.append(Event(c, a), Event(target, a));
                }
                cs.toCtrl.push_back(std::move(rs));
            }
            for (size_t i = 0; i + 1 < cs.machines.size(); ++i) {
                std::vector<Event> es{Event(cs.terminate, Value::unit())};
                for (const auto& k : conns) {
                    auto in = [&](const std::string& name, size_t lo) {
                        for (size_t j = lo; j < cs.machines.size(); ++j)
                            if (cs.machines[j]->m->name == name)
                                return true;
                        return false;
                    };
                    const std::string& head = cs.machines[i]->m->name;
                    if ((k.c->from == head && in(k.c->to, i + 1)) || (k.c->to == head && in(k.c->from, i + 1)))
                        for (const Value& v : connPayloads(k.type))
                            es.push_back(Event(k.ch, v));
                }
                cs.composeSync.push_back(makeSet(es));
            }
            ctrlProps.push_back(std::make_shared<const std::vector<CtrlScope::Prop>>(cs.props));
            ms.ctrls.push_back(&cs);
        }

        // module channels
        for (const auto& v : md.platform.variables) {
            CtrlScope::Prop p{v.type, mch("set_" + v.name), {}};
            for (const auto& ct : md.controllers)
                for (const auto& r : ct.shared)
                    if (r.name == v.name)
                        p.out.push_back(mch("set_EXT_" + v.name + "_" + ct.name));
            if (p.out.empty())
                continue;
            for (const Value& w : v.type->values) {
                memEvents.push_back(Event(p.in, w));
                for (Channel c : p.out)
                    memEvents.push_back(Event(c, w));
            }
            ms.props.push_back(p);
        }
        modProps = std::make_shared<const std::vector<CtrlScope::Prop>>(ms.props);
        ms.memSync = makeSet(memEvents);

        struct MConn {
            const Connection* c;
            Channel ch;  // sync channel or buffer input
            TypeP type;
        };
        std::vector<MConn> conns;
        for (const auto& c : md.connections) {
            if (c.from == md.platform.name || c.to == md.platform.name)
                continue;
            TypeP t = md.controller(c.from)->event(c.fromEvent)->type;
            std::string base = c.from + "." + c.fromEvent;
            if (c.async) {
                ModScope::Buffer b{t, mch("bufin." + base), mch("bufout." + base)};
                for (const Value& v : connPayloads(t)) {
                    bufEvents.push_back(Event(b.in, v));
                    bufEvents.push_back(Event(b.out, v));
                }
                ms.buffers.push_back(b);
                conns.push_back(MConn{&c, b.in, t});
            } else {
                conns.push_back(MConn{&c, mch("conn." + base), t});
                for (const Value& v : connPayloads(t))
                    modConn.push_back(Event(conns.back().ch, v));
            }
        }
        ms.bufSync = makeSet(bufEvents);

        for (const CtrlScope* cs : ms.ctrls) {
            const Controller& ct = *cs->ct;
            RenamingSeq rs;
            rs.append(Event(cs->terminate, Value::unit()), Event(ms.terminate, Value::unit()));
            for (const auto& v : ct.shared) {
                Channel set = Channel::intern(cs->prefix + ".set_" + v.name);
                Channel ext = Channel::intern(cs->prefix + ".set_EXT_" + v.name);
                Channel mset = mch("set_" + v.name), mext = mch("set_EXT_" + v.name + "_" + ct.name);
                for (const Value& w : v.type->values) {
                    rs.append(Event(set, w), Event(mset, w));
                    rs.append(Event(ext, w), Event(mext, w));
                }
            }
            for (const auto& c : md.connections) {
                if (c.from != ct.name && c.to != ct.name)
                    continue;
                const std::string& mine = c.from == ct.name ? c.fromEvent : c.toEvent;
                Channel src = Channel::intern(cs->prefix + "." + mine);
                TypeP t = ct.event(mine)->type;
                if (c.from == md.platform.name || c.to == md.platform.name) {
                    const std::string& pe = c.from == md.platform.name ? c.fromEvent : c.toEvent;
                    Channel target = mch(pe, cap(pe) + md.eventSuffix);
                    for (const Value& d : {din(), dout()})
                        for (const Value& p : payloads(d, t)) {
                            rs.append(Event(src, p), Event(target, p));
                            ms.alphabet.insert(Event(target, p));
                        }
                    continue;
                }
                const MConn* k = nullptr;
                for (const auto& x : conns)
                    if (x.c == &c)
                        k = &x;
                Channel target = k->ch;
                const Value& d = c.from == ct.name ? dout() : din();
                if (c.async && c.to == ct.name)
                    for (const auto& b : ms.buffers)
                        if (b.in == k->ch)
                            target = b.out;
                if (t)
                    for (const Value& w : t->values)
                        rs.append(Event(src, itree::pair(d, w)), Event(target, w));
                else
                    rs.append(Event(src, d), Event(target, Value::unit()));
            }
            std::set<std::string> ops;
            for (const Scope* sc : cs->machines)
                for (const auto& [op, c] : sc->opCalls)
                    ops.insert(op);
            for (const auto& op : ops) {
                Channel src = Channel::intern(cs->prefix + "." + op + "Call");
                Channel target = mch(op + "Call", cap(op) + "Call");
                for (const Value& a : argTuples(md.platform.operation(op)->params)) {
                    rs.append(Event(src, a), Event(target, a));
                    ms.alphabet.insert(Event(target, a));
                }
            }
            ms.toMod.push_back(std::move(rs));
        }
        for (size_t i = 0; i + 1 < ms.ctrls.size(); ++i) {
            std::vector<Event> es{Event(ms.terminate, Value::unit())};
            const std::string& head = ms.ctrls[i]->ct->name;
            auto later = [&](const std::string& n) {
                for (size_t j = i + 1; j < ms.ctrls.size(); ++j)
                    if (ms.ctrls[j]->ct->name == n)
                        return true;
                return false;
            };
            for (const auto& k : conns)
                if (!k.c->async && ((k.c->from == head && later(k.c->to)) || (k.c->to == head && later(k.c->from))))
                    for (const Value& v : connPayloads(k.type))
                        es.push_back(Event(k.ch, v));
            ms.composeSync.push_back(makeSet(es));
        }
        ms.hideList = modConn;
        ms.hideList.insert(ms.hideList.end(), bufEvents.begin(), bufEvents.end());
        ms.hideList.insert(ms.hideList.end(), memEvents.begin(), memEvents.end());
        ms.hideList.push_back(Event(ms.terminate, Value::unit()));
    }
};

Semantics::Semantics(std::shared_ptr<const Model> m) : model_(std::move(m))
{
    auto impl = std::make_shared<Impl>();
    impl->model = model_;
    impl->build();
    impl_ = impl;
}

namespace {

ITree controllerTree(const std::shared_ptr<const Semantics::Impl>& impl, const CtrlScope& cs, size_t index);

}  // namespace

ITree Semantics::machine(const std::string& controller, const std::string& stmName) const
{
    for (const auto& cs : impl_->ctrls)
        if (cs.ct->name == controller)
            for (const Scope* sc : cs.machines)
                if (sc->m->name == stmName)
                    return stm(ScopeP(impl_, sc));
    throw ModelError("no machine " + controller + "." + stmName);
}

namespace {

ITree controllerTree(const std::shared_ptr<const Semantics::Impl>& impl, const CtrlScope& cs, size_t index)
{
    std::vector<ITree> ms;
    for (size_t i = 0; i < cs.machines.size(); ++i)
        ms.push_back(itree::renamep(stm(ScopeP(impl, cs.machines[i])), cs.toCtrl[i]));
    ITree acc = ms.back();
    for (size_t i = ms.size() - 1; i-- > 0;)
        acc = itree::parallel(ms[i], acc, cs.composeSync[i]);
    acc = itree::hidep(acc, cs.connList);
    if (!cs.props.empty())
        acc = itree::hidep(itree::parallel(acc, propagate(impl->ctrlProps[index]), cs.memSync), cs.memList);
    return itree::exception(acc, cs.termSet, itree::skip());
}

}  // namespace

ITree Semantics::controller(const std::string& name) const
{
    size_t i = 0;
    for (const auto& cs : impl_->ctrls) {
        if (cs.ct->name == name)
            return controllerTree(impl_, cs, i);
        ++i;
    }
    throw ModelError("no controller " + name);
}

ITree Semantics::module() const
{
    const ModScope& ms = *impl_->mod;
    std::vector<ITree> cs;
    for (size_t i = 0; i < ms.ctrls.size(); ++i)
        cs.push_back(itree::renamep(controllerTree(impl_, *ms.ctrls[i], i), ms.toMod[i]));
    ITree acc = cs.back();
    for (size_t i = cs.size() - 1; i-- > 0;)
        acc = itree::parallel(cs[i], acc, ms.composeSync[i]);
    if (!ms.buffers.empty()) {
        std::shared_ptr<const ModScope> msp(impl_, impl_->mod.get());
        ITree bufs = buffer(msp, 0, std::nullopt);
        for (size_t b = 1; b < ms.buffers.size(); ++b)
            bufs = itree::interleave(bufs, buffer(msp, b, std::nullopt));
        acc = itree::parallel(acc, bufs, ms.bufSync);
    }
    if (!ms.props.empty())
        acc = itree::parallel(acc, propagate(impl_->modProps), ms.memSync);
    return itree::hidep(itree::exception(acc, ms.termSet, itree::skip()), ms.hideList);
}

const EventSet& Semantics::alphabet() const { return impl_->mod->alphabet; }

}  // namespace rc
