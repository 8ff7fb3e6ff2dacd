#include "itree/itree.hpp"

#include <unordered_set>

namespace itree {

Lazy Lazy::now(const ITree& t)
{
    return Lazy([t] { return t; });
}

ITree ITree::ret(const Value& v)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Ret;
    n->value = v;
    return ITree(std::move(n));
}

ITree ITree::sil(Lazy next)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sil;
    n->next = std::move(next);
    return ITree(std::move(n));
}

ITree ITree::vis(Choices cs)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Vis;
    n->choices = std::move(cs);
    return ITree(std::move(n));
}

ITree ret(const Value& v) { return ITree::ret(v); }

ITree skip()
{
    static const ITree s = ITree::ret(Value::unit());
    return s;
}

ITree stop()
{
    static const ITree s = ITree::vis({});
    return s;
}

ITree div()
{
    return ITree::sil(later([] { return div(); }));
}

ITree run(const std::vector<Event>& es)
{
    Choices cs;
    for (Event e : es)
        cs.insert(e, later([es] { return run(es); }));
    return ITree::vis(std::move(cs));
}

ITree bind(const ITree& p, Kont k)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return k(p.value());
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, k] { return itree::bind(n.force(), k); }));
    }
    case ITree::Kind::Vis: {
        Choices cs;
        cs.reserve(p.choices().size());
        for (const auto& [e, c] : p.choices())
            cs.append(e, later([c, k] { return itree::bind(c.force(), k); }));
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree then(const ITree& p, std::function<ITree()> q)
{
    return itree::bind(p, [q = std::move(q)](const Value&) { return q(); });
}

ITree iterate(std::function<bool(const Value&)> cond, Kont body, const Value& s)
{
    if (!cond(s))
        return ITree::ret(s);
    return ITree::sil(later([cond, body, s] {
        return itree::bind(body(s), [cond, body](const Value& r) { return iterate(cond, body, r); });
    }));
}

ITree loop(Kont body, const Value& s)
{
    return iterate([](const Value&) { return true; }, std::move(body), s);
}

std::vector<Event> Observation::events() const
{
    std::vector<Event> es;
    if (kind == Kind::Choices)
        es = node.choices().keys();
    return es;
}

Observation observe(const ITree& p, size_t tauBudget)
{
    Observation o;
    ITree cur = p;
    size_t taus = 0;
    while (cur.isSil()) {
        if (taus == tauBudget) {
            o.kind = Observation::Kind::TauBudgetExceeded;
            o.node = cur;
            o.taus = taus;
            return o;
        }
        cur = cur.next().force();
        ++taus;
    }
    o.node = cur;
    o.taus = taus;
    if (cur.isRet()) {
        o.kind = Observation::Kind::Terminated;
        o.value = cur.value();
    } else if (cur.choices().empty()) {
        o.kind = Observation::Kind::Stuck;
    } else {
        o.kind = Observation::Kind::Choices;
    }
    return o;
}

bool approxEq(const ITree& p, const ITree& q, size_t depth)
{
    if (depth == 0)
        return true;
    if (p.kind() != q.kind())
        return false;
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p.value() == q.value();
    case ITree::Kind::Sil:
        return approxEq(p.next().force(), q.next().force(), depth - 1);
    case ITree::Kind::Vis: {
        const Choices& f = p.choices();
        const Choices& g = q.choices();
        if (f.size() != g.size())
            return false;
        auto gi = g.index();
        for (const auto& [e, c] : f)
            if (!gi.contains(e))
                return false;
        for (const auto& [e, c] : f)
            if (!approxEq(c.force(), g.at(e).force(), depth - 1))
                return false;
        return true;
    }
    }
    return false;
}

std::string show(const ITree& p, size_t depth)
{
    if (depth == 0)
        return "…";
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return "Ret " + p.value().str();
    case ITree::Kind::Sil:
        return "τ(" + show(p.next().force(), depth - 1) + ")";
    case ITree::Kind::Vis: {
        if (p.choices().empty())
            return "stop";
        std::string s = "Vis{";
        bool first = true;
        for (const auto& [e, c] : p.choices()) {
            if (!first)
                s += ", ";
            first = false;
            s += e.str() + " ↦ " + show(c.force(), depth - 1);
        }
        return s + "}";
    }
    }
    return "?";
}

}  // namespace itree
