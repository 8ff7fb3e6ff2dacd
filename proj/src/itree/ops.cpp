#include "itree/ops.hpp"

#include <algorithm>
#include <unordered_map>

namespace itree {

namespace {

using SetPtr = std::shared_ptr<const EventSet>;

// Event -> continuation lookup over a choice map.
class ChoiceLookup {
public:
    explicit ChoiceLookup(const Choices& cs) : cs_(cs)
    {
        if (cs.size() > 8)
            for (size_t i = 0; i < cs.size(); ++i)
                map_.emplace(cs[i].first.id(), i);
    }
    const Lazy* find(Event e) const
    {
        if (cs_.size() > 8) {
            auto it = map_.find(e.id());
            return it == map_.end() ? nullptr : &cs_[it->second].second;
        }
        return cs_.find(e);
    }

private:
    const Choices& cs_;
    std::unordered_map<uint32_t, size_t> map_;
};

}  // namespace

ITree inp(Channel c, const std::vector<Value>& vs)
{
    Choices cs;
    cs.reserve(vs.size());
    for (const Value& v : vs)
        cs.insert(Event(c, v), Lazy::now(ITree::ret(v)));
    return ITree::vis(std::move(cs));
}

ITree outp(Channel c, const Value& v)
{
    Choices cs;
    cs.append(Event(c, v), Lazy::now(skip()));
    return ITree::vis(std::move(cs));
}

ITree guard(bool b) { return b ? skip() : stop(); }

ITree genchoice(const ITree& p, const MergeFn& m, const ITree& q)
{
    if (p.isVis() && q.isVis())
        return ITree::vis(m(p.choices(), q.choices()));
    if (p.isSil()) {
        Lazy n = p.next();
        return ITree::sil(later([n, m, q] { return genchoice(n.force(), m, q); }));
    }
    if (q.isSil()) {
        Lazy n = q.next();
        return ITree::sil(later([p, m, n] { return genchoice(p, m, n.force()); }));
    }
    if (p.isRet() && q.isRet())
        return p.value() == q.value() ? p : stop();
    if (p.isRet())
        return p;
    return q;
}

MergeFn mergeExclFn()
{
    return [](const Choices& f, const Choices& g) { return mergeExcl(f, g); };
}

MergeFn overrideFn()
{
    return [](const Choices& f, const Choices& g) { return override(f, g); };
}

MergeFn converse(MergeFn m)
{
    return [m = std::move(m)](const Choices& f, const Choices& g) { return m(g, f); };
}

bool wellFormedMerge(const MergeFn& m, const Choices& sample)
{
    auto same = [&](const Choices& x) {
        if (x.size() != sample.size())
            return false;
        for (const auto& [e, c] : sample) {
            const Lazy* d = x.find(e);
            if (!d || !d->identical(c))
                return false;
        }
        return true;
    };
    return same(m(Choices{}, sample)) && same(m(sample, Choices{}));
}

ITree extchoice(const ITree& p, const ITree& q)
{
    static const MergeFn m = mergeExclFn();
    return genchoice(p, m, q);
}

ITree extchoiceBiased(const ITree& p, const ITree& q)
{
    static const MergeFn m = overrideFn();
    return genchoice(q, m, p);
}

ITree extchoiceAll(const std::vector<ITree>& ps)
{
    if (ps.empty())
        return stop();
    ITree acc = ps.front();
    for (size_t i = 1; i < ps.size(); ++i)
        acc = extchoice(acc, ps[i]);
    return acc;
}

// Parallel composition. Off-sync events offered by both sides are dropped.
// Menu order: synchronised events, then right-only, then left-only.
static ITree par(const ITree& p, const ITree& q, const SetPtr& sync)
{
    if (p.isSil()) {
        Lazy n = p.next();
        return ITree::sil(later([n, q, sync] { return par(n.force(), q, sync); }));
    }
    if (q.isSil()) {
        Lazy n = q.next();
        return ITree::sil(later([p, n, sync] { return par(p, n.force(), sync); }));
    }
    if (p.isRet() && q.isRet())
        return ITree::ret(pair(p.value(), q.value()));
    if (p.isRet()) {
        Choices cs;
        for (const auto& [e, c] : q.choices())
            if (!sync->contains(e))
                cs.append(e, later([p, c, sync] { return par(p, c.force(), sync); }));
        return ITree::vis(std::move(cs));
    }
    if (q.isRet()) {
        Choices cs;
        for (const auto& [e, c] : p.choices())
            if (!sync->contains(e))
                cs.append(e, later([c, q, sync] { return par(c.force(), q, sync); }));
        return ITree::vis(std::move(cs));
    }
    const Choices& f = p.choices();
    const Choices& g = q.choices();
    ChoiceLookup fl(f), gl(g);
    Choices cs;
    cs.reserve(f.size() + g.size());
    for (const auto& [e, c] : f) {
        if (!sync->contains(e))
            continue;
        if (const Lazy* d = gl.find(e)) {
            Lazy dc = *d;
            cs.append(e, later([c, dc, sync] { return par(c.force(), dc.force(), sync); }));
        }
    }
    for (const auto& [e, c] : g)
        if (!sync->contains(e) && !fl.find(e))
            cs.append(e, later([p, c, sync] { return par(p, c.force(), sync); }));
    for (const auto& [e, c] : f)
        if (!sync->contains(e) && !gl.find(e))
            cs.append(e, later([c, q, sync] { return par(c.force(), q, sync); }));
    return ITree::vis(std::move(cs));
}

ITree parallel(const ITree& p, const ITree& q, std::shared_ptr<const EventSet> sync)
{
    return par(p, q, sync);
}

ITree parallel(const ITree& p, const ITree& q, const EventSet& sync)
{
    return par(p, q, std::make_shared<const EventSet>(sync));
}

ITree interleave(const ITree& p, const ITree& q)
{
    static const SetPtr none = std::make_shared<const EventSet>();
    return par(p, q, none);
}

static ITree hideSet(const ITree& p, const SetPtr& a)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, a] { return hideSet(n.force(), a); }));
    }
    case ITree::Kind::Vis: {
        const Choices& f = p.choices();
        const Lazy* hidden = nullptr;
        size_t count = 0;
        for (const auto& [e, c] : f)
            if (a->contains(e)) {
                hidden = &c;
                ++count;
            }
        if (count > 1)
            return stop();
        if (count == 1) {
            Lazy h = *hidden;
            return ITree::sil(later([h, a] { return hideSet(h.force(), a); }));
        }
        Choices cs;
        cs.reserve(f.size());
        for (const auto& [e, c] : f)
            cs.append(e, later([c, a] { return hideSet(c.force(), a); }));
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree hide(const ITree& p, std::shared_ptr<const EventSet> a) { return hideSet(p, a); }

ITree hide(const ITree& p, const EventSet& a) { return hideSet(p, std::make_shared<const EventSet>(a)); }

namespace {

// Position of the first occurrence of each event in a hide list.
struct Priority {
    std::vector<int32_t> rank;  // by event id, -1 when absent

    explicit Priority(const HideList& el)
    {
        uint32_t maxId = 0;
        for (Event e : el)
            maxId = std::max(maxId, e.id());
        rank.assign(el.empty() ? 0 : maxId + 1, -1);
        for (size_t i = 0; i < el.size(); ++i)
            if (rank[el[i].id()] < 0)
                rank[el[i].id()] = static_cast<int32_t>(i);
    }
    int32_t of(Event e) const { return e.id() < rank.size() ? rank[e.id()] : -1; }
};

}  // namespace

// One pass per node: the earliest listed event of the menu is hidden, which is
// what the left fold of single-event hides computes.
static ITree hidePrio(const ITree& p, const std::shared_ptr<const Priority>& pr)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, pr] { return hidePrio(n.force(), pr); }));
    }
    case ITree::Kind::Vis: {
        const Choices& f = p.choices();
        const Lazy* best = nullptr;
        int32_t bestRank = -1;
        for (const auto& [e, c] : f) {
            int32_t r = pr->of(e);
            if (r >= 0 && (bestRank < 0 || r < bestRank)) {
                bestRank = r;
                best = &c;
            }
        }
        if (best) {
            Lazy h = *best;
            return ITree::sil(later([h, pr] { return hidePrio(h.force(), pr); }));
        }
        Choices cs;
        cs.reserve(f.size());
        for (const auto& [e, c] : f)
            cs.append(e, later([c, pr] { return hidePrio(c.force(), pr); }));
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree hidep(const ITree& p, const HideList& el)
{
    if (el.empty())
        return p;
    return hidePrio(p, std::make_shared<const Priority>(el));
}

ITree hidepFold(const ITree& p, const HideList& el)
{
    ITree acc = p;
    for (Event e : el)
        acc = hide(acc, EventSet{e});
    return acc;
}

namespace {

// Source event -> (position, target) pairs of a renaming.
struct RenIndex {
    std::unordered_map<uint32_t, std::vector<std::pair<size_t, Event>>> bySource;

    template <typename Pairs>
    explicit RenIndex(const Pairs& ps)
    {
        size_t i = 0;
        for (const auto& [s, t] : ps)
            bySource[s.id()].emplace_back(i++, t);
    }

    struct Hit {
        size_t pos;
        Event target;
        const Lazy* cont;
    };

    std::vector<Hit> hits(const Choices& f) const
    {
        std::vector<Hit> out;
        for (const auto& [e, c] : f) {
            auto it = bySource.find(e.id());
            if (it == bySource.end())
                continue;
            for (const auto& [pos, t] : it->second)
                out.push_back(Hit{pos, t, &c});
        }
        std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) { return a.pos < b.pos; });
        return out;
    }
};

}  // namespace

static ITree renameRel(const ITree& p, const std::shared_ptr<const RenIndex>& ix)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, ix] { return renameRel(n.force(), ix); }));
    }
    case ITree::Kind::Vis: {
        auto hits = ix->hits(p.choices());
        // mkFunctional of the inverse: a target survives iff it has one source
        std::unordered_map<uint32_t, int> sources;
        for (const auto& h : hits)
            ++sources[h.target.id()];
        Choices cs;
        for (const auto& h : hits)
            if (sources[h.target.id()] == 1) {
                Lazy c = *h.cont;
                cs.append(h.target, later([c, ix] { return renameRel(c.force(), ix); }));
            }
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree rename(const ITree& p, const Renaming& rho)
{
    return renameRel(p, std::make_shared<const RenIndex>(rho));
}

static ITree renameSeq(const ITree& p, const std::shared_ptr<const RenIndex>& ix)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, ix] { return renameSeq(n.force(), ix); }));
    }
    case ITree::Kind::Vis: {
        auto hits = ix->hits(p.choices());
        // dropDup: the least position wins each target
        std::unordered_map<uint32_t, bool> seen;
        Choices cs;
        for (const auto& h : hits)
            if (seen.emplace(h.target.id(), true).second) {
                Lazy c = *h.cont;
                cs.append(h.target, later([c, ix] { return renameSeq(c.force(), ix); }));
            }
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree renamep(const ITree& p, const RenamingSeq& rs)
{
    return renameSeq(p, std::make_shared<const RenIndex>(rs));
}

ITree renamepSpec(const ITree& p, const RenamingSeq& rs)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, rs] { return renamepSpec(n.force(), rs); }));
    }
    case ITree::Kind::Vis: {
        const Choices& f = p.choices();
        auto r = mkFunctional(inverse(ran(dropDup(dresl(f.index(), rs)))));
        Choices g = compose(f, r);
        Choices cs;
        for (const auto& [e, c] : g)
            cs.append(e, later([c, rs] { return renamepSpec(c.force(), rs); }));
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree interrupt(const ITree& p, const ITree& q)
{
    if (p.isSil()) {
        Lazy n = p.next();
        return ITree::sil(later([n, q] { return interrupt(n.force(), q); }));
    }
    if (q.isSil()) {
        Lazy n = q.next();
        return ITree::sil(later([p, n] { return interrupt(p, n.force()); }));
    }
    if (p.isRet())
        return p;
    if (q.isRet())
        return q;
    const Choices& f = p.choices();
    const Choices& g = q.choices();
    ChoiceLookup gl(g);
    Choices cs;
    cs.reserve(f.size() + g.size());
    for (const auto& [e, c] : f)
        if (!gl.find(e))
            cs.append(e, later([c, q] { return interrupt(c.force(), q); }));
    for (const auto& [e, c] : g)
        cs.append(e, c);
    return ITree::vis(std::move(cs));
}

static ITree except(const ITree& p, const SetPtr& a, const ITree& q)
{
    switch (p.kind()) {
    case ITree::Kind::Ret:
        return p;
    case ITree::Kind::Sil: {
        Lazy n = p.next();
        return ITree::sil(later([n, a, q] { return except(n.force(), a, q); }));
    }
    case ITree::Kind::Vis: {
        const Choices& f = p.choices();
        Choices cs;
        cs.reserve(f.size());
        for (const auto& [e, c] : f)
            if (!a->contains(e))
                cs.append(e, later([c, a, q] { return except(c.force(), a, q); }));
        for (const auto& [e, c] : f)
            if (a->contains(e))
                cs.append(e, Lazy::now(q));
        return ITree::vis(std::move(cs));
    }
    }
    return stop();
}

ITree exception(const ITree& p, std::shared_ptr<const EventSet> a, const ITree& q) { return except(p, a, q); }

ITree exception(const ITree& p, const EventSet& a, const ITree& q)
{
    return except(p, std::make_shared<const EventSet>(a), q);
}

}  // namespace itree
