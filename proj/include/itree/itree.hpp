#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "itree/event.hpp"
#include "itree/finmap.hpp"
#include "itree/value.hpp"

namespace itree {

class ITree;

// Deferred tree: a shared zero-argument suspension. Not memoised, so forcing
// is repeatable and free of shared mutable state.
class Lazy {
public:
    using Fn = std::function<ITree()>;

    Lazy() = default;
    explicit Lazy(Fn f) : fn_(std::make_shared<const Fn>(std::move(f))) {}
    static Lazy now(const ITree& t);

    ITree force() const;
    // same suspension object
    bool identical(const Lazy& o) const { return fn_ == o.fn_; }

private:
    std::shared_ptr<const Fn> fn_;
};

using Choices = FinMap<Event, Lazy>;
using Kont = std::function<ITree(const Value&)>;

class ITree {
public:
    enum class Kind : uint8_t { Ret, Sil, Vis };

    static ITree ret(const Value& v);
    static ITree sil(Lazy next);
    static ITree vis(Choices cs);

    Kind kind() const { return node_->kind; }
    bool isRet() const { return node_->kind == Kind::Ret; }
    bool isSil() const { return node_->kind == Kind::Sil; }
    bool isVis() const { return node_->kind == Kind::Vis; }

    const Value& value() const { return node_->value; }
    const Lazy& next() const { return node_->next; }
    const Choices& choices() const { return node_->choices; }

private:
    struct Node {
        Kind kind = Kind::Ret;
        Value value;
        Lazy next;
        Choices choices;
    };
    explicit ITree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

inline ITree Lazy::force() const { return (*fn_)(); }

// Defers construction of a tree until forced.
template <typename F>
Lazy later(F&& f)
{
    return Lazy(Lazy::Fn(std::forward<F>(f)));
}

ITree ret(const Value& v);
ITree skip();
ITree stop();
ITree div();
ITree run(const std::vector<Event>& es);

ITree bind(const ITree& p, Kont k);
// p ; q, discarding p's result
ITree then(const ITree& p, std::function<ITree()> q);
ITree iterate(std::function<bool(const Value&)> cond, Kont body, const Value& s);
ITree loop(Kont body, const Value& s = Value::unit());

struct Observation {
    enum class Kind : uint8_t { Terminated, Choices, Stuck, TauBudgetExceeded };
    Kind kind = Kind::Stuck;
    Value value;             // Terminated
    ITree node = ITree::ret(Value::unit());  // the stable node reached
    size_t taus = 0;         // silent steps consumed

    std::vector<Event> events() const;
};

constexpr size_t kDefaultTauBudget = 10000;

Observation observe(const ITree& p, size_t tauBudget = kDefaultTauBudget);

// Structural equality truncated at depth constructor layers.
bool approxEq(const ITree& p, const ITree& q, size_t depth);

// Bounded pretty printer for diagnostics.
std::string show(const ITree& p, size_t depth);

}  // namespace itree
