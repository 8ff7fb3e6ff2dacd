#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rc/types.hpp"

namespace rc {

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op {
        Lit, Var, Result, Call, Field, Index,
        Not, Neg, And, Or, Implies, Iff,
        Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod,
        Forall, Exists,
    };
    Op op = Op::Lit;
    Value lit;                  // Lit
    std::string name;           // Var, Call, Field, quantifier binder
    TypeP binderType;           // quantifiers
    std::vector<ExprP> args;    // operands; quantifier: {condition, body}
};

// Evaluation result; nullopt means the expression is blocked (arithmetic out
// of range, index out of bounds, violated precondition).
using Res = std::optional<Value>;

// Ordered name -> value bindings; later bindings shadow earlier ones.
class Env {
public:
    void bind(const std::string& n, const Value& v) { vars_.emplace_back(n, v); }
    void set(const std::string& n, const Value& v);
    void pop() { vars_.pop_back(); }
    const Value* find(const std::string& n) const;

private:
    std::vector<std::pair<std::string, Value>> vars_;
};

// Resolution and evaluation services supplied by the model.
class Context {
public:
    virtual ~Context() = default;
    virtual const TypeTable& types() const = 0;
    virtual bool isFunction(const std::string& n) const = 0;
    virtual Res call(const std::string& fn, const std::vector<Value>& args) const = 0;
};

Res eval(const Expr& e, Env& env, const Context& ctx);
// guard semantics: blocked or non-boolean counts as false
bool holds(const Expr& e, Env& env, const Context& ctx);

// Free variable names in first-occurrence order.
void freeVars(const Expr& e, std::vector<std::string>& out);

struct Action;
using ActionP = std::shared_ptr<const Action>;

struct Action {
    enum class Kind { Skip, Assign, Output, Input, Signal, Call, Seq };
    Kind kind = Kind::Skip;
    std::string name;            // assigned variable, event, or operation
    std::string target;          // Input: receiving variable
    ExprP expr;                  // Assign, Output
    std::vector<ExprP> args;     // Call
    std::vector<ActionP> steps;  // Seq
};

struct Trigger {
    enum class Kind { None, Simple, Input, Output, Sync };
    Kind kind = Kind::None;
    std::string event;
    std::string binder;  // Input
    ExprP value;         // Output, Sync
};

// Symbols visible to the parser: constants are inlined as literals.
struct Symbols {
    TypeTable* types = nullptr;  // resolves quantifier types
    const Context* ctx = nullptr;
    std::map<std::string, Value> constants;
};

class ParseError : public ModelError {
public:
    using ModelError::ModelError;
};

ExprP parseExpr(const std::string& src, const Symbols& sym);
ActionP parseAction(const std::string& src, const Symbols& sym);
Trigger parseTrigger(const std::string& src, const Symbols& sym);

}  // namespace rc
