#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rc/expr.hpp"
#include "rc/types.hpp"

namespace rc {

struct EventDecl {
    std::string name;
    TypeP type;  // null when the event carries no data
};

struct VarDecl {
    std::string name;
    TypeP type;
};

struct OpDecl {
    std::string name;
    std::vector<VarDecl> params;
};

struct Node {
    enum class Kind { Initial, State, Final };
    Kind kind = Kind::State;
    std::string name;
    ActionP entry, during, exit;  // null when absent
};

struct Transition {
    std::string name;
    std::string from, to;
    Trigger trigger;
    ExprP guard;    // null when absent
    ActionP action; // null when absent
};

// Behaviour shared by state machines and defined operations.
struct Machine {
    std::string name;
    std::vector<VarDecl> params;     // operations only
    std::vector<VarDecl> variables;  // local
    std::vector<VarDecl> shared;   // shared, provided from outside
    std::map<std::string, Value> constants;
    std::vector<EventDecl> events;
    std::vector<std::string> operations;  // called operations
    std::vector<Node> nodes;
    std::vector<Transition> transitions;

    const Node* node(const std::string& n) const;
    const EventDecl* event(const std::string& n) const;
    const VarDecl* variable(const std::string& n) const;  // params, locals, shared
    bool isShared(const std::string& n) const;
};

struct Connection {
    std::string from, fromEvent, to, toEvent;
    bool async = false;
};

struct Controller {
    std::string name;
    std::vector<EventDecl> events;
    std::vector<VarDecl> shared;
    std::vector<Machine> machines;
    std::vector<Machine> operations;  // defined operations
    std::vector<Connection> connections;

    const Machine* machine(const std::string& n) const;
    const Machine* operation(const std::string& n) const;
    const EventDecl* event(const std::string& n) const;
};

struct Platform {
    std::string name = "RP";
    std::vector<EventDecl> events;
    std::vector<VarDecl> variables;
    std::vector<OpDecl> operations;

    const EventDecl* event(const std::string& n) const;
    const OpDecl* operation(const std::string& n) const;
};

struct ModuleDef {
    std::string name;
    std::string eventSuffix;
    std::string banner = "Starting ITree animation...";
    Platform platform;
    std::vector<Controller> controllers;
    std::vector<Connection> connections;

    const Controller* controller(const std::string& n) const;
};

struct SpecFunction {
    std::string name;
    std::vector<VarDecl> params;
    TypeP result;
    std::vector<ExprP> pre, post;
};

// Outcome of solving a definite description.
struct Solution {
    enum class Kind { Ok, PreconditionViolated, NoSolution, NonUnique };
    Kind kind = Kind::Ok;
    Value value;
};

const char* kindName(Solution::Kind k);

// A parsed and validated model together with its instantiation.
class Model : public Context {
public:
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    const TypeTable& types() const override { return *types_; }
    bool isFunction(const std::string& n) const override { return functions_.count(n) != 0; }
    Res call(const std::string& fn, const std::vector<Value>& args) const override;

    Solution solve(const std::string& fn, const std::vector<Value>& args) const;
    const SpecFunction* function(const std::string& n) const;
    const std::map<std::string, SpecFunction>& functions() const { return functions_; }

    const ModuleDef& module() const { return module_; }
    const CoreConfig& config() const { return types_->config(); }
    TypeTable& typeTable() { return *types_; }

    // key=value overrides of config entries and constants
    using Overrides = std::map<std::string, std::string>;

    static std::shared_ptr<Model> parse(const std::string& text, const Overrides& ov = {});
    static std::shared_ptr<Model> load(const std::string& path, const Overrides& ov = {});

private:
    Model() = default;

    std::unique_ptr<TypeTable> types_;
    std::map<std::string, SpecFunction> functions_;
    ModuleDef module_;

    mutable std::mutex memoMu_;
    mutable std::map<std::pair<std::string, std::vector<Value>>, Solution> memo_;

    friend class ModelLoader;
};

}  // namespace rc
