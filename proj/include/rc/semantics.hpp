#pragma once

#include <memory>
#include <string>

#include "itree/ops.hpp"
#include "rc/model.hpp"

namespace rc {

// Initial value of a variable: 0 for numeric types when in range, the empty
// sequence, the first literal, or the first enumerated value otherwise.
itree::Value defaultValue(const Type& t);

// Compiles a validated model into interaction trees, one scope at a time.
// Trees are built lazily and keep the model alive.
class Semantics {
public:
    explicit Semantics(std::shared_ptr<const Model> m);

    // memory-composed machine after trigger renaming, termination and hiding
    itree::ITree machine(const std::string& controller, const std::string& stm) const;
    itree::ITree controller(const std::string& name) const;
    itree::ITree module() const;

    // every event the module can expose
    const itree::EventSet& alphabet() const;
    const Model& model() const { return *model_; }

    struct Impl;

private:
    std::shared_ptr<const Model> model_;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace rc
