#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "itree/value.hpp"

namespace rc {

using itree::Value;

// Bounds of the core types; reals are modelled as bounded integers.
struct CoreConfig {
    int64_t minInt = -3;
    int64_t maxInt = 3;
    int64_t maxNat = 3;
    int64_t minReal = 0;
    int64_t maxReal = 1;
    int64_t seqBound = 2;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Type;
using TypeP = std::shared_ptr<const Type>;

struct Type {
    enum class Kind { Unit, Bool, Int, Nat, Real, Prim, Enum, Record, Seq, Tuple };
    Kind kind = Kind::Unit;
    std::string name;                                   // canonical spelling
    int64_t card = 0;                                   // Prim
    std::vector<std::string> literals;                  // Enum
    std::string prefix;                                 // Enum print qualifier
    std::vector<std::pair<std::string, TypeP>> fields;  // Record
    TypeP elem;                                         // Seq
    int64_t bound = 0;                                  // Seq
    std::vector<TypeP> items;                           // Tuple
    std::vector<Value> values;                          // full enumeration

    bool isNumeric() const
    {
        return kind == Kind::Int || kind == Kind::Nat || kind == Kind::Real || kind == Kind::Prim;
    }
    bool contains(const Value& v) const;
    int fieldIndex(const std::string& f) const;
};

// Named types plus structural types built from type expressions such as
// "seq(GasSensor)" or "seq(int, 3)". Enumerations are computed once.
class TypeTable {
public:
    explicit TypeTable(CoreConfig cfg);

    const CoreConfig& config() const { return cfg_; }

    void definePrimitive(const std::string& name, int64_t card);
    void defineEnum(const std::string& name, std::vector<std::string> literals, const std::string& package);
    void defineRecord(const std::string& name, const std::vector<std::pair<std::string, std::string>>& fields);

    // Resolves a type expression; throws ModelError when unknown.
    TypeP resolve(const std::string& expr);
    TypeP unit() const { return unit_; }
    TypeP tuple(const std::vector<TypeP>& items);

    TypeP named(const std::string& name) const;
    // enum literal lookup: literal name -> value (first declaring type wins)
    const Value* literal(const std::string& lit) const;
    const std::map<std::string, TypeP>& all() const { return named_; }

private:
    TypeP finish(std::shared_ptr<Type> t);
    TypeP parse(const std::string& s, size_t& pos);

    CoreConfig cfg_;
    std::map<std::string, TypeP> named_;
    std::map<std::string, TypeP> structural_;
    std::map<std::string, Value> literals_;
    TypeP unit_;
};

// Enumeration of a type under a configuration, in canonical order.
std::vector<Value> enumerate(const Type& t, const CoreConfig& cfg);

}  // namespace rc
