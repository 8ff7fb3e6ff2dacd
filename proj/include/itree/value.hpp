#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace itree {

enum class Dir : uint8_t { In, Out };

// Immutable tagged value. Copies share the representation.
class Value {
public:
    enum class Kind : uint8_t { Unit, Bool, Int, Enum, Record, List, Tuple, Dir, Id };

    Value();

    static Value unit();
    static Value boolean(bool b);
    static Value integer(int64_t n);
    // prefix is the printed qualifier ("Chemical_Angle"), may be empty
    static Value enumLit(std::string type, int64_t index, std::string literal, std::string prefix = {});
    static Value record(std::string type, std::vector<Value> fields);
    static Value list(std::vector<Value> items, int64_t bound);
    static Value tuple(std::vector<Value> items);
    static Value dir(Dir d);
    static Value id(std::string name);

    Kind kind() const;
    bool asBool() const;
    int64_t asInt() const;
    Dir asDir() const;
    int64_t enumIndex() const;
    const std::string& typeName() const;   // enum/record type, id name
    const std::string& label() const;      // enum literal
    const std::vector<Value>& items() const;
    int64_t bound() const;                 // list bound
    size_t size() const { return items().size(); }
    const Value& operator[](size_t i) const { return items()[i]; }

    size_t hash() const;
    bool operator==(const Value& o) const;
    bool operator!=(const Value& o) const { return !(*this == o); }
    bool operator<(const Value& o) const;

    // canonical printer used by menus and scenario files
    std::string str() const;

    struct Rep;  // opaque

private:
    explicit Value(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    std::shared_ptr<const Rep> rep_;
};

Value pair(const Value& a, const Value& b);

}  // namespace itree

template <>
struct std::hash<itree::Value> {
    size_t operator()(const itree::Value& v) const noexcept { return v.hash(); }
};
