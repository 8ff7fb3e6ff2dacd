#include "itree/value.hpp"

#include <functional>
#include <stdexcept>

namespace itree {

struct Value::Rep {
    Kind kind = Kind::Unit;
    int64_t num = 0;
    std::string name;
    std::string label;
    std::string prefix;
    std::vector<Value> items;
    size_t hash = 0;
};

namespace {

size_t mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::shared_ptr<Value::Rep> finish(std::shared_ptr<Value::Rep> r)
{
    size_t h = mix(static_cast<size_t>(r->kind), std::hash<int64_t>{}(r->num));
    if (r->kind == Value::Kind::Enum || r->kind == Value::Kind::Record || r->kind == Value::Kind::Id)
        h = mix(h, std::hash<std::string>{}(r->name));
    for (const auto& v : r->items)
        h = mix(h, v.hash());
    r->hash = h;
    return r;
}

const std::shared_ptr<const Value::Rep>& unitRep()
{
    static const std::shared_ptr<const Value::Rep> u = finish(std::make_shared<Value::Rep>());
    return u;
}

}  // namespace

Value::Value() : rep_(unitRep()) {}

Value Value::unit() { return Value(); }

Value Value::boolean(bool b)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Bool;
    r->num = b ? 1 : 0;
    return Value(finish(r));
}

Value Value::integer(int64_t n)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Int;
    r->num = n;
    return Value(finish(r));
}

Value Value::enumLit(std::string type, int64_t index, std::string literal, std::string prefix)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Enum;
    r->num = index;
    r->name = std::move(type);
    r->label = std::move(literal);
    r->prefix = std::move(prefix);
    return Value(finish(r));
}

Value Value::record(std::string type, std::vector<Value> fields)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Record;
    r->name = std::move(type);
    r->items = std::move(fields);
    return Value(finish(r));
}

Value Value::list(std::vector<Value> items, int64_t bound)
{
    if (static_cast<int64_t>(items.size()) > bound)
        throw std::length_error("bounded list exceeds its bound");
    auto r = std::make_shared<Rep>();
    r->kind = Kind::List;
    r->num = bound;
    r->items = std::move(items);
    return Value(finish(r));
}

Value Value::tuple(std::vector<Value> items)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Tuple;
    r->items = std::move(items);
    return Value(finish(r));
}

Value Value::dir(Dir d)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Dir;
    r->num = d == Dir::In ? 0 : 1;
    return Value(finish(r));
}

Value Value::id(std::string name)
{
    auto r = std::make_shared<Rep>();
    r->kind = Kind::Id;
    r->name = std::move(name);
    return Value(finish(r));
}

Value::Kind Value::kind() const { return rep_->kind; }

bool Value::asBool() const
{
    if (rep_->kind != Kind::Bool)
        throw std::logic_error("value is not a boolean: " + str());
    return rep_->num != 0;
}

int64_t Value::asInt() const
{
    if (rep_->kind != Kind::Int)
        throw std::logic_error("value is not an integer: " + str());
    return rep_->num;
}

Dir Value::asDir() const
{
    if (rep_->kind != Kind::Dir)
        throw std::logic_error("value is not a direction: " + str());
    return rep_->num == 0 ? Dir::In : Dir::Out;
}

int64_t Value::enumIndex() const { return rep_->num; }
const std::string& Value::typeName() const { return rep_->name; }
const std::string& Value::label() const { return rep_->label; }
const std::vector<Value>& Value::items() const { return rep_->items; }
int64_t Value::bound() const { return rep_->num; }
size_t Value::hash() const { return rep_->hash; }

bool Value::operator==(const Value& o) const
{
    if (rep_ == o.rep_)
        return true;
    const Rep& a = *rep_;
    const Rep& b = *o.rep_;
    if (a.hash != b.hash || a.kind != b.kind || a.num != b.num)
        return false;
    if ((a.kind == Kind::Enum || a.kind == Kind::Record || a.kind == Kind::Id) && a.name != b.name)
        return false;
    return a.items == b.items;
}

bool Value::operator<(const Value& o) const
{
    const Rep& a = *rep_;
    const Rep& b = *o.rep_;
    if (a.kind != b.kind)
        return a.kind < b.kind;
    if (a.num != b.num)
        return a.num < b.num;
    if (a.name != b.name)
        return a.name < b.name;
    return a.items < b.items;
}

std::string Value::str() const
{
    const Rep& r = *rep_;
    auto join = [&](char open, char close) {
        std::string s(1, open);
        for (size_t i = 0; i < r.items.size(); ++i) {
            if (i)
                s += ',';
            s += r.items[i].str();
        }
        s += close;
        return s;
    };
    switch (r.kind) {
    case Kind::Unit:
        return "()";
    case Kind::Bool:
        return r.num ? "True" : "False";
    case Kind::Int:
        return std::to_string(r.num);
    case Kind::Enum:
        return r.prefix.empty() ? r.label : r.prefix + "_" + r.label;
    case Kind::Record:
    case Kind::Tuple:
        return join('(', ')');
    case Kind::List:
        return join('[', ']');
    case Kind::Dir:
        return r.num == 0 ? "Din" : "Dout";
    case Kind::Id:
        return r.name;
    }
    return "?";
}

Value pair(const Value& a, const Value& b) { return Value::tuple({a, b}); }

}  // namespace itree
