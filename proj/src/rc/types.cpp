#include "rc/types.hpp"

#include <cctype>
#include <functional>

namespace rc {

namespace {

void product(const std::vector<const std::vector<Value>*>& domains, const std::function<void(std::vector<Value>&)>& emit)
{
    std::vector<Value> cur(domains.size());
    std::function<void(size_t)> go = [&](size_t i) {
        if (i == domains.size()) {
            emit(cur);
            return;
        }
        for (const Value& v : *domains[i]) {
            cur[i] = v;
            go(i + 1);
        }
    };
    go(0);
}

std::string trim(const std::string& s)
{
    size_t b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Value> enumerate(const Type& t, const CoreConfig& cfg)
{
    std::vector<Value> out;
    auto range = [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i <= hi; ++i)
            out.push_back(Value::integer(i));
    };
    switch (t.kind) {
    case Type::Kind::Unit:
        out.push_back(Value::unit());
        break;
    case Type::Kind::Bool:
        out = {Value::boolean(false), Value::boolean(true)};
        break;
    case Type::Kind::Int:
        range(cfg.minInt, cfg.maxInt);
        break;
    case Type::Kind::Nat:
        range(0, cfg.maxNat);
        break;
    case Type::Kind::Real:
        range(cfg.minReal, cfg.maxReal);
        break;
    case Type::Kind::Prim:
        range(0, t.card - 1);
        break;
    case Type::Kind::Enum:
        for (size_t i = 0; i < t.literals.size(); ++i)
            out.push_back(Value::enumLit(t.name, static_cast<int64_t>(i), t.literals[i], t.prefix));
        break;
    case Type::Kind::Record: {
        std::vector<const std::vector<Value>*> ds;
        for (const auto& f : t.fields)
            ds.push_back(&f.second->values);
        product(ds, [&](std::vector<Value>& vs) { out.push_back(Value::record(t.name, vs)); });
        break;
    }
    case Type::Kind::Tuple: {
        std::vector<const std::vector<Value>*> ds;
        for (const auto& i : t.items)
            ds.push_back(&i->values);
        product(ds, [&](std::vector<Value>& vs) { out.push_back(Value::tuple(vs)); });
        break;
    }
    case Type::Kind::Seq: {
        // by length, then lexicographically in element order
        for (int64_t n = 0; n <= t.bound; ++n) {
            std::vector<const std::vector<Value>*> ds(static_cast<size_t>(n), &t.elem->values);
            product(ds, [&](std::vector<Value>& vs) { out.push_back(Value::list(vs, t.bound)); });
        }
        break;
    }
    }
    return out;
}

bool Type::contains(const Value& v) const
{
    for (const Value& x : values)
        if (x == v)
            return true;
    return false;
}

int Type::fieldIndex(const std::string& f) const
{
    for (size_t i = 0; i < fields.size(); ++i)
        if (fields[i].first == f)
            return static_cast<int>(i);
    return -1;
}

TypeTable::TypeTable(CoreConfig cfg) : cfg_(cfg)
{
    if (cfg_.minInt > 0 || cfg_.maxInt < 0)
        throw ModelError("config: min_int <= 0 <= max_int is required");
    if (cfg_.maxNat < 0 || cfg_.seqBound < 0 || cfg_.minReal > cfg_.maxReal)
        throw ModelError("config: invalid bounds");
    auto base = [&](const std::string& n, Type::Kind k) {
        auto t = std::make_shared<Type>();
        t->kind = k;
        t->name = n;
        named_[n] = finish(t);
    };
    base("bool", Type::Kind::Bool);
    base("int", Type::Kind::Int);
    base("nat", Type::Kind::Nat);
    base("real", Type::Kind::Real);
    auto u = std::make_shared<Type>();
    u->kind = Type::Kind::Unit;
    u->name = "()";
    unit_ = finish(u);
}

TypeP TypeTable::finish(std::shared_ptr<Type> t)
{
    t->values = enumerate(*t, cfg_);
    return t;
}

void TypeTable::definePrimitive(const std::string& name, int64_t card)
{
    if (named_.count(name))
        throw ModelError("type defined twice: " + name);
    if (card <= 0)
        throw ModelError("primitive type " + name + " needs a positive cardinality");
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Prim;
    t->name = name;
    t->card = card;
    named_[name] = finish(t);
}

void TypeTable::defineEnum(const std::string& name, std::vector<std::string> literals, const std::string& package)
{
    if (named_.count(name))
        throw ModelError("type defined twice: " + name);
    if (literals.empty())
        throw ModelError("enumeration " + name + " has no literals");
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Enum;
    t->name = name;
    t->literals = std::move(literals);
    t->prefix = package.empty() ? name : package + "_" + name;
    TypeP p = finish(t);
    named_[name] = p;
    for (const Value& v : p->values)
        literals_.emplace(v.label(), v);
}

void TypeTable::defineRecord(const std::string& name, const std::vector<std::pair<std::string, std::string>>& fields)
{
    if (named_.count(name))
        throw ModelError("type defined twice: " + name);
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Record;
    t->name = name;
    for (const auto& [f, ty] : fields)
        t->fields.emplace_back(f, resolve(ty));
    named_[name] = finish(t);
}

TypeP TypeTable::named(const std::string& name) const
{
    auto it = named_.find(name);
    return it == named_.end() ? nullptr : it->second;
}

const Value* TypeTable::literal(const std::string& lit) const
{
    auto it = literals_.find(lit);
    return it == literals_.end() ? nullptr : &it->second;
}

TypeP TypeTable::tuple(const std::vector<TypeP>& items)
{
    if (items.empty())
        return unit_;
    std::string key = "(";
    for (size_t i = 0; i < items.size(); ++i)
        key += (i ? "," : "") + items[i]->name;
    key += ")";
    auto it = structural_.find(key);
    if (it != structural_.end())
        return it->second;
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Tuple;
    t->name = key;
    t->items = items;
    TypeP p = finish(t);
    structural_[key] = p;
    return p;
}

TypeP TypeTable::resolve(const std::string& expr)
{
    size_t pos = 0;
    TypeP t = parse(expr, pos);
    if (!trim(expr.substr(pos)).empty())
        throw ModelError("malformed type expression: " + expr);
    return t;
}

TypeP TypeTable::parse(const std::string& s, size_t& pos)
{
    auto skip = [&] {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    };
    skip();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
    std::string word = s.substr(start, pos - start);
    skip();
    if (word == "seq") {
        if (pos >= s.size() || s[pos] != '(')
            throw ModelError("malformed type expression: " + s);
        ++pos;
        TypeP elem = parse(s, pos);
        skip();
        int64_t bound = cfg_.seqBound;
        if (pos < s.size() && s[pos] == ',') {
            ++pos;
            skip();
            size_t b = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                ++pos;
            if (b == pos)
                throw ModelError("malformed sequence bound: " + s);
            bound = std::stoll(s.substr(b, pos - b));
            skip();
        }
        if (pos >= s.size() || s[pos] != ')')
            throw ModelError("malformed type expression: " + s);
        ++pos;
        std::string key = "seq(" + elem->name + "," + std::to_string(bound) + ")";
        auto it = structural_.find(key);
        if (it != structural_.end())
            return it->second;
        auto t = std::make_shared<Type>();
        t->kind = Type::Kind::Seq;
        t->name = key;
        t->elem = elem;
        t->bound = bound;
        TypeP p = finish(t);
        structural_[key] = p;
        return p;
    }
    if (word.empty())
        throw ModelError("malformed type expression: " + s);
    TypeP t = named(word);
    if (!t)
        throw ModelError("unknown type: " + word);
    return t;
}

}  // namespace rc
