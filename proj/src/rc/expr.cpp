#include "rc/expr.hpp"

#include <algorithm>
#include <cctype>

namespace rc {

void Env::set(const std::string& n, const Value& v)
{
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
        if (it->first == n) {
            it->second = v;
            return;
        }
    vars_.emplace_back(n, v);
}

const Value* Env::find(const std::string& n) const
{
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
        if (it->first == n)
            return &it->second;
    return nullptr;
}

namespace {

using Op = Expr::Op;

Res checkedInt(int64_t v, const Context& ctx)
{
    const CoreConfig& c = ctx.types().config();
    if (v < c.minInt || v > c.maxInt)
        return std::nullopt;
    return Value::integer(v);
}

bool isInt(const Value& v) { return v.kind() == Value::Kind::Int; }
bool isBool(const Value& v) { return v.kind() == Value::Kind::Bool; }

Res quantify(const Expr& e, Env& env, const Context& ctx)
{
    bool exists = e.op == Op::Exists;
    for (const Value& v : e.binderType->values) {
        env.bind(e.name, v);
        Res cond = eval(*e.args[0], env, ctx);
        Res body;
        bool blocked = !cond || !isBool(*cond);
        if (!blocked && cond->asBool()) {
            body = eval(*e.args[1], env, ctx);
            blocked = !body || !isBool(*body);
        }
        env.pop();
        if (blocked)
            return std::nullopt;
        if (!cond->asBool())
            continue;
        if (exists && body->asBool())
            return Value::boolean(true);
        if (!exists && !body->asBool())
            return Value::boolean(false);
    }
    return Value::boolean(!exists);
}

}  // namespace

Res eval(const Expr& e, Env& env, const Context& ctx)
{
    auto arg = [&](size_t i) { return eval(*e.args[i], env, ctx); };
    switch (e.op) {
    case Op::Lit:
        return e.lit;
    case Op::Var:
    case Op::Result: {
        const Value* v = env.find(e.op == Op::Result ? "result" : e.name);
        if (!v)
            throw ModelError("unbound variable: " + (e.op == Op::Result ? std::string("result") : e.name));
        return *v;
    }
    case Op::Call: {
        std::vector<Value> vs;
        for (size_t i = 0; i < e.args.size(); ++i) {
            Res r = arg(i);
            if (!r)
                return std::nullopt;
            vs.push_back(*r);
        }
        if (e.name == "size") {
            if (vs.size() != 1 || vs[0].kind() != Value::Kind::List)
                return std::nullopt;
            return Value::integer(static_cast<int64_t>(vs[0].size()));
        }
        if (e.name == "append") {
            if (vs.size() != 2 || vs[0].kind() != Value::Kind::List)
                return std::nullopt;
            if (static_cast<int64_t>(vs[0].size()) >= vs[0].bound())
                return std::nullopt;
            std::vector<Value> items = vs[0].items();
            items.push_back(vs[1]);
            return Value::list(std::move(items), vs[0].bound());
        }
        return ctx.call(e.name, vs);
    }
    case Op::Field: {
        Res r = arg(0);
        if (!r || r->kind() != Value::Kind::Record)
            return std::nullopt;
        TypeP t = ctx.types().named(r->typeName());
        int i = t ? t->fieldIndex(e.name) : -1;
        if (i < 0)
            throw ModelError("record " + r->typeName() + " has no field " + e.name);
        return (*r)[static_cast<size_t>(i)];
    }
    case Op::Index: {
        Res s = arg(0), i = arg(1);
        if (!s || !i || s->kind() != Value::Kind::List || !isInt(*i))
            return std::nullopt;
        int64_t k = i->asInt();
        if (k < 0 || k >= static_cast<int64_t>(s->size()))
            return std::nullopt;
        return (*s)[static_cast<size_t>(k)];
    }
    case Op::Not: {
        Res a = arg(0);
        if (!a || !isBool(*a))
            return std::nullopt;
        return Value::boolean(!a->asBool());
    }
    case Op::Neg: {
        Res a = arg(0);
        if (!a || !isInt(*a))
            return std::nullopt;
        return checkedInt(-a->asInt(), ctx);
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
        Res a = arg(0);
        if (!a || !isBool(*a))
            return std::nullopt;
        bool av = a->asBool();
        if (e.op == Op::And && !av)
            return Value::boolean(false);
        if (e.op == Op::Or && av)
            return Value::boolean(true);
        if (e.op == Op::Implies && !av)
            return Value::boolean(true);
        Res b = arg(1);
        if (!b || !isBool(*b))
            return std::nullopt;
        return Value::boolean(b->asBool());
    }
    case Op::Iff:
    case Op::Eq:
    case Op::Ne: {
        Res a = arg(0), b = arg(1);
        if (!a || !b)
            return std::nullopt;
        bool eq = *a == *b;
        return Value::boolean(e.op == Op::Ne ? !eq : eq);
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod: {
        Res a = arg(0), b = arg(1);
        if (!a || !b || !isInt(*a) || !isInt(*b))
            return std::nullopt;
        int64_t x = a->asInt(), y = b->asInt();
        switch (e.op) {
        case Op::Lt:
            return Value::boolean(x < y);
        case Op::Le:
            return Value::boolean(x <= y);
        case Op::Gt:
            return Value::boolean(x > y);
        case Op::Ge:
            return Value::boolean(x >= y);
        case Op::Add:
            return checkedInt(x + y, ctx);
        case Op::Sub:
            return checkedInt(x - y, ctx);
        case Op::Mul:
            return checkedInt(x * y, ctx);
        case Op::Div:
            return y == 0 ? std::nullopt : checkedInt(x / y, ctx);
        default:
            return y == 0 ? std::nullopt : checkedInt(x % y, ctx);
        }
    }
    case Op::Forall:
    case Op::Exists:
        return quantify(e, env, ctx);
    }
    return std::nullopt;
}

bool holds(const Expr& e, Env& env, const Context& ctx)
{
    Res r = eval(e, env, ctx);
    return r && isBool(*r) && r->asBool();
}

void freeVars(const Expr& e, std::vector<std::string>& out)
{
    std::function<void(const Expr&, std::vector<std::string>&)> go = [&](const Expr& x, std::vector<std::string>& bound) {
        if (x.op == Op::Var) {
            if (std::find(bound.begin(), bound.end(), x.name) == bound.end() &&
                std::find(out.begin(), out.end(), x.name) == out.end())
                out.push_back(x.name);
            return;
        }
        if (x.op == Op::Forall || x.op == Op::Exists) {
            bound.push_back(x.name);
            for (const auto& a : x.args)
                go(*a, bound);
            bound.pop_back();
            return;
        }
        for (const auto& a : x.args)
            go(*a, bound);
    };
    std::vector<std::string> bound;
    go(e, bound);
}

namespace {

struct Token {
    enum class Kind { Ident, Num, Sym, End } kind = Kind::End;
    std::string text;
    size_t pos = 0;
};

std::vector<Token> lex(const std::string& s)
{
    static const std::vector<std::string> syms = {"<=>", "==", "!=", "<=", ">=", "=>", "/\\", "\\/", "<", ">", "=",
                                                  "+",   "-",  "*",  "/",  "%",  "(",  ")",   "[",   "]", ",", ".",
                                                  "!",   "?",  ";",  "|",  "@",  ":",  "#"};
    std::vector<Token> ts;
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isalpha(c) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = s.substr(i, j - i);
            i = j;
        } else if (std::isdigit(c)) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
            t.kind = Token::Kind::Num;
            t.text = s.substr(i, j - i);
            i = j;
        } else {
            bool found = false;
            for (const auto& sym : syms)
                if (s.compare(i, sym.size(), sym) == 0) {
                    t.kind = Token::Kind::Sym;
                    t.text = sym;
                    i += sym.size();
                    found = true;
                    break;
                }
            if (!found)
                throw ParseError("unexpected character '" + std::string(1, s[i]) + "' in: " + s);
        }
        ts.push_back(t);
    }
    Token end;
    end.pos = s.size();
    ts.push_back(end);
    return ts;
}

class Parser {
public:
    Parser(const std::string& src, const Symbols& sym) : src_(src), sym_(sym), ts_(lex(src)) {}

    bool atEnd() const { return peek().kind == Token::Kind::End; }

    ExprP expr() { return iff(); }

    ActionP action()
    {
        auto seq = std::make_shared<Action>();
        seq->kind = Action::Kind::Seq;
        seq->steps.push_back(step());
        while (accept(";"))
            seq->steps.push_back(step());
        if (seq->steps.size() == 1)
            return seq->steps.front();
        return seq;
    }

    Trigger trigger()
    {
        Trigger t;
        if (atEnd())
            return t;
        t.event = ident();
        if (accept("?")) {
            t.kind = Trigger::Kind::Input;
            t.binder = ident();
        } else if (accept("!")) {
            t.kind = Trigger::Kind::Output;
            t.value = expr();
        } else if (accept(".")) {
            t.kind = Trigger::Kind::Sync;
            t.value = expr();
        } else {
            t.kind = Trigger::Kind::Simple;
        }
        return t;
    }

    void expectEnd()
    {
        if (!atEnd())
            fail("unexpected '" + peek().text + "'");
    }

private:
    const Token& peek(size_t k = 0) const { return ts_[std::min(i_ + k, ts_.size() - 1)]; }
    bool isSym(const char* s, size_t k = 0) const { return peek(k).kind == Token::Kind::Sym && peek(k).text == s; }
    bool isWord(const char* s) const { return peek().kind == Token::Kind::Ident && peek().text == s; }
    bool accept(const char* s)
    {
        if (isSym(s) || isWord(s)) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(const char* s)
    {
        if (!accept(s))
            fail(std::string("expected '") + s + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(msg + " at column " + std::to_string(peek().pos + 1) + " in: " + src_);
    }
    std::string ident()
    {
        if (peek().kind != Token::Kind::Ident)
            fail("expected a name");
        return ts_[i_++].text;
    }

    static ExprP node(Op op, std::vector<ExprP> args)
    {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->args = std::move(args);
        return e;
    }

    ExprP iff()
    {
        ExprP l = implies();
        while (accept("<=>"))
            l = node(Op::Iff, {l, implies()});
        return l;
    }
    ExprP implies()
    {
        ExprP l = disj();
        if (accept("=>"))
            return node(Op::Implies, {l, implies()});
        return l;
    }
    ExprP disj()
    {
        ExprP l = conj();
        while (accept("or") || accept("\\/"))
            l = node(Op::Or, {l, conj()});
        return l;
    }
    ExprP conj()
    {
        ExprP l = negation();
        while (accept("and") || accept("/\\"))
            l = node(Op::And, {l, negation()});
        return l;
    }
    ExprP negation()
    {
        if (accept("not"))
            return node(Op::Not, {negation()});
        return comparison();
    }
    ExprP comparison()
    {
        ExprP l = additive();
        static const std::vector<std::pair<const char*, Op>> ops = {
            {"==", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le}, {">=", Op::Ge}, {"<", Op::Lt}, {">", Op::Gt}};
        for (const auto& [s, op] : ops)
            if (accept(s))
                return node(op, {l, additive()});
        return l;
    }
    ExprP additive()
    {
        ExprP l = multiplicative();
        for (;;) {
            if (accept("+"))
                l = node(Op::Add, {l, multiplicative()});
            else if (accept("-"))
                l = node(Op::Sub, {l, multiplicative()});
            else
                return l;
        }
    }
    ExprP multiplicative()
    {
        ExprP l = unary();
        for (;;) {
            if (accept("*"))
                l = node(Op::Mul, {l, unary()});
            else if (accept("/"))
                l = node(Op::Div, {l, unary()});
            else if (accept("%"))
                l = node(Op::Mod, {l, unary()});
            else
                return l;
        }
    }
    ExprP unary()
    {
        if (accept("-")) {
            ExprP a = unary();
            if (a->op == Op::Lit && a->lit.kind() == Value::Kind::Int) {
                auto e = std::make_shared<Expr>();
                e->lit = Value::integer(-a->lit.asInt());
                return e;
            }
            return node(Op::Neg, {a});
        }
        return postfix();
    }
    ExprP postfix()
    {
        ExprP e = primary();
        for (;;) {
            if (isSym(".") && peek(1).kind == Token::Kind::Ident) {
                ++i_;
                auto f = std::make_shared<Expr>();
                f->op = Op::Field;
                f->name = ident();
                f->args = {e};
                e = f;
            } else if (accept("[")) {
                ExprP idx = expr();
                expect("]");
                e = node(Op::Index, {e, idx});
            } else {
                return e;
            }
        }
    }
    ExprP primary()
    {
        const Token& t = peek();
        if (t.kind == Token::Kind::Num) {
            ++i_;
            auto e = std::make_shared<Expr>();
            e->lit = Value::integer(std::stoll(t.text));
            return e;
        }
        if (accept("(")) {
            ExprP e = expr();
            expect(")");
            return e;
        }
        if (t.kind != Token::Kind::Ident)
            fail("expected an expression");
        if (accept("true") || accept("false")) {
            auto e = std::make_shared<Expr>();
            e->lit = Value::boolean(ts_[i_ - 1].text == "true");
            return e;
        }
        if (accept("result")) {
            auto e = std::make_shared<Expr>();
            e->op = Op::Result;
            return e;
        }
        if (isWord("forall") || isWord("exists"))
            return quantifier();
        std::string n = ident();
        if (accept("(")) {
            if (n != "size" && n != "append" && !(sym_.ctx && sym_.ctx->isFunction(n)))
                fail("unknown function '" + n + "'");
            auto e = std::make_shared<Expr>();
            e->op = Op::Call;
            e->name = n;
            if (!accept(")")) {
                do
                    e->args.push_back(expr());
                while (accept(","));
                expect(")");
            }
            return e;
        }
        auto e = std::make_shared<Expr>();
        if (auto c = sym_.constants.find(n); c != sym_.constants.end()) {
            e->lit = c->second;
            return e;
        }
        if (const Value* lit = sym_.types ? sym_.types->literal(n) : nullptr) {
            e->lit = *lit;
            return e;
        }
        e->op = Op::Var;
        e->name = n;
        return e;
    }
    ExprP quantifier()
    {
        bool all = ts_[i_].text == "forall";
        ++i_;
        auto e = std::make_shared<Expr>();
        e->op = all ? Op::Forall : Op::Exists;
        e->name = ident();
        expect(":");
        size_t start = peek().pos;
        while (!atEnd() && !isSym("|"))
            ++i_;
        if (!sym_.types)
            fail("no type table for quantifier");
        e->binderType = sym_.types->resolve(src_.substr(start, peek().pos - start));
        expect("|");
        ExprP cond = expr();
        expect("@");
        ExprP body = expr();
        e->args = {cond, body};
        return e;
    }

    ActionP step()
    {
        auto a = std::make_shared<Action>();
        if (accept("skip"))
            return a;
        if (accept("#")) {
            ident();  // clock reset: no timed semantics
            return a;
        }
        std::string n = ident();
        a->name = n;
        if (accept("=")) {
            a->kind = Action::Kind::Assign;
            a->expr = expr();
        } else if (accept("!")) {
            a->kind = Action::Kind::Output;
            a->expr = expr();
        } else if (accept("?")) {
            a->kind = Action::Kind::Input;
            a->target = ident();
        } else if (accept("(")) {
            a->kind = Action::Kind::Call;
            if (!accept(")")) {
                do
                    a->args.push_back(expr());
                while (accept(","));
                expect(")");
            }
        } else {
            a->kind = Action::Kind::Signal;
        }
        return a;
    }

    std::string src_;
    const Symbols& sym_;
    std::vector<Token> ts_;
    size_t i_ = 0;
};

}  // namespace

ExprP parseExpr(const std::string& src, const Symbols& sym)
{
    Parser p(src, sym);
    ExprP e = p.expr();
    p.expectEnd();
    return e;
}

ActionP parseAction(const std::string& src, const Symbols& sym)
{
    Parser p(src, sym);
    if (p.atEnd())
        return std::make_shared<Action>();
    ActionP a = p.action();
    p.expectEnd();
    return a;
}

Trigger parseTrigger(const std::string& src, const Symbols& sym)
{
    Parser p(src, sym);
    Trigger t = p.trigger();
    p.expectEnd();
    return t;
}

}  // namespace rc
