#include "rpl/timing/bound_expr.hpp"
#include "rpl/lang/error.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace rpl::timing {

namespace {

BoundPtr node(BoundExpr::Kind kind, std::vector<BoundPtr> args)
{
    auto e = std::make_shared<BoundExpr>();
    e->kind = kind;
    e->args = std::move(args);
    return e;
}

std::int64_t plus(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw Error("bound arithmetic overflow");
    return r;
}

std::int64_t times(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error("bound arithmetic overflow");
    return r;
}

} // namespace

BoundPtr constant(std::int64_t v)
{
    auto e = std::make_shared<BoundExpr>();
    e->value = v;
    return e;
}

BoundPtr param(std::string name)
{
    auto e = std::make_shared<BoundExpr>();
    e->kind = BoundExpr::Kind::Param;
    e->name = std::move(name);
    return e;
}

BoundPtr ref(std::string name, std::vector<BoundPtr> args)
{
    auto e = node(BoundExpr::Kind::Ref, std::move(args));
    std::const_pointer_cast<BoundExpr>(e)->name = std::move(name);
    return e;
}

bool is_const(const BoundPtr& e, std::int64_t v) { return e->kind == BoundExpr::Kind::Const && e->value == v; }

BoundPtr add(BoundPtr a, BoundPtr b)
{
    if (is_const(a, 0))
        return b;
    if (is_const(b, 0))
        return a;
    if (a->kind == BoundExpr::Kind::Const && b->kind == BoundExpr::Kind::Const)
        return constant(plus(a->value, b->value));
    return node(BoundExpr::Kind::Add, {std::move(a), std::move(b)});
}

BoundPtr mul(BoundPtr a, BoundPtr b)
{
    if (is_const(a, 0) || is_const(b, 0))
        return constant(0);
    if (is_const(a, 1))
        return b;
    if (is_const(b, 1))
        return a;
    if (a->kind == BoundExpr::Kind::Const && b->kind == BoundExpr::Kind::Const)
        return constant(times(a->value, b->value));
    return node(BoundExpr::Kind::Mul, {std::move(a), std::move(b)});
}

BoundPtr max(BoundPtr a, BoundPtr b)
{
    if (equal(a, b))
        return a;
    if (a->kind == BoundExpr::Kind::Const && b->kind == BoundExpr::Kind::Const)
        return constant(std::max(a->value, b->value));
    return node(BoundExpr::Kind::Max, {std::move(a), std::move(b)});
}

BoundPtr trunc_div(BoundPtr a, BoundPtr b)
{
    if (is_const(b, 1))
        return a;
    if (a->kind == BoundExpr::Kind::Const && b->kind == BoundExpr::Kind::Const && b->value != 0)
        return constant(a->value / b->value);
    return node(BoundExpr::Kind::TruncDiv, {std::move(a), std::move(b)});
}

bool equal(const BoundPtr& a, const BoundPtr& b)
{
    if (a == b)
        return true;
    if (a->kind != b->kind || a->value != b->value || a->name != b->name || a->args.size() != b->args.size())
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i]))
            return false;
    return true;
}

bool non_negative(const BoundPtr& e)
{
    using K = BoundExpr::Kind;
    switch (e->kind) {
    case K::Const: return e->value >= 0;
    case K::Param: return e->name == kEfficiency || e->name == kConcCases;
    case K::Add:
    case K::Mul:
    case K::TruncDiv:
        return std::all_of(e->args.begin(), e->args.end(), [](const BoundPtr& a) { return non_negative(a); });
    case K::Max: return std::any_of(e->args.begin(), e->args.end(), [](const BoundPtr& a) { return non_negative(a); });
    case K::Ref: return false;
    }
    return false;
}

namespace {

void flatten(const BoundPtr& e, BoundExpr::Kind kind, std::vector<BoundPtr>& out)
{
    if (e->kind == kind) {
        for (const auto& a : e->args)
            flatten(a, kind, out);
    } else {
        out.push_back(e);
    }
}

void sort_terms(std::vector<BoundPtr>& terms)
{
    std::stable_sort(terms.begin(), terms.end(), [](const BoundPtr& a, const BoundPtr& b) {
        bool ca = a->kind == BoundExpr::Kind::Const, cb = b->kind == BoundExpr::Kind::Const;
        if (ca != cb)
            return cb;  // constants last
        return to_string(*a) < to_string(*b);
    });
}

BoundPtr fold(std::vector<BoundPtr> terms, BoundPtr (*combine)(BoundPtr, BoundPtr), BoundPtr empty)
{
    if (terms.empty())
        return empty;
    BoundPtr out = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i)
        out = combine(out, terms[i]);
    return out;
}

// `small` subsumed by `big` when big's addends contain small's and the rest is non-negative.
bool subsumed(const BoundPtr& small, const BoundPtr& big)
{
    std::vector<BoundPtr> s, b;
    flatten(small, BoundExpr::Kind::Add, s);
    flatten(big, BoundExpr::Kind::Add, b);
    std::int64_t small_const = 0, big_const = 0;
    auto strip = [](std::vector<BoundPtr>& v, std::int64_t& c) {
        v.erase(std::remove_if(v.begin(), v.end(),
                               [&](const BoundPtr& t) {
                                   if (t->kind != BoundExpr::Kind::Const)
                                       return false;
                                   c += t->value;
                                   return true;
                               }),
                v.end());
    };
    strip(s, small_const);
    strip(b, big_const);
    if (small_const > big_const)
        return false;
    for (const auto& t : s) {
        auto it = std::find_if(b.begin(), b.end(), [&](const BoundPtr& u) { return equal(t, u); });
        if (it == b.end())
            return false;
        b.erase(it);
    }
    return std::all_of(b.begin(), b.end(), [](const BoundPtr& t) { return non_negative(t); });
}

} // namespace

BoundPtr simplify(const BoundPtr& e)
{
    using K = BoundExpr::Kind;
    switch (e->kind) {
    case K::Const:
    case K::Param: return e;
    case K::Ref: {
        std::vector<BoundPtr> args;
        for (const auto& a : e->args)
            args.push_back(simplify(a));
        return ref(e->name, std::move(args));
    }
    case K::TruncDiv: return trunc_div(simplify(e->args[0]), simplify(e->args[1]));
    case K::Add: {
        std::vector<BoundPtr> raw, terms;
        flatten(e, K::Add, raw);
        std::int64_t c = 0;
        for (const auto& t : raw) {
            BoundPtr s = simplify(t);
            std::vector<BoundPtr> inner;
            flatten(s, K::Add, inner);
            for (auto& i : inner) {
                if (i->kind == K::Const)
                    c = plus(c, i->value);
                else
                    terms.push_back(i);
            }
        }
        sort_terms(terms);
        if (c != 0)
            terms.push_back(constant(c));
        return fold(std::move(terms), add, constant(0));
    }
    case K::Mul: {
        std::vector<BoundPtr> raw, terms;
        flatten(e, K::Mul, raw);
        std::int64_t c = 1;
        for (const auto& t : raw) {
            BoundPtr s = simplify(t);
            if (s->kind == K::Const)
                c = times(c, s->value);
            else
                terms.push_back(s);
        }
        if (c == 0)
            return constant(0);
        sort_terms(terms);
        if (c != 1)
            terms.insert(terms.begin(), constant(c));
        return fold(std::move(terms), mul, constant(1));
    }
    case K::Max: {
        std::vector<BoundPtr> raw, terms;
        flatten(e, K::Max, raw);
        for (const auto& t : raw) {
            BoundPtr s = simplify(t);
            std::vector<BoundPtr> inner;
            flatten(s, K::Max, inner);
            for (auto& i : inner)
                if (std::none_of(terms.begin(), terms.end(), [&](const BoundPtr& u) { return equal(u, i); }))
                    terms.push_back(i);
        }
        std::vector<BoundPtr> kept;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < terms.size() && !dominated; ++j)
                if (i != j && subsumed(terms[i], terms[j]) && !(subsumed(terms[j], terms[i]) && j > i))
                    dominated = true;
            if (!dominated)
                kept.push_back(terms[i]);
        }
        // Constants: keep only the largest, and drop it when some other term is known to cover it.
        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        std::vector<BoundPtr> symbolic;
        for (const auto& t : kept) {
            if (t->kind == K::Const)
                best = std::max(best, t->value);
            else
                symbolic.push_back(t);
        }
        sort_terms(symbolic);
        bool covered = best <= 0 && std::any_of(symbolic.begin(), symbolic.end(), [](const BoundPtr& t) { return non_negative(t); });
        if (best != std::numeric_limits<std::int64_t>::min() && !covered)
            symbolic.push_back(constant(best));
        return fold(std::move(symbolic), max, constant(0));
    }
    }
    return e;
}

BoundPtr substitute(const BoundPtr& e, const std::map<std::string, BoundPtr>& bindings)
{
    if (e->kind == BoundExpr::Kind::Param) {
        auto it = bindings.find(e->name);
        return it == bindings.end() ? e : it->second;
    }
    if (e->args.empty())
        return e;
    auto copy = std::make_shared<BoundExpr>(*e);
    for (auto& a : copy->args)
        a = substitute(a, bindings);
    return copy;
}

std::int64_t evaluate(const BoundExpr& e, const Env& env)
{
    using K = BoundExpr::Kind;
    switch (e.kind) {
    case K::Const: return e.value;
    case K::Param: {
        auto it = env.find(e.name);
        if (it == env.end())
            throw Error("no value for parameter " + e.name);
        return it->second;
    }
    case K::Add: return plus(evaluate(*e.args[0], env), evaluate(*e.args[1], env));
    case K::Mul: return times(evaluate(*e.args[0], env), evaluate(*e.args[1], env));
    case K::Max: return std::max(evaluate(*e.args[0], env), evaluate(*e.args[1], env));
    case K::TruncDiv: {
        std::int64_t d = evaluate(*e.args[1], env);
        if (d == 0)
            throw Error("division by zero in bound " + to_string(e));
        return evaluate(*e.args[0], env) / d;
    }
    case K::Ref: throw Error("unsolved reference " + to_string(e));
    }
    return 0;
}

std::string to_string(const BoundExpr& e)
{
    using K = BoundExpr::Kind;
    switch (e.kind) {
    case K::Const: return std::to_string(e.value);
    case K::Param: return e.name;
    case K::Add: return "(" + to_string(*e.args[0]) + "+" + to_string(*e.args[1]) + ")";
    case K::Mul: return "(" + to_string(*e.args[0]) + "*" + to_string(*e.args[1]) + ")";
    case K::Max: return "max(" + to_string(*e.args[0]) + "," + to_string(*e.args[1]) + ")";
    case K::TruncDiv: return "trunc(" + to_string(*e.args[0]) + "/" + to_string(*e.args[1]) + ")";
    case K::Ref: {
        std::string out = e.name;
        if (!e.args.empty()) {
            out += "(";
            for (std::size_t i = 0; i < e.args.size(); ++i)
                out += (i ? "," : "") + to_string(*e.args[i]);
            out += ")";
        }
        return out;
    }
    }
    return "?";
}

namespace {

class BoundParser {
public:
    explicit BoundParser(std::string_view s) : s_(s) {}

    BoundPtr parse()
    {
        BoundPtr e = expr();
        skip();
        if (pos_ != s_.size())
            fail("trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const
    {
        throw Error("bad bound expression at offset " + std::to_string(pos_) + ": " + why);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    void expect(char c)
    {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool keyword(std::string_view kw)
    {
        skip();
        if (s_.substr(pos_, kw.size()) != kw)
            return false;
        std::size_t end = pos_ + kw.size();
        if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            return false;
        pos_ = end;
        return true;
    }

    BoundPtr expr()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            BoundPtr lhs = expr();
            skip();
            if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '*'))
                fail("expected '+' or '*'");
            char op = s_[pos_++];
            BoundPtr rhs = expr();
            expect(')');
            return node(op == '+' ? BoundExpr::Kind::Add : BoundExpr::Kind::Mul, {lhs, rhs});
        }
        if (keyword("max")) {
            expect('(');
            BoundPtr a = expr();
            expect(',');
            BoundPtr b = expr();
            expect(')');
            return node(BoundExpr::Kind::Max, {a, b});
        }
        if (keyword("trunc")) {
            expect('(');
            BoundPtr a = expr();
            expect('/');
            BoundPtr b = expr();
            expect(')');
            return node(BoundExpr::Kind::TruncDiv, {a, b});
        }
        if (keyword(kEfficiency))
            return param(std::string(kEfficiency));
        if (keyword(kConcCases))
            return param(std::string(kConcCases));
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_++;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string digits(s_.substr(start, pos_ - start));
            if (digits == "-")
                fail("expected digits");
            try {
                return constant(std::stoll(digits));
            } catch (const std::out_of_range&) {
                fail("constant out of range");
            }
        }
        fail("unexpected character");
    }
};

} // namespace

BoundPtr parse_bound(std::string_view text) { return BoundParser(text).parse(); }

} // namespace rpl::timing
