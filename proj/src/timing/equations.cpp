#include "rpl/timing/equations.hpp"
#include "rpl/lang/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace rpl::timing {

using namespace rpl::lang;

const Equation* CostEquationSystem::find(std::string_view label) const
{
    for (const auto& e : equations)
        if (e.label == label)
            return &e;
    return nullptr;
}

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

const char* const kUnknownArg = "UNKNOWN";

BoundPtr neg(BoundPtr e) { return mul(constant(-1), std::move(e)); }

/// num / den, both integer-valued.
struct SymRat {
    BoundPtr num;
    BoundPtr den;
};

SymRat normalise(SymRat r)
{
    if (r.num->kind == BoundExpr::Kind::Const && r.den->kind == BoundExpr::Kind::Const) {
        std::int64_t n = r.num->value, d = r.den->value;
        std::int64_t g = std::gcd(n, d);
        if (g == 0)
            g = 1;
        if (d < 0)
            g = -g;
        return {constant(n / g), constant(d / g)};
    }
    return r;
}

struct SymVal {
    enum class K { Unknown, Num, Obj, Fut, List, Pair };
    K k = K::Unknown;
    SymRat r;
    std::set<int> classes;
    BoundPtr end;
    BoundPtr length;  // null: unknown length
    std::shared_ptr<SymVal> elem;
    std::vector<SymVal> items;

    static SymVal num(SymRat r)
    {
        SymVal v;
        v.k = K::Num;
        v.r = normalise(std::move(r));
        return v;
    }
    static SymVal integer(BoundPtr n) { return num({std::move(n), constant(1)}); }
    static SymVal fut(BoundPtr end)
    {
        SymVal v;
        v.k = K::Fut;
        v.end = std::move(end);
        return v;
    }
    static SymVal list(BoundPtr length, std::shared_ptr<SymVal> elem)
    {
        SymVal v;
        v.k = K::List;
        v.length = std::move(length);
        v.elem = std::move(elem);
        return v;
    }
};

bool same(const SymVal& a, const SymVal& b)
{
    using K = SymVal::K;
    if (a.k != b.k)
        return false;
    switch (a.k) {
    case K::Unknown: return true;
    case K::Num: return equal(a.r.num, b.r.num) && equal(a.r.den, b.r.den);
    case K::Obj: return a.classes == b.classes;
    case K::Fut: return equal(a.end, b.end);
    case K::List:
        if (!a.length != !b.length || (a.length && !equal(a.length, b.length)) || !a.elem != !b.elem)
            return false;
        return !a.elem || same(*a.elem, *b.elem);
    case K::Pair: return same(a.items[0], b.items[0]) && same(a.items[1], b.items[1]);
    }
    return false;
}

std::shared_ptr<SymVal> merge_elem(const std::shared_ptr<SymVal>& a, const std::shared_ptr<SymVal>& b);

SymVal merge(const SymVal& a, const SymVal& b)
{
    using K = SymVal::K;
    if (same(a, b))
        return a;
    if (a.k != b.k)
        return {};
    switch (a.k) {
    case K::Obj: {
        SymVal v = a;
        v.classes.insert(b.classes.begin(), b.classes.end());
        return v;
    }
    case K::Fut: return SymVal::fut(max(a.end, b.end));
    case K::List: {
        BoundPtr len = a.length && b.length ? max(a.length, b.length) : nullptr;
        return SymVal::list(len, merge_elem(a.elem, b.elem));
    }
    case K::Pair: {
        SymVal v = a;
        v.items = {merge(a.items[0], b.items[0]), merge(a.items[1], b.items[1])};
        return v;
    }
    default: return {};
    }
}

std::shared_ptr<SymVal> merge_elem(const std::shared_ptr<SymVal>& a, const std::shared_ptr<SymVal>& b)
{
    if (!a)
        return b;
    if (!b)
        return a;
    return std::make_shared<SymVal>(merge(*a, *b));
}

void collect_ends(const SymVal& v, std::vector<BoundPtr>& out)
{
    if (v.k == SymVal::K::Fut)
        out.push_back(v.end);
    if (v.elem)
        collect_ends(*v.elem, out);
    for (const auto& i : v.items)
        collect_ends(i, out);
}

using Scope = std::map<std::string, SymVal, std::less<>>;

struct TState {
    std::vector<Scope> scopes;
    BoundPtr seq = constant(0);
    BoundPtr t = constant(0);
};

struct Ctx {
    int class_index = -1;
    const Scope* fields = nullptr;
    std::vector<BoundPtr> returns;
    std::set<std::string> callees;
};

void walk_assigned(const Block& b, std::multiset<std::string>& out)
{
    for (const auto& s : b.stmts)
        std::visit(overloaded{
                       [&](const stmt::Assign& a) { out.insert(a.name); },
                       [&](const stmt::AsyncCall& c) {
                           if (!c.target.decl_type)
                               out.insert(c.target.name);
                       },
                       [&](const stmt::Get& g) {
                           if (!g.target.decl_type)
                               out.insert(g.target.name);
                       },
                       [&](const stmt::Hold& h) {
                           if (!h.target.decl_type)
                               out.insert(h.target.name);
                       },
                       [&](const stmt::New& n) {
                           if (!n.target.decl_type)
                               out.insert(n.target.name);
                       },
                       [&](const stmt::If& f) {
                           walk_assigned(f.then_block, out);
                           if (f.else_block)
                               walk_assigned(*f.else_block, out);
                       },
                       [&](const stmt::While& w) { walk_assigned(w.body, out); },
                       [](const auto&) {},
                   },
                   s.node);
}

bool has_cost(const Block& b)
{
    for (const auto& s : b.stmts) {
        bool hit = std::visit(overloaded{
                                  [](const stmt::Cost&) { return true; },
                                  [](const stmt::If& f) {
                                      return has_cost(f.then_block) || (f.else_block && has_cost(*f.else_block));
                                  },
                                  [](const stmt::While& w) { return has_cost(w.body); },
                                  [](const auto&) { return false; },
                              },
                              s.node);
        if (hit)
            return true;
    }
    return false;
}

void expr_vars(const Expr& e, std::set<std::string>& out)
{
    std::visit(overloaded{
                   [&](const expr::Var& v) { out.insert(v.name); },
                   [&](const expr::Unary& u) { expr_vars(*u.operand, out); },
                   [&](const expr::Binary& b) {
                       expr_vars(*b.lhs, out);
                       expr_vars(*b.rhs, out);
                   },
                   [&](const expr::Call& c) {
                       for (const auto& a : c.args)
                           expr_vars(*a, out);
                   },
                   [&](const expr::ListLit& l) {
                       for (const auto& a : l.items)
                           expr_vars(*a, out);
                   },
                   [&](const expr::SetLit& l) {
                       for (const auto& a : l.items)
                           expr_vars(*a, out);
                   },
                   [](const auto&) {},
               },
               e.node);
}

const expr::Var* as_var(const Expr& e) { return std::get_if<expr::Var>(&e.node); }

class Builder {
public:
    explicit Builder(const Program& p) : p_(p)
    {
        std::map<std::string, int> uses;
        for (const auto& c : p.classes)
            for (const auto& m : c.methods)
                ++uses[m.name];
        for (const auto& c : p.classes) {
            std::map<std::string, std::string> names;
            for (const auto& m : c.methods)
                names[m.name] = uses[m.name] > 1 ? c.name + "." + m.name : m.name;
            labels_.push_back(std::move(names));
        }
        for (std::size_t i = 0; i < p.classes.size(); ++i)
            fields_.push_back(field_values(static_cast<int>(i)));
    }

    CostEquationSystem run()
    {
        std::map<std::string, Equation> eqs;
        std::map<std::string, std::set<std::string>> calls;
        for (std::size_t ci = 0; ci < p_.classes.size(); ++ci) {
            for (const auto& m : p_.classes[ci].methods) {
                Ctx ctx;
                ctx.class_index = static_cast<int>(ci);
                ctx.fields = &fields_[ci];
                TState st;
                st.scopes.emplace_back();
                Equation eq;
                eq.label = labels_[ci].at(m.name);
                for (const auto& prm : m.params) {
                    st.scopes.back()[prm.name] = param_value(prm);
                    if (numeric(prm.type))
                        eq.params.push_back(prm.name);
                }
                exec_block(m.body, st, ctx);
                eq.sequential = st.seq;
                BoundPtr done = ctx.returns.empty() ? st.t : ctx.returns.front();
                for (std::size_t i = 1; i < ctx.returns.size(); ++i)
                    done = max(done, ctx.returns[i]);
                eq.critical = simplify(done);
                calls[eq.label] = ctx.callees;
                eqs[eq.label] = std::move(eq);
            }
        }
        Ctx ctx;
        static const Scope no_fields;
        ctx.fields = &no_fields;
        TState st;
        st.scopes.emplace_back();
        exec_block(p_.main, st, ctx);
        Equation main{"main", {}, simplify(st.seq), simplify(st.t)};
        calls["main"] = ctx.callees;
        eqs["main"] = std::move(main);

        CostEquationSystem out;
        std::map<std::string, int> mark;  // 1 visiting, 2 done
        std::vector<std::string> stack;
        std::function<void(const std::string&)> visit = [&](const std::string& label) {
            if (mark[label] == 2)
                return;
            if (mark[label] == 1) {
                auto from = std::find(stack.begin(), stack.end(), label);
                std::string cycle;
                for (auto it = from; it != stack.end(); ++it)
                    cycle += *it + " -> ";
                throw AnalysisError(AnalysisErrorKind::UnsupportedRecursion, "recursive calls: " + cycle + label);
            }
            mark[label] = 1;
            stack.push_back(label);
            for (const auto& callee : calls[label])
                visit(callee);
            stack.pop_back();
            mark[label] = 2;
            out.equations.push_back(eqs.at(label));
        };
        for (const auto& [label, _] : eqs)
            if (label != "main")
                visit(label);
        visit("main");
        return out;
    }

private:
    const Program& p_;
    std::vector<std::map<std::string, std::string>> labels_;
    std::vector<Scope> fields_;

    [[noreturn]] static void fail(AnalysisErrorKind kind, int line, const std::string& msg)
    {
        throw AnalysisError(kind, "line " + std::to_string(line) + ": " + msg, line);
    }

    static bool numeric(const Type& t) { return t.name == "Int" || t.name == "Rat"; }

    SymVal param_value(const lang::Param& prm) const
    {
        if (numeric(prm.type))
            return SymVal::integer(param(prm.name));
        return object_of_type(prm.type);
    }

    SymVal object_of_type(const Type& t) const
    {
        SymVal v;
        for (const auto* c : p_.implementors(t.name)) {
            v.k = SymVal::K::Obj;
            v.classes.insert(static_cast<int>(c - p_.classes.data()));
        }
        return v;
    }

    Scope field_values(int ci)
    {
        const ClassDecl& c = p_.classes[static_cast<std::size_t>(ci)];
        std::multiset<std::string> assigned;
        for (const auto& m : c.methods)
            walk_assigned(m.body, assigned);
        Scope fields;
        Ctx ctx;
        ctx.class_index = ci;
        ctx.fields = &fields;
        TState st;
        st.scopes.emplace_back();
        for (const auto& f : c.fields) {
            SymVal v;
            if (!assigned.count(f.name) && f.init)
                v = eval(*f.init, st, ctx);
            else if (!f.init)
                v = default_value(f.type);
            fields[f.name] = v;
        }
        return fields;
    }

    SymVal default_value(const Type& t) const
    {
        if (numeric(t))
            return SymVal::integer(constant(0));
        if (t.name == "List")
            return SymVal::list(constant(0), nullptr);
        return {};
    }

    SymVal* lookup(TState& st, const std::string& name)
    {
        for (auto it = st.scopes.rbegin(); it != st.scopes.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end())
                return &f->second;
        }
        return nullptr;
    }

    SymVal read(TState& st, const Ctx& ctx, const std::string& name)
    {
        if (SymVal* v = lookup(st, name))
            return *v;
        if (auto f = ctx.fields->find(name); f != ctx.fields->end())
            return f->second;
        return {};
    }

    SymVal eval(const Expr& e, TState& st, Ctx& ctx)
    {
        using K = SymVal::K;
        return std::visit(
            overloaded{
                [&](const expr::IntLit& n) { return SymVal::integer(constant(n.value)); },
                [&](const expr::BoolLit&) { return SymVal{}; },
                [&](const expr::Nil&) { return SymVal::list(constant(0), nullptr); },
                [&](const expr::Param& p) -> SymVal {
                    if (p.name == kEfficiency)
                        return SymVal::integer(param(std::string(kEfficiency)));
                    if (p.name == kConcCases)
                        return SymVal::integer(param(std::string(kConcCases)));
                    return {};
                },
                [&](const expr::Var& v) { return read(st, ctx, v.name); },
                [&](const expr::ListLit& l) {
                    std::shared_ptr<SymVal> elem;
                    for (const auto& i : l.items)
                        elem = merge_elem(elem, std::make_shared<SymVal>(eval(*i, st, ctx)));
                    return SymVal::list(constant(static_cast<std::int64_t>(l.items.size())), elem);
                },
                [&](const expr::SetLit& l) {
                    for (const auto& i : l.items)
                        eval(*i, st, ctx);
                    return SymVal{};
                },
                [&](const expr::Unary& u) -> SymVal {
                    SymVal v = eval(*u.operand, st, ctx);
                    if (u.op == UnaryOp::Neg && v.k == K::Num)
                        return SymVal::num({neg(v.r.num), v.r.den});
                    return {};
                },
                [&](const expr::Binary& b) -> SymVal {
                    SymVal l = eval(*b.lhs, st, ctx);
                    SymVal r = eval(*b.rhs, st, ctx);
                    if (l.k != K::Num || r.k != K::Num)
                        return {};
                    const SymRat& x = l.r;
                    const SymRat& y = r.r;
                    switch (b.op) {
                    case BinaryOp::Add:
                        if (equal(x.den, y.den))
                            return SymVal::num({add(x.num, y.num), x.den});
                        return SymVal::num({add(mul(x.num, y.den), mul(y.num, x.den)), mul(x.den, y.den)});
                    case BinaryOp::Sub:
                        if (equal(x.den, y.den))
                            return SymVal::num({add(x.num, neg(y.num)), x.den});
                        return SymVal::num({add(mul(x.num, y.den), neg(mul(y.num, x.den))), mul(x.den, y.den)});
                    case BinaryOp::Mul: return SymVal::num({mul(x.num, y.num), mul(x.den, y.den)});
                    case BinaryOp::Div:
                        if (is_const(y.num, 0))
                            return {};
                        return SymVal::num({mul(x.num, y.den), mul(x.den, y.num)});
                    default: return {};
                    }
                },
                [&](const expr::Call& c) { return call(c, st, ctx); },
            },
            e.node);
    }

    SymVal call(const expr::Call& c, TState& st, Ctx& ctx)
    {
        using K = SymVal::K;
        std::vector<SymVal> a;
        for (const auto& arg : c.args)
            a.push_back(eval(*arg, st, ctx));
        switch (c.fn) {
        case Builtin::Truncate:
            if (a[0].k != K::Num)
                return {};
            return SymVal::integer(trunc_div(a[0].r.num, a[0].r.den));
        case Builtin::Fst:
        case Builtin::Snd:
            if (a[0].k != K::Pair)
                return {};
            return a[0].items[c.fn == Builtin::Fst ? 0 : 1];
        case Builtin::Pair: {
            SymVal v;
            v.k = K::Pair;
            v.items = {a[0], a[1]};
            return v;
        }
        case Builtin::AppendRight:
            if (a[0].k != K::List)
                return {};
            return SymVal::list(a[0].length ? add(a[0].length, constant(1)) : nullptr,
                                merge_elem(a[0].elem, std::make_shared<SymVal>(a[1])));
        case Builtin::Head:
            if (a[0].k != K::List || !a[0].elem)
                return {};
            return *a[0].elem;
        case Builtin::Tail:
            if (a[0].k != K::List)
                return {};
            return SymVal::list(a[0].length ? add(a[0].length, constant(-1)) : nullptr, a[0].elem);
        default: return {};
        }
    }

    void assign(TState& st, const std::string& name, SymVal v)
    {
        if (SymVal* slot = lookup(st, name))
            *slot = std::move(v);
    }

    void bind(TState& st, const Target& t, SymVal v)
    {
        if (t.decl_type)
            st.scopes.back()[t.name] = std::move(v);
        else
            assign(st, t.name, std::move(v));
    }

    BoundPtr future_end(TState& st, const Ctx& ctx, const std::string& name, int line)
    {
        SymVal v = read(st, ctx, name);
        if (v.k != SymVal::K::Fut)
            fail(AnalysisErrorKind::Unsupported, line, "cannot tell which call future '" + name + "' belongs to");
        return v.end;
    }

    void exec_block(const Block& b, TState& st, Ctx& ctx)
    {
        st.scopes.emplace_back();
        for (const auto& s : b.stmts)
            exec(s, st, ctx);
        st.scopes.pop_back();
    }

    void exec(const Stmt& s, TState& st, Ctx& ctx)
    {
        const int line = s.span.line;
        std::visit(overloaded{
                       [&](const stmt::VarDecl& d) {
                           st.scopes.back()[d.name] = d.init ? eval(*d.init, st, ctx) : default_value(d.type);
                       },
                       [&](const stmt::Assign& a) { assign(st, a.name, eval(*a.value, st, ctx)); },
                       [&](const stmt::AsyncCall& c) { spawn(c, line, st, ctx); },
                       [&](const stmt::Await& a) { st.t = max(st.t, future_end(st, ctx, a.future, line)); },
                       [&](const stmt::Get& g) {
                           st.t = max(st.t, future_end(st, ctx, g.future, line));
                           bind(st, g.target, {});
                       },
                       [&](const stmt::If& f) {
                           eval(*f.cond, st, ctx);
                           TState then_st = st, else_st = st;
                           then_st.seq = else_st.seq = constant(0);
                           exec_block(f.then_block, then_st, ctx);
                           if (f.else_block)
                               exec_block(*f.else_block, else_st, ctx);
                           BoundPtr before = st.seq;
                           st = then_st;
                           for (std::size_t i = 0; i < st.scopes.size(); ++i)
                               for (auto& [name, v] : st.scopes[i])
                                   v = merge(v, else_st.scopes[i].at(name));
                           st.seq = add(before, max(then_st.seq, else_st.seq));
                           st.t = max(then_st.t, else_st.t);
                       },
                       [&](const stmt::While& w) { loop(w, line, st, ctx); },
                       [&](const stmt::Cost& c) {
                           SymVal d = eval(*c.duration, st, ctx);
                           if (d.k != SymVal::K::Num)
                               fail(AnalysisErrorKind::Unsupported, line,
                                    "cost duration depends on a value the analysis cannot track");
                           BoundPtr amount = trunc_div(d.r.num, d.r.den);
                           st.seq = add(st.seq, amount);
                           st.t = add(st.t, amount);
                       },
                       [&](const stmt::Hold& h) {
                           eval(*h.requests, st, ctx);
                           bind(st, h.target, {});
                       },
                       [&](const stmt::Release& r) { eval(*r.value, st, ctx); },
                       [&](const stmt::Return& r) {
                           eval(*r.value, st, ctx);
                           ctx.returns.push_back(st.t);
                       },
                       [&](const stmt::New& n) {
                           SymVal v;
                           v.k = SymVal::K::Obj;
                           auto it = std::find_if(p_.classes.begin(), p_.classes.end(),
                                                  [&](const ClassDecl& c) { return c.name == n.class_name; });
                           v.classes.insert(static_cast<int>(it - p_.classes.begin()));
                           bind(st, n.target, v);
                       },
                   },
                   s.node);
    }

    void spawn(const stmt::AsyncCall& c, int line, TState& st, Ctx& ctx)
    {
        std::vector<SymVal> args;
        for (const auto& a : c.args)
            args.push_back(eval(*a, st, ctx));
        eval(*c.deadline, st, ctx);
        if (args[0].k != SymVal::K::Obj || args[0].classes.empty())
            fail(AnalysisErrorKind::Unsupported, line, "cannot determine the callee object of !" + c.method);

        BoundPtr seq, crit;
        for (int ci : args[0].classes) {
            const ClassDecl& cls = p_.classes[static_cast<std::size_t>(ci)];
            const MethodDecl* m = cls.find(c.method);
            if (!m)
                fail(AnalysisErrorKind::Unsupported, line, "class " + cls.name + " has no method " + c.method);
            std::vector<BoundPtr> actual;
            for (std::size_t i = 0; i < m->params.size(); ++i) {
                if (!numeric(m->params[i].type))
                    continue;
                const SymVal& v = args[i + 1];
                bool whole = v.k == SymVal::K::Num && is_const(v.r.den, 1);
                actual.push_back(whole ? v.r.num : param(kUnknownArg));
            }
            const std::string& label = labels_[static_cast<std::size_t>(ci)].at(m->name);
            ctx.callees.insert(label);
            BoundPtr s = ref("C_" + label, actual);
            BoundPtr p = ref("P_" + label, actual);
            seq = seq ? max(seq, s) : s;
            crit = crit ? max(crit, p) : p;
        }
        BoundPtr start = st.t;
        for (const auto& f : c.after)
            start = max(start, future_end(st, ctx, f, line));
        st.seq = add(st.seq, seq);
        bind(st, c.target, SymVal::fut(add(start, crit)));
    }

    BoundPtr iterations(const stmt::While& w, int line, TState& st, Ctx& ctx, const std::multiset<std::string>& assigned,
                        std::string& drained_list)
    {
        auto unbounded = [&](const std::string& why) -> BoundPtr {
            fail(AnalysisErrorKind::UnboundedLoop, line, "cannot bound loop iterations: " + why);
        };
        const Expr& cond = *w.cond;

        // while (!isEmpty(l)) { ... l = tail(l); }
        if (const auto* u = std::get_if<expr::Unary>(&cond.node); u && u->op == UnaryOp::Not) {
            const auto* call = std::get_if<expr::Call>(&u->operand->node);
            const expr::Var* l = call && call->fn == Builtin::IsEmpty ? as_var(*call->args[0]) : nullptr;
            if (!l)
                unbounded("unsupported condition shape");
            if (assigned.count(l->name) != 1 || !top_level_tail(w.body, l->name))
                unbounded("'" + l->name + "' must shrink by exactly one tail() per iteration");
            SymVal v = read(st, ctx, l->name);
            if (v.k != SymVal::K::List || !v.length)
                unbounded("the length of '" + l->name + "' is unknown");
            drained_list = l->name;
            return v.length;
        }

        // while (v <= b) / (v < b), v increased by a positive constant
        const auto* b = std::get_if<expr::Binary>(&cond.node);
        if (!b)
            unbounded("unsupported condition shape");
        const Expr* counter = nullptr;
        const Expr* limit = nullptr;
        bool strict = false;
        if ((b->op == BinaryOp::Le || b->op == BinaryOp::Lt) && as_var(*b->lhs)) {
            counter = b->lhs.get();
            limit = b->rhs.get();
            strict = b->op == BinaryOp::Lt;
        } else if ((b->op == BinaryOp::Ge || b->op == BinaryOp::Gt) && as_var(*b->rhs)) {
            counter = b->rhs.get();
            limit = b->lhs.get();
            strict = b->op == BinaryOp::Gt;
        } else {
            unbounded("unsupported condition shape");
        }
        const std::string& v = as_var(*counter)->name;
        std::set<std::string> limit_vars;
        expr_vars(*limit, limit_vars);
        for (const auto& name : limit_vars)
            if (assigned.count(name))
                unbounded("the limit depends on '" + name + "', which the loop modifies");
        std::int64_t step = assigned.count(v) == 1 ? top_level_increment(w.body, v) : 0;
        if (step <= 0)
            unbounded("'" + v + "' must grow by a positive constant exactly once per iteration");
        SymVal init = read(st, ctx, v);
        SymVal bound = eval(*limit, st, ctx);
        if (init.k != SymVal::K::Num || !is_const(init.r.den, 1) || bound.k != SymVal::K::Num ||
            !is_const(bound.r.den, 1))
            unbounded("initial value or limit is not a known integer");
        BoundPtr span = add(add(bound.r.num, neg(init.r.num)), constant(strict ? step - 1 : step));
        return max(constant(0), trunc_div(span, constant(step)));
    }

    static bool top_level_tail(const Block& body, const std::string& l)
    {
        for (const auto& s : body.stmts)
            if (const auto* a = std::get_if<stmt::Assign>(&s.node); a && a->name == l)
                if (const auto* c = std::get_if<expr::Call>(&a->value->node); c && c->fn == Builtin::Tail)
                    if (const auto* arg = as_var(*c->args[0]); arg && arg->name == l)
                        return true;
        return false;
    }

    static std::int64_t top_level_increment(const Block& body, const std::string& v)
    {
        for (const auto& s : body.stmts) {
            const auto* a = std::get_if<stmt::Assign>(&s.node);
            if (!a || a->name != v)
                continue;
            const auto* b = std::get_if<expr::Binary>(&a->value->node);
            if (!b || b->op != BinaryOp::Add)
                return 0;
            const Expr* other = nullptr;
            if (const auto* x = as_var(*b->lhs); x && x->name == v)
                other = b->rhs.get();
            else if (const auto* y = as_var(*b->rhs); y && y->name == v)
                other = b->lhs.get();
            if (const auto* lit = other ? std::get_if<expr::IntLit>(&other->node) : nullptr)
                return lit->value;
            return 0;
        }
        return 0;
    }

    void loop(const stmt::While& w, int line, TState& st, Ctx& ctx)
    {
        std::multiset<std::string> assigned;
        walk_assigned(w.body, assigned);
        std::string drained;
        BoundPtr n = iterations(w, line, st, ctx, assigned, drained);

        TState entry = st;
        TState havoc = st;
        for (const auto& name : assigned)
            if (SymVal* v = lookup(havoc, name); v && v->k != SymVal::K::List)
                *v = {};

        TState first = havoc;
        first.seq = constant(0);
        exec_block(w.body, first, ctx);
        BoundPtr body_seq = first.seq;

        TState after;
        BoundPtr t_after;
        bool settled = false;
        if (!has_cost(w.body)) {
            TState second = first;
            exec_block(w.body, second, ctx);
            if (equal(simplify(second.t), simplify(first.t))) {
                after = first;
                t_after = first.t;
                settled = true;
            }
        }
        if (!settled) {
            std::vector<BoundPtr> ends;
            for (const auto& scope : havoc.scopes)
                for (const auto& [_, v] : scope)
                    collect_ends(v, ends);
            BoundPtr start = st.t;
            for (const auto& e : ends)
                start = max(start, e);
            t_after = add(start, mul(n, body_seq));
            after = havoc;
            after.t = t_after;
            exec_block(w.body, after, ctx);
        }

        for (std::size_t i = 0; i < after.scopes.size(); ++i) {
            for (auto& [name, v] : after.scopes[i]) {
                if (!assigned.count(name))
                    continue;
                const SymVal& in = entry.scopes[i].at(name);
                if (v.k == SymVal::K::List && in.k == SymVal::K::List && v.length && in.length) {
                    BoundPtr delta = simplify(add(v.length, neg(in.length)));
                    if (name == drained) {
                        v.length = constant(0);
                    } else if (delta->kind == BoundExpr::Kind::Const) {
                        BoundPtr grown = add(in.length, mul(n, delta));
                        v.length = delta->value >= 0 ? grown : max(constant(0), grown);
                    } else {
                        v.length = nullptr;
                    }
                    v.elem = merge_elem(in.elem, v.elem);
                } else if (v.k != SymVal::K::Fut && v.k != SymVal::K::Obj) {
                    v = {};
                }
            }
        }
        after.seq = add(st.seq, mul(n, body_seq));
        after.t = t_after;
        st = std::move(after);
    }
};

} // namespace

CostEquationSystem build_equations(const Program& program) { return Builder(program).run(); }

} // namespace rpl::timing
