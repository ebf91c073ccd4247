#include "rpl/parse/parser.hpp"

#include <map>
#include <set>

namespace rpl::parse {

using namespace rpl::lang;

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

const std::map<std::string, std::size_t, std::less<>> kBuiltinTypes{
    {"Int", 0}, {"Bool", 0}, {"Rat", 0}, {"Unit", 0}, {"Fut", 1}, {"List", 1}, {"Set", 1}, {"Pair", 2},
};

class Validator {
public:
    Validator(const Program& p, std::vector<Diagnostic>& diags) : p_(p), diags_(diags)
    {
        for (const auto& g : p.resources)
            for (const auto& d : g.descriptors)
                categories_.insert(d.category);
    }

    void run()
    {
        check_resources();
        check_declarations();
        for (const auto& c : p_.classes)
            check_class(c);
        scopes_.clear();
        in_main_ = true;
        check_block(p_.main);
    }

private:
    const Program& p_;
    std::vector<Diagnostic>& diags_;
    std::set<std::string, std::less<>> categories_;
    std::vector<std::map<std::string, Type, std::less<>>> scopes_;
    bool in_main_ = false;

    void error(const SourceSpan& at, std::string msg) { diags_.push_back({at, Severity::Error, std::move(msg)}); }
    void warning(const SourceSpan& at, std::string msg) { diags_.push_back({at, Severity::Warning, std::move(msg)}); }

    // -- declarations --------------------------------------------------------

    void check_resources()
    {
        std::set<std::string> seen;
        for (const auto& g : p_.resources) {
            if (!seen.insert(g.category()).second)
                error({}, "resource category '" + g.category() + "' is split across several groups");
        }
    }

    void check_type(const Type& t, const SourceSpan& at)
    {
        auto builtin = kBuiltinTypes.find(t.name);
        if (builtin != kBuiltinTypes.end()) {
            if (builtin->second != t.args.size())
                error(at, "type '" + t.name + "' expects " + std::to_string(builtin->second) + " type argument(s)");
        } else if (!p_.find_interface(t.name)) {
            error(at, "unknown type '" + t.name + "'");
        } else if (!t.args.empty()) {
            error(at, "interface type '" + t.name + "' takes no type arguments");
        }
        for (const auto& a : t.args)
            check_type(a, at);
    }

    void check_declarations()
    {
        std::set<std::string> names;
        for (const auto& i : p_.interfaces) {
            if (!names.insert(i.name).second)
                error(i.span, "duplicate interface '" + i.name + "'");
            std::set<std::string> methods;
            for (const auto& m : i.methods) {
                if (!methods.insert(m.name).second)
                    error(m.span, "duplicate method '" + m.name + "' in interface '" + i.name + "'");
                check_type(m.return_type, m.span);
                check_params(m.params, m.span);
            }
        }
        names.clear();
        for (const auto& c : p_.classes)
            if (!names.insert(c.name).second)
                error(c.span, "duplicate class '" + c.name + "'");
    }

    void check_params(const std::vector<lang::Param>& params, const SourceSpan& at)
    {
        std::set<std::string> seen;
        for (const auto& prm : params) {
            check_type(prm.type, at);
            if (!seen.insert(prm.name).second)
                error(at, "duplicate parameter '" + prm.name + "'");
        }
    }

    static bool same_signature(const MethodSig& sig, const MethodDecl& m)
    {
        if (sig.params.size() != m.params.size() || !(sig.return_type == m.return_type))
            return false;
        for (std::size_t i = 0; i < sig.params.size(); ++i)
            if (!(sig.params[i].type == m.params[i].type))
                return false;
        return true;
    }

    void check_class(const ClassDecl& c)
    {
        const InterfaceDecl* iface = p_.find_interface(c.implements);
        if (!iface) {
            error(c.span, "class '" + c.name + "' implements unknown interface '" + c.implements + "'");
        } else {
            for (const auto& sig : iface->methods) {
                const MethodDecl* m = c.find(sig.name);
                if (!m)
                    error(c.span, "class '" + c.name + "' does not implement '" + iface->name + "." + sig.name + "'");
                else if (!same_signature(sig, *m))
                    error(m->span, "method '" + c.name + "." + m->name + "' does not match its interface signature");
            }
        }

        scopes_.clear();
        in_main_ = false;
        push();
        for (const auto& f : c.fields) {
            check_type(f.type, f.span);
            if (f.init)
                check_expr(*f.init);
            declare(f.name, f.type, f.span);
        }
        std::set<std::string> methods;
        for (const auto& m : c.methods) {
            if (!methods.insert(m.name).second)
                error(m.span, "duplicate method '" + m.name + "' in class '" + c.name + "'");
            if (iface && !iface->find(m.name))
                warning(m.span, "method '" + m.name + "' is not declared by interface '" + iface->name +
                                    "' and cannot be invoked");
            check_type(m.return_type, m.span);
            check_params(m.params, m.span);
            push();
            for (const auto& prm : m.params)
                scopes_.back()[prm.name] = prm.type;
            check_block(m.body);
            pop();
            if (!always_returns(m.body))
                error(m.span, "method '" + c.name + "." + m.name + "' may finish without returning a value");
        }
        pop();
    }

    static bool always_returns(const Block& b)
    {
        for (const auto& s : b.stmts) {
            if (std::holds_alternative<stmt::Return>(s.node))
                return true;
            if (auto* i = std::get_if<stmt::If>(&s.node))
                if (i->else_block && always_returns(i->then_block) && always_returns(*i->else_block))
                    return true;
        }
        return false;
    }

    // -- scopes --------------------------------------------------------------

    void push() { scopes_.emplace_back(); }
    void pop() { scopes_.pop_back(); }

    void declare(const std::string& name, const Type& type, const SourceSpan& at)
    {
        auto& scope = scopes_.back();
        if (scope.count(name))
            error(at, "'" + name + "' is already declared in this scope");
        scope[name] = type;
    }

    const Type* lookup(std::string_view name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end())
                return &found->second;
        }
        return nullptr;
    }

    const Type* require_var(const std::string& name, const SourceSpan& at)
    {
        const Type* t = lookup(name);
        if (!t)
            error(at, "undeclared variable '" + name + "'");
        return t;
    }

    void require_future(const std::string& name, const SourceSpan& at)
    {
        const Type* t = lookup(name);
        if (!t)
            error(at, "undeclared future '" + name + "'");
        else if (t->name != "Fut")
            error(at, "'" + name + "' is not a future (declared " + to_string(*t) + ")");
    }

    // Declares or resolves the bound variable of a binding statement.
    void bind_target(const Target& t, const SourceSpan& at, const char* expected_type = nullptr)
    {
        if (t.decl_type) {
            check_type(*t.decl_type, at);
            if (expected_type && t.decl_type->name != expected_type)
                error(at, "'" + t.name + "' must be declared as " + expected_type);
            declare(t.name, *t.decl_type, at);
            return;
        }
        const Type* existing = require_var(t.name, at);
        if (existing && expected_type && existing->name != expected_type)
            error(at, "'" + t.name + "' must have type " + expected_type);
    }

    // -- statements ----------------------------------------------------------

    void check_block(const Block& b)
    {
        push();
        bool returned = false;
        for (const auto& s : b.stmts) {
            if (returned) {
                warning(s.span, "unreachable statement after return");
                returned = false;
            }
            check_stmt(s);
            returned = std::holds_alternative<stmt::Return>(s.node);
        }
        pop();
    }

    void check_stmt(const Stmt& s)
    {
        std::visit(overloaded{
                       [&](const stmt::VarDecl& d) {
                           check_type(d.type, s.span);
                           if (d.init)
                               check_expr(*d.init);
                           declare(d.name, d.type, s.span);
                       },
                       [&](const stmt::Assign& a) {
                           check_expr(*a.value);
                           require_var(a.name, s.span);
                       },
                       [&](const stmt::AsyncCall& c) { check_async(c, s.span); },
                       [&](const stmt::Await& a) { require_future(a.future, s.span); },
                       [&](const stmt::Get& g) {
                           require_future(g.future, s.span);
                           bind_target(g.target, s.span);
                       },
                       [&](const stmt::If& i) {
                           check_expr(*i.cond);
                           check_block(i.then_block);
                           if (i.else_block)
                               check_block(*i.else_block);
                       },
                       [&](const stmt::While& w) {
                           check_expr(*w.cond);
                           check_block(w.body);
                       },
                       [&](const stmt::Cost& c) { check_expr(*c.duration); },
                       [&](const stmt::Hold& h) {
                           check_expr(*h.requests);
                           bind_target(h.target, s.span, "Pair");
                       },
                       [&](const stmt::Release& r) { check_expr(*r.value); },
                       [&](const stmt::Return& r) {
                           if (in_main_)
                               error(s.span, "'return' is not allowed in the main block");
                           check_expr(*r.value);
                       },
                       [&](const stmt::New& n) { check_new(n, s.span); },
                   },
                   s.node);
    }

    void check_async(const stmt::AsyncCall& c, const SourceSpan& at)
    {
        for (const auto& a : c.args)
            check_expr(*a);
        check_expr(*c.deadline);
        for (const auto& f : c.after)
            require_future(f, at);

        if (c.args.empty()) {
            error(at, "call to '" + c.method + "' needs the callee object as first argument");
        } else if (auto* v = std::get_if<expr::Var>(&c.args.front()->node)) {
            const Type* callee = lookup(v->name);
            if (!callee) {
                error(c.args.front()->span, "undeclared callee '" + v->name + "'");
            } else if (const InterfaceDecl* iface = p_.find_interface(callee->name)) {
                const MethodSig* sig = iface->find(c.method);
                if (!sig)
                    error(at, "interface '" + iface->name + "' declares no method '" + c.method + "'");
                else if (sig->params.size() != c.args.size() - 1)
                    error(at, "'" + iface->name + "." + c.method + "' expects " + std::to_string(sig->params.size()) +
                                  " argument(s) after the callee, got " + std::to_string(c.args.size() - 1));
            } else {
                error(c.args.front()->span, "callee '" + v->name + "' has non-object type " + to_string(*callee));
            }
        } else {
            error(c.args.front()->span, "the callee of '" + c.method + "' must be an object variable");
        }
        bind_target(c.target, at, "Fut");
    }

    void check_new(const stmt::New& n, const SourceSpan& at)
    {
        const ClassDecl* cls = p_.find_class(n.class_name);
        if (!cls)
            error(at, "unknown class '" + n.class_name + "'");
        bind_target(n.target, at);
        const Type* t = n.target.decl_type ? &*n.target.decl_type : lookup(n.target.name);
        if (cls && t && t->name != cls->implements)
            error(at, "class '" + cls->name + "' does not implement '" + to_string(*t) + "'");
    }

    // -- expressions ---------------------------------------------------------

    void check_expr(const Expr& e)
    {
        std::visit(overloaded{
                       [&](const expr::Var& v) {
                           if (!lookup(v.name) && !categories_.count(v.name))
                               error(e.span, "undeclared identifier '" + v.name + "'");
                       },
                       [&](const expr::Unary& u) { check_expr(*u.operand); },
                       [&](const expr::Binary& b) {
                           check_expr(*b.lhs);
                           check_expr(*b.rhs);
                       },
                       [&](const expr::Call& c) {
                           if (c.args.size() != builtin_arity(c.fn))
                               error(e.span, std::string("'") + to_string(c.fn) + "' expects " +
                                                 std::to_string(builtin_arity(c.fn)) + " argument(s)");
                           for (const auto& a : c.args)
                               check_expr(*a);
                       },
                       [&](const expr::ListLit& l) {
                           for (const auto& a : l.items)
                               check_expr(*a);
                       },
                       [&](const expr::SetLit& l) {
                           for (const auto& a : l.items)
                               check_expr(*a);
                       },
                       [](const auto&) {},
                   },
                   e.node);
    }
};

} // namespace

std::vector<Diagnostic> validate(const Program& program)
{
    std::vector<Diagnostic> diags;
    Validator(program, diags).run();
    return diags;
}

} // namespace rpl::parse
