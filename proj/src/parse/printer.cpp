#include "rpl/parse/printer.hpp"

#include <sstream>

namespace rpl::parse {

using namespace rpl::lang;

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

int precedence(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 6;
    }
    return 0;
}

constexpr int kUnaryPrec = 7;

int precedence(const Expr& e)
{
    if (auto* b = std::get_if<expr::Binary>(&e.node))
        return precedence(b->op);
    if (std::holds_alternative<expr::Unary>(e.node))
        return kUnaryPrec;
    return 8;
}

void print_expr(std::ostream& os, const Expr& e);

void print_list(std::ostream& os, const std::vector<ExprPtr>& items)
{
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            os << ", ";
        print_expr(os, *items[i]);
    }
}

void print_operand(std::ostream& os, const Expr& e, int min_prec)
{
    if (precedence(e) < min_prec) {
        os << '(';
        print_expr(os, e);
        os << ')';
    } else {
        print_expr(os, e);
    }
}

void print_expr(std::ostream& os, const Expr& e)
{
    std::visit(overloaded{
                   [&](const expr::IntLit& i) { os << i.value; },
                   [&](const expr::BoolLit& b) { os << (b.value ? "True" : "False"); },
                   [&](const expr::Var& v) { os << v.name; },
                   [&](const expr::Param& p) { os << '$' << p.name; },
                   [&](const expr::Unary& u) {
                       os << to_string(u.op);
                       print_operand(os, *u.operand, kUnaryPrec);
                   },
                   [&](const expr::Binary& b) {
                       int prec = precedence(b.op);
                       // Left-associative: the right operand needs parentheses at equal precedence.
                       print_operand(os, *b.lhs, prec);
                       os << ' ' << to_string(b.op) << ' ';
                       print_operand(os, *b.rhs, prec + 1);
                   },
                   [&](const expr::Call& c) {
                       os << to_string(c.fn) << '(';
                       print_list(os, c.args);
                       os << ')';
                   },
                   [&](const expr::Nil&) { os << "Nil"; },
                   [&](const expr::ListLit& l) {
                       os << "list[";
                       print_list(os, l.items);
                       os << ']';
                   },
                   [&](const expr::SetLit& s) {
                       os << "set[";
                       print_list(os, s.items);
                       os << ']';
                   },
               },
               e.node);
}

class Printer {
public:
    explicit Printer(std::ostream& os) : os_(os) {}

    void program(const Program& p)
    {
        os_ << "module " << p.module_name << ";\n";
        for (const auto& i : p.interfaces) {
            os_ << "interface " << i.name << " {\n";
            for (const auto& m : i.methods) {
                os_ << "  " << to_string(m.return_type) << ' ' << m.name;
                params(m.params);
                os_ << ";\n";
            }
            os_ << "}\n";
        }
        for (const auto& c : p.classes) {
            os_ << "class " << c.name << " implements " << c.implements << " {\n";
            for (const auto& f : c.fields) {
                os_ << "  " << to_string(f.type) << ' ' << f.name;
                if (f.init) {
                    os_ << " = ";
                    print_expr(os_, *f.init);
                }
                os_ << ";\n";
            }
            for (const auto& m : c.methods) {
                os_ << "  " << to_string(m.return_type) << ' ' << m.name;
                params(m.params);
                os_ << ' ';
                block(m.body, 1);
                os_ << '\n';
            }
            os_ << "}\n";
        }
        block(p.main, 0);
        os_ << '\n';
        if (!p.resources.empty()) {
            os_ << "Resources:\n";
            for (std::size_t g = 0; g < p.resources.size(); ++g) {
                if (g)
                    os_ << "$\n";
                for (const auto& d : p.resources[g].descriptors)
                    os_ << d.category << ',' << d.efficiency << ',' << d.cost_per_unit << ',' << d.extra_quality
                        << '\n';
            }
        }
    }

private:
    std::ostream& os_;

    void indent(int depth) { os_ << std::string(2 * depth, ' '); }

    void params(const std::vector<lang::Param>& ps)
    {
        os_ << '(';
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i)
                os_ << ", ";
            os_ << to_string(ps[i].type) << ' ' << ps[i].name;
        }
        os_ << ')';
    }

    void block(const Block& b, int depth)
    {
        os_ << "{\n";
        for (const auto& s : b.stmts)
            stmt(s, depth + 1);
        indent(depth);
        os_ << '}';
    }

    void target(const Target& t)
    {
        if (t.decl_type)
            os_ << to_string(*t.decl_type) << ' ';
        os_ << t.name << " = ";
    }

    void stmt(const Stmt& s, int depth)
    {
        indent(depth);
        std::visit(overloaded{
                       [&](const stmt::VarDecl& d) {
                           os_ << to_string(d.type) << ' ' << d.name;
                           if (d.init) {
                               os_ << " = ";
                               print_expr(os_, *d.init);
                           }
                           os_ << ';';
                       },
                       [&](const stmt::Assign& a) {
                           os_ << a.name << " = ";
                           print_expr(os_, *a.value);
                           os_ << ';';
                       },
                       [&](const stmt::AsyncCall& c) {
                           target(c.target);
                           os_ << '!' << c.method << '(';
                           print_list(os_, c.args);
                           os_ << ") after";
                           for (const auto& f : c.after)
                               os_ << ' ' << f;
                           os_ << " dl ";
                           print_expr(os_, *c.deadline);
                           os_ << ';';
                       },
                       [&](const stmt::Await& a) { os_ << "await " << a.future << "?;"; },
                       [&](const stmt::Get& g) {
                           target(g.target);
                           os_ << g.future << ".get;";
                       },
                       [&](const stmt::If& i) {
                           os_ << "if (";
                           print_expr(os_, *i.cond);
                           os_ << ") ";
                           block(i.then_block, depth);
                           if (i.else_block) {
                               os_ << " else ";
                               block(*i.else_block, depth);
                           }
                       },
                       [&](const stmt::While& w) {
                           os_ << "while (";
                           print_expr(os_, *w.cond);
                           os_ << ") ";
                           block(w.body, depth);
                       },
                       [&](const stmt::Cost& c) {
                           os_ << "cost(";
                           print_expr(os_, *c.duration);
                           os_ << ");";
                       },
                       [&](const stmt::Hold& h) {
                           target(h.target);
                           os_ << "hold(";
                           print_expr(os_, *h.requests);
                           os_ << ");";
                       },
                       [&](const stmt::Release& r) {
                           os_ << "release(";
                           print_expr(os_, *r.value);
                           os_ << ");";
                       },
                       [&](const stmt::Return& r) {
                           os_ << "return ";
                           print_expr(os_, *r.value);
                           os_ << ';';
                       },
                       [&](const stmt::New& n) {
                           target(n.target);
                           os_ << "new " << n.class_name << "();";
                       },
                   },
                   s.node);
        os_ << '\n';
    }
};

// -- s-expression dump -------------------------------------------------------

void dump_expr(std::ostream& os, const Expr& e);

void dump_items(std::ostream& os, const std::vector<ExprPtr>& items)
{
    for (const auto& i : items) {
        os << ' ';
        dump_expr(os, *i);
    }
}

void dump_expr(std::ostream& os, const Expr& e)
{
    std::visit(overloaded{
                   [&](const expr::IntLit& i) { os << "(int " << i.value << ')'; },
                   [&](const expr::BoolLit& b) { os << "(bool " << b.value << ')'; },
                   [&](const expr::Var& v) { os << "(var " << v.name << ')'; },
                   [&](const expr::Param& p) { os << "(param " << p.name << ')'; },
                   [&](const expr::Unary& u) {
                       os << "(unary " << to_string(u.op) << ' ';
                       dump_expr(os, *u.operand);
                       os << ')';
                   },
                   [&](const expr::Binary& b) {
                       os << "(binary " << to_string(b.op) << ' ';
                       dump_expr(os, *b.lhs);
                       os << ' ';
                       dump_expr(os, *b.rhs);
                       os << ')';
                   },
                   [&](const expr::Call& c) {
                       os << "(call " << to_string(c.fn);
                       dump_items(os, c.args);
                       os << ')';
                   },
                   [&](const expr::Nil&) { os << "(nil)"; },
                   [&](const expr::ListLit& l) {
                       os << "(list";
                       dump_items(os, l.items);
                       os << ')';
                   },
                   [&](const expr::SetLit& s) {
                       os << "(set";
                       dump_items(os, s.items);
                       os << ')';
                   },
               },
               e.node);
}

void dump_target(std::ostream& os, const Target& t)
{
    os << "(target " << (t.decl_type ? to_string(*t.decl_type) : "-") << ' ' << t.name << ')';
}

void dump_block(std::ostream& os, const Block& b);

void dump_stmt(std::ostream& os, const Stmt& s)
{
    std::visit(overloaded{
                   [&](const stmt::VarDecl& d) {
                       os << "(decl " << to_string(d.type) << ' ' << d.name;
                       if (d.init) {
                           os << ' ';
                           dump_expr(os, *d.init);
                       }
                       os << ')';
                   },
                   [&](const stmt::Assign& a) {
                       os << "(assign " << a.name << ' ';
                       dump_expr(os, *a.value);
                       os << ')';
                   },
                   [&](const stmt::AsyncCall& c) {
                       os << "(async ";
                       dump_target(os, c.target);
                       os << ' ' << c.method;
                       dump_items(os, c.args);
                       os << " (after";
                       for (const auto& f : c.after)
                           os << ' ' << f;
                       os << ") (dl ";
                       dump_expr(os, *c.deadline);
                       os << "))";
                   },
                   [&](const stmt::Await& a) { os << "(await " << a.future << ')'; },
                   [&](const stmt::Get& g) {
                       os << "(get ";
                       dump_target(os, g.target);
                       os << ' ' << g.future << ')';
                   },
                   [&](const stmt::If& i) {
                       os << "(if ";
                       dump_expr(os, *i.cond);
                       os << ' ';
                       dump_block(os, i.then_block);
                       if (i.else_block) {
                           os << ' ';
                           dump_block(os, *i.else_block);
                       }
                       os << ')';
                   },
                   [&](const stmt::While& w) {
                       os << "(while ";
                       dump_expr(os, *w.cond);
                       os << ' ';
                       dump_block(os, w.body);
                       os << ')';
                   },
                   [&](const stmt::Cost& c) {
                       os << "(cost ";
                       dump_expr(os, *c.duration);
                       os << ')';
                   },
                   [&](const stmt::Hold& h) {
                       os << "(hold ";
                       dump_target(os, h.target);
                       os << ' ';
                       dump_expr(os, *h.requests);
                       os << ')';
                   },
                   [&](const stmt::Release& r) {
                       os << "(release ";
                       dump_expr(os, *r.value);
                       os << ')';
                   },
                   [&](const stmt::Return& r) {
                       os << "(return ";
                       dump_expr(os, *r.value);
                       os << ')';
                   },
                   [&](const stmt::New& n) {
                       os << "(new ";
                       dump_target(os, n.target);
                       os << ' ' << n.class_name << ')';
                   },
               },
               s.node);
}

void dump_block(std::ostream& os, const Block& b)
{
    os << "(block";
    for (const auto& s : b.stmts) {
        os << ' ';
        dump_stmt(os, s);
    }
    os << ')';
}

void dump_params(std::ostream& os, const std::vector<lang::Param>& ps)
{
    os << "(params";
    for (const auto& p : ps)
        os << ' ' << to_string(p.type) << ':' << p.name;
    os << ')';
}

} // namespace

std::string pretty_print(const Program& program)
{
    std::ostringstream os;
    Printer(os).program(program);
    return os.str();
}

std::string pretty_print(const Expr& e)
{
    std::ostringstream os;
    print_expr(os, e);
    return os.str();
}

std::string dump(const Program& p)
{
    std::ostringstream os;
    os << "(module " << p.module_name;
    for (const auto& i : p.interfaces) {
        os << " (interface " << i.name;
        for (const auto& m : i.methods) {
            os << " (sig " << to_string(m.return_type) << ' ' << m.name << ' ';
            dump_params(os, m.params);
            os << ')';
        }
        os << ')';
    }
    for (const auto& c : p.classes) {
        os << " (class " << c.name << ' ' << c.implements;
        for (const auto& f : c.fields) {
            os << " (field " << to_string(f.type) << ' ' << f.name;
            if (f.init) {
                os << ' ';
                dump_expr(os, *f.init);
            }
            os << ')';
        }
        for (const auto& m : c.methods) {
            os << " (method " << to_string(m.return_type) << ' ' << m.name << ' ';
            dump_params(os, m.params);
            os << ' ';
            dump_block(os, m.body);
            os << ')';
        }
        os << ')';
    }
    os << " (main ";
    dump_block(os, p.main);
    os << ") (resources";
    for (const auto& g : p.resources) {
        os << " (group";
        for (const auto& d : g.descriptors)
            os << " (" << d.id << ' ' << d.category << ' ' << d.efficiency << ' ' << d.cost_per_unit << ' '
               << d.extra_quality << ')';
        os << ')';
    }
    os << "))";
    return os.str();
}

} // namespace rpl::parse
