#include "rpl/lang/ast.hpp"

#include <array>

namespace rpl::lang {

std::string to_string(const Type& t)
{
    std::string out = t.name;
    if (!t.args.empty()) {
        out += "<";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i)
                out += ",";
            out += to_string(t.args[i]);
        }
        out += ">";
    }
    return out;
}

const char* to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

const char* to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    }
    return "?";
}

namespace {

struct BuiltinInfo {
    Builtin fn;
    const char* name;
    std::size_t arity;
};

constexpr std::array<BuiltinInfo, 10> kBuiltins{{
    {Builtin::Truncate, "truncate", 1},
    {Builtin::Random, "random", 1},
    {Builtin::Fst, "fst", 1},
    {Builtin::Snd, "snd", 1},
    {Builtin::Pair, "Pair", 2},
    {Builtin::AppendRight, "appendright", 2},
    {Builtin::Head, "head", 1},
    {Builtin::Tail, "tail", 1},
    {Builtin::IsEmpty, "isEmpty", 1},
    {Builtin::ResEfficiency, "ResEfficiency", 1},
}};

} // namespace

const char* to_string(Builtin fn)
{
    for (const auto& b : kBuiltins)
        if (b.fn == fn)
            return b.name;
    return "?";
}

std::optional<Builtin> builtin_from_name(std::string_view name)
{
    for (const auto& b : kBuiltins)
        if (name == b.name)
            return b.fn;
    return std::nullopt;
}

std::size_t builtin_arity(Builtin fn)
{
    for (const auto& b : kBuiltins)
        if (b.fn == fn)
            return b.arity;
    return 0;
}

const MethodSig* InterfaceDecl::find(std::string_view method) const
{
    for (const auto& m : methods)
        if (m.name == method)
            return &m;
    return nullptr;
}

const MethodDecl* ClassDecl::find(std::string_view method) const
{
    for (const auto& m : methods)
        if (m.name == method)
            return &m;
    return nullptr;
}

const InterfaceDecl* Program::find_interface(std::string_view name) const
{
    for (const auto& i : interfaces)
        if (i.name == name)
            return &i;
    return nullptr;
}

const ClassDecl* Program::find_class(std::string_view name) const
{
    for (const auto& c : classes)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::vector<const ClassDecl*> Program::implementors(std::string_view interface_name) const
{
    std::vector<const ClassDecl*> out;
    for (const auto& c : classes)
        if (c.implements == interface_name)
            out.push_back(&c);
    return out;
}

ResourcePool Program::pool() const
{
    ResourcePool pool;
    for (const auto& g : resources)
        for (const auto& d : g.descriptors)
            pool.resources.push_back(d);
    return pool;
}

} // namespace rpl::lang
