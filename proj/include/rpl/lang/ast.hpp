#pragma once

#include "rpl/lang/resources.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rpl::lang {

/// Position of a node in the source text. 1-based.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 0;
};

struct Type {
    std::string name;
    std::vector<Type> args;

    bool operator==(const Type&) const = default;
};

std::string to_string(const Type& t);

// ---------------------------------------------------------------------------
// Expressions

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class Builtin { Truncate, Random, Fst, Snd, Pair, AppendRight, Head, Tail, IsEmpty, ResEfficiency };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);
const char* to_string(Builtin fn);
std::optional<Builtin> builtin_from_name(std::string_view name);
std::size_t builtin_arity(Builtin fn);

struct Expr;
using ExprPtr = std::unique_ptr<const Expr>;

namespace expr {
struct IntLit { std::int64_t value; };
struct BoolLit { bool value; };
struct Var { std::string name; };
/// `$EFFICIENCY` and friends, kept symbolic when the source is parsed unpreprocessed.
struct Param { std::string name; };
struct Unary { UnaryOp op; ExprPtr operand; };
struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };
struct Call { Builtin fn; std::vector<ExprPtr> args; };
struct Nil {};
struct ListLit { std::vector<ExprPtr> items; };
struct SetLit { std::vector<ExprPtr> items; };
} // namespace expr

struct Expr {
    using Node = std::variant<expr::IntLit, expr::BoolLit, expr::Var, expr::Param, expr::Unary,
                              expr::Binary, expr::Call, expr::Nil, expr::ListLit, expr::SetLit>;
    SourceSpan span;
    Node node;
};

// ---------------------------------------------------------------------------
// Statements

struct Stmt;
struct Block {
    SourceSpan span;
    std::vector<Stmt> stmts;
};

/// Left-hand side of the binding statement forms. `decl_type` is set when the
/// statement also declares the variable (`Fut<Int> f = ...`).
struct Target {
    std::optional<Type> decl_type;
    std::string name;
};

namespace stmt {
struct VarDecl { Type type; std::string name; ExprPtr init; };
struct Assign { std::string name; ExprPtr value; };
/// `f = !m(callee, args...) after f1 f2 dl d;` args[0] is the callee object.
struct AsyncCall {
    Target target;
    std::string method;
    std::vector<ExprPtr> args;
    std::vector<std::string> after;
    ExprPtr deadline;
};
struct Await { std::string future; };
struct Get { Target target; std::string future; };
struct If { ExprPtr cond; Block then_block; std::optional<Block> else_block; };
struct While { ExprPtr cond; Block body; };
struct Cost { ExprPtr duration; };
struct Hold { Target target; ExprPtr requests; };
struct Release { ExprPtr value; };
struct Return { ExprPtr value; };
struct New { Target target; std::string class_name; };
} // namespace stmt

struct Stmt {
    using Node = std::variant<stmt::VarDecl, stmt::Assign, stmt::AsyncCall, stmt::Await, stmt::Get,
                              stmt::If, stmt::While, stmt::Cost, stmt::Hold, stmt::Release,
                              stmt::Return, stmt::New>;
    SourceSpan span;
    Node node;
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
    Type type;
    std::string name;
};

struct MethodSig {
    SourceSpan span;
    std::string name;
    Type return_type;
    std::vector<Param> params;
};

struct MethodDecl {
    SourceSpan span;
    std::string name;
    Type return_type;
    std::vector<Param> params;
    Block body;
};

struct FieldDecl {
    SourceSpan span;
    Type type;
    std::string name;
    ExprPtr init;  // may be null
};

struct InterfaceDecl {
    SourceSpan span;
    std::string name;
    std::vector<MethodSig> methods;

    const MethodSig* find(std::string_view method) const;
};

struct ClassDecl {
    SourceSpan span;
    std::string name;
    std::string implements;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;

    const MethodDecl* find(std::string_view method) const;
};

/// A parsed RPL model. Immutable once built; shared read-only by all tools.
struct Program {
    std::string module_name;
    std::vector<InterfaceDecl> interfaces;
    std::vector<ClassDecl> classes;
    Block main;
    std::vector<ResourceGroup> resources;

    const InterfaceDecl* find_interface(std::string_view name) const;
    const ClassDecl* find_class(std::string_view name) const;
    /// Classes implementing `interface_name`, in declaration order.
    std::vector<const ClassDecl*> implementors(std::string_view interface_name) const;
    ResourcePool pool() const;
};

} // namespace rpl::lang
