#pragma once

#include "rpl/lang/ast.hpp"

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace rpl::sim {

/// Where a variable name resolves inside one method body.
struct VarRef {
    enum class Where { Local, Field, Category } where = Where::Local;
    int index = -1;       // slot for Local / Field
    std::string category; // for Category
};

enum class Op { Decl, Assign, Async, Await, Get, Cost, Hold, Release, Return, New, JumpIfFalse, Jump };

struct Instr {
    Op op;
    const lang::Stmt* stmt = nullptr;  // null only for the synthetic jumps
    const lang::Expr* expr = nullptr;  // value, condition, duration or requests
    VarRef target;                     // bound variable, if any
    std::vector<VarRef> futures;       // awaited / read / `after` futures
    std::size_t jump = 0;
    int line = 0;
};

struct MethodCode {
    std::string owner;  // class name, or "main"
    std::string name;
    int num_locals = 0;
    std::vector<int> param_slots;
    std::vector<Instr> code;
    std::unordered_map<const lang::Expr*, VarRef> vars;
};

struct ClassCode {
    const lang::ClassDecl* decl = nullptr;
    std::vector<const lang::Expr*> field_inits;  // null where the field has no initialiser
    MethodCode init;                             // resolves names used by field initialisers
    std::map<std::string, MethodCode, std::less<>> methods;
};

/// Flat, slot-resolved form of a validated program. References the AST, so the
/// Program must outlive it.
struct CompiledProgram {
    const lang::Program* program = nullptr;
    std::vector<ClassCode> classes;
    std::map<std::string, int, std::less<>> class_index;
    MethodCode main;
};

/// Throws SimulationError(Program) if the program still contains placeholders.
std::shared_ptr<const CompiledProgram> compile(const lang::Program& program);

} // namespace rpl::sim
