#pragma once

#include "rpl/lang/ast.hpp"

#include <string>

namespace rpl::parse {

/// Canonical RPL text for `program`; reparses to a structurally equal tree.
std::string pretty_print(const lang::Program& program);
std::string pretty_print(const lang::Expr& expr);

/// Span-free s-expression dump. Two programs are structurally equal iff
/// their dumps are equal.
std::string dump(const lang::Program& program);

} // namespace rpl::parse
