#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/parse/diagnostics.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace rpl::parse {

struct ParseResult {
    std::optional<lang::Program> program;  // empty iff diagnostics hold an error
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return program.has_value(); }
};

/// Syntax analysis followed by semantic validation. Placeholder tokens are
/// accepted and become `expr::Param` nodes, so unpreprocessed models can be
/// read by the time analysis.
ParseResult parse(std::string_view source);

/// Syntax only; no semantic checks.
ParseResult parse_syntax(std::string_view source);

/// Semantic checks on a syntactically valid program.
std::vector<Diagnostic> validate(const lang::Program& program);

} // namespace rpl::parse
