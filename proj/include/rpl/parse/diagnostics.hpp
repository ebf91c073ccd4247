#pragma once

#include "rpl/lang/ast.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rpl::parse {

enum class Severity { Error, Warning };

struct Diagnostic {
    lang::SourceSpan span;
    Severity severity = Severity::Error;
    std::string message;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// `{line, column, severity, message}`.
nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const std::vector<Diagnostic>& diags);

/// "12:5: error: message"
std::string format(const Diagnostic& d);

} // namespace rpl::parse
