#pragma once

#include "rpl/lang/ast.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rpl::parse {

enum class OutlineKind { Interface, Class, Method };

const char* to_string(OutlineKind k);

struct OutlineEntry {
    OutlineKind kind;
    std::string name;
    lang::SourceSpan span;
};

/// One entry per interface, class and class method, ordered by position.
std::vector<OutlineEntry> outline(const lang::Program& program);

nlohmann::json to_json(const std::vector<OutlineEntry>& entries);

} // namespace rpl::parse
