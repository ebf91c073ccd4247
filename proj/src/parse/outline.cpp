#include "rpl/parse/outline.hpp"

#include <algorithm>

namespace rpl::parse {

const char* to_string(OutlineKind k)
{
    switch (k) {
    case OutlineKind::Interface: return "interface";
    case OutlineKind::Class: return "class";
    case OutlineKind::Method: return "method";
    }
    return "?";
}

std::vector<OutlineEntry> outline(const lang::Program& program)
{
    std::vector<OutlineEntry> out;
    for (const auto& i : program.interfaces)
        out.push_back({OutlineKind::Interface, i.name, i.span});
    for (const auto& c : program.classes) {
        out.push_back({OutlineKind::Class, c.name, c.span});
        for (const auto& m : c.methods)
            out.push_back({OutlineKind::Method, m.name, m.span});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.span.line, a.span.column) < std::tie(b.span.line, b.span.column);
    });
    return out;
}

nlohmann::json to_json(const std::vector<OutlineEntry>& entries)
{
    auto arr = nlohmann::json::array();
    for (const auto& e : entries)
        arr.push_back({{"kind", to_string(e.kind)}, {"name", e.name}, {"line", e.span.line}, {"column", e.span.column}});
    return arr;
}

} // namespace rpl::parse
