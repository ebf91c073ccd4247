#include "rpl/lang/preprocess.hpp"

#include "rpl/lang/error.hpp"

#include <cctype>

namespace rpl::lang {

bool is_known_placeholder(std::string_view name)
{
    return name == kAvailability || name == kEfficiency || name == kConcCases;
}

std::string preprocess(std::string_view source, const Profile& profile)
{
    auto is_name_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };

    std::string out;
    out.reserve(source.size());
    int line = 1;
    for (std::size_t i = 0; i < source.size();) {
        char c = source[i];
        if (c == '\n')
            ++line;
        if (c != '$' || i + 1 >= source.size() || !is_name_char(source[i + 1])) {
            out += c;
            ++i;
            continue;
        }
        std::size_t end = i + 1;
        while (end < source.size() && is_name_char(source[end]))
            ++end;
        std::string_view name = source.substr(i + 1, end - i - 1);
        if (name == kAvailability)
            out += std::to_string(profile.availability_pct);
        else if (name == kEfficiency)
            out += std::to_string(profile.efficiency_pct);
        else if (name == kConcCases)
            out += std::to_string(profile.conc_cases);
        else
            throw UnknownPlaceholder(std::string(name), line);
        i = end;
    }
    return out;
}

} // namespace rpl::lang
