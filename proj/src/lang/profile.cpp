#include "rpl/lang/profile.hpp"

namespace rpl::lang {

const char* to_string(Tool tool)
{
    switch (tool) {
    case Tool::Simulate: return "simulate";
    case Tool::Peak: return "peak";
    case Tool::Time: return "time";
    }
    return "?";
}

std::optional<Tool> tool_from_string(std::string_view name)
{
    if (name == "simulate")
        return Tool::Simulate;
    if (name == "peak")
        return Tool::Peak;
    if (name == "time")
        return Tool::Time;
    return std::nullopt;
}

std::vector<FieldError> validate(const Profile& p)
{
    std::vector<FieldError> errors;
    if (p.efficiency_pct < 1)
        errors.push_back({"efficiency", "must be at least 1"});
    if (p.availability_pct < 0 || p.availability_pct > 100)
        errors.push_back({"availability", "must be within [0, 100]"});
    if (p.conc_cases < 1)
        errors.push_back({"cases", "must be at least 1"});
    if (p.num_sims < 1)
        errors.push_back({"sims", "must be at least 1"});
    return errors;
}

} // namespace rpl::lang
