#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpl::lang {

enum class Tool { Simulate, Peak, Time };

const char* to_string(Tool tool);
std::optional<Tool> tool_from_string(std::string_view name);

/// Tool configuration chosen in the settings panel.
struct Profile {
    Tool tool = Tool::Simulate;
    int efficiency_pct = 100;
    int availability_pct = 100;
    int conc_cases = 1;
    int num_sims = 1;
    std::uint64_t seed = 0;

    bool operator==(const Profile&) const = default;
};

struct FieldError {
    std::string field;
    std::string message;
};

/// Empty when every field is within its range.
std::vector<FieldError> validate(const Profile& profile);

} // namespace rpl::lang
