#pragma once

#include "rpl/lang/profile.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace rpl::bench {

struct ProfilePreset {
    std::string name;
    std::string description;
    lang::Profile profile;  // profile.tool is the preset's tool
};

/// Pre-filled profiles, at least one per tool.
const std::vector<ProfilePreset>& presets();
const ProfilePreset* find_preset(std::string_view name);

nlohmann::ordered_json to_json(const lang::Profile& profile);
nlohmann::ordered_json to_json(const ProfilePreset& preset);

} // namespace rpl::bench
