#include "rpl/bench/presets.hpp"

namespace rpl::bench {

namespace {

lang::Profile make(lang::Tool tool, int efficiency, int availability, int cases, int sims)
{
    lang::Profile p;
    p.tool = tool;
    p.efficiency_pct = efficiency;
    p.availability_pct = availability;
    p.conc_cases = cases;
    p.num_sims = sims;
    return p;
}

} // namespace

const std::vector<ProfilePreset>& presets()
{
    using lang::Tool;
    static const std::vector<ProfilePreset> all = {
        {"simulate-baseline", "full staff, one case", make(Tool::Simulate, 100, 100, 1, 10)},
        {"simulate-busy-week", "eight concurrent cases", make(Tool::Simulate, 100, 100, 8, 20)},
        {"simulate-short-staffed", "slower and fewer resources", make(Tool::Simulate, 70, 80, 4, 20)},
        {"peak-small", "exhaustive search over two cases", make(Tool::Peak, 100, 100, 2, 10)},
        {"peak-single", "one case", make(Tool::Peak, 100, 100, 1, 10)},
        {"time-baseline", "bound at full efficiency", make(Tool::Time, 100, 100, 1, 20)},
        {"time-degraded", "bound at 70% efficiency", make(Tool::Time, 70, 100, 4, 20)},
    };
    return all;
}

const ProfilePreset* find_preset(std::string_view name)
{
    for (const auto& p : presets())
        if (p.name == name)
            return &p;
    return nullptr;
}

nlohmann::ordered_json to_json(const lang::Profile& p)
{
    return {{"tool", lang::to_string(p.tool)},
            {"efficiency", p.efficiency_pct},
            {"availability", p.availability_pct},
            {"cases", p.conc_cases},
            {"sims", p.num_sims},
            {"seed", p.seed}};
}

nlohmann::ordered_json to_json(const ProfilePreset& preset)
{
    return {{"name", preset.name}, {"description", preset.description}, {"profile", to_json(preset.profile)}};
}

} // namespace rpl::bench
