#include "rpl/peak/peak.hpp"

namespace rpl::peak {

std::map<std::string, int> observed_peak(const lang::Program& program, const lang::Profile& profile,
                                         const sim::SimOptions& options)
{
    std::map<std::string, int> out;
    for (const auto& category : program.pool().categories())
        out[category] = 0;
    for (const auto& [category, n] : sim::simulate_many(program, profile, options).peaks)
        out[category] = std::max(out[category], n);
    return out;
}

PeakReport analyze_peaks(const lang::Program& program, const lang::Profile& profile, const PeakOptions& options)
{
    PeakReport report;
    for (const auto& [category, n] : observed_peak(program, profile, options.sim))
        report.per_category[category].observed = n;
    if (options.run_exact) {
        ExactPeak exact = exact_peak(program, profile, options.explore);
        for (const auto& [category, n] : exact.per_category)
            report.per_category[category].exact = n;
        report.explored_schedules = exact.explored_schedules;
        report.truncated = exact.truncated;
    }
    for (const auto& [category, n] : static_peak_bound(program, profile))
        report.per_category[category].static_bound = n;
    return report;
}

nlohmann::ordered_json to_json(const PeakReport& report)
{
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [category, p] : report.per_category) {
        per[category] = {
            {"observed", p.observed},
            {"exact", p.exact ? nlohmann::ordered_json(*p.exact) : nlohmann::ordered_json(nullptr)},
            {"static", p.static_bound},
        };
    }
    return {
        {"perCategory", per},
        {"exploredSchedules", report.explored_schedules},
        {"truncated", report.truncated},
    };
}

} // namespace rpl::peak
