#include "rpl/sim/result_json.hpp"

#include <cstdlib>

namespace rpl::sim {

using nlohmann::ordered_json;

namespace {

ordered_json stats(const Stats& s)
{
    return {
        {"min", s.min},
        {"max", s.max},
        {"avg", std::strtod(format_fixed(s.avg).c_str(), nullptr)},
        {"avgExact", lang::to_string(s.avg)},
    };
}

ordered_json sites(const std::map<CallSite, int>& per_site)
{
    ordered_json out = ordered_json::array();
    for (const auto& [site, n] : per_site)
        out.push_back({{"method", site.method}, {"line", site.line}, {"count", n}});
    return out;
}

} // namespace

ordered_json to_json(const AggregateResult& r)
{
    ordered_json peaks = ordered_json::object();
    for (const auto& [cat, n] : r.peaks)
        peaks[cat] = n;
    ordered_json runs = ordered_json::array();
    for (const auto& run : r.runs)
        runs.push_back(to_json(run));
    return {
        {"execId", r.exec_id},
        {"file", r.file},
        {"sims", r.profile.num_sims},
        {"efficiency", r.profile.efficiency_pct},
        {"availability", r.profile.availability_pct},
        {"cases", r.profile.conc_cases},
        {"seed", r.profile.seed},
        {"time", stats(r.time)},
        {"cost", stats(r.cost)},
        {"violations", {{"total", r.total_violations}, {"perSite", sites(r.per_site)}}},
        {"peaks", peaks},
        {"runs", runs},
    };
}

ordered_json to_json(const SimRunResult& run)
{
    ordered_json peaks = ordered_json::object();
    for (const auto& [cat, n] : run.peak_by_category)
        peaks[cat] = n;
    return {
        {"seed", run.seed},
        {"execTime", run.exec_time},
        {"financialCost", run.financial_cost},
        {"violations", sites(run.violations)},
        {"peaks", peaks},
        {"leftoverHolds", run.leftover_holds},
    };
}

} // namespace rpl::sim
