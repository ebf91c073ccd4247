#pragma once

#include "rpl/peak/explorer.hpp"
#include "rpl/peak/task_dag.hpp"
#include "rpl/sim/simulator.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace rpl::peak {

/// Highest simultaneous holds per category over profile.num_sims seeded runs.
std::map<std::string, int> observed_peak(const lang::Program& program, const lang::Profile& profile,
                                         const sim::SimOptions& options = {});

struct CategoryPeak {
    int observed = 0;
    std::optional<int> exact;  // absent when exploration was skipped
    int static_bound = 0;
};

struct PeakReport {
    std::map<std::string, CategoryPeak> per_category;
    std::uint64_t explored_schedules = 0;
    bool truncated = false;
};

struct PeakOptions {
    bool run_exact = true;
    ExploreOptions explore;
    sim::SimOptions sim;
};

PeakReport analyze_peaks(const lang::Program& program, const lang::Profile& profile, const PeakOptions& options = {});

/// {perCategory:{cat:{observed,exact,static}}, exploredSchedules, truncated}
nlohmann::ordered_json to_json(const PeakReport& report);

} // namespace rpl::peak
