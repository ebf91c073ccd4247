#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/lang/profile.hpp"
#include "rpl/sim/machine.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace rpl::peak {

struct ExploreOptions {
    /// Maximum number of distinct choice states visited.
    std::uint64_t budget = 500'000;
    /// Visit choice alternatives last-to-first.
    bool reverse_order = false;
    sim::DeadlineAnchor anchor = sim::DeadlineAnchor::Enable;
    std::optional<std::chrono::steady_clock::time_point> wall_deadline;
};

struct ExactPeak {
    std::map<std::string, int> per_category;
    std::uint64_t explored_schedules = 0;  // terminal executions reached
    std::uint64_t states = 0;              // distinct choice states expanded
    bool truncated = false;                // budget hit; per_category is then a lower bound
};

/// Depth-first search over every scheduling decision and random outcome of a
/// preprocessed program, memoised on clock-free machine states.
ExactPeak exact_peak(const lang::Program& program, const lang::Profile& profile, const ExploreOptions& options = {});

} // namespace rpl::peak
