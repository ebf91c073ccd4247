#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/lang/profile.hpp"
#include "rpl/lang/rational.hpp"
#include "rpl/sim/machine.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpl::sim {

struct SimOptions {
    DeadlineAnchor anchor = DeadlineAnchor::Enable;
    ReadyPolicy ready_policy = ReadyPolicy::Random;
    /// When set, every random(n) yields min(value, n) instead of a seeded draw.
    std::optional<std::int64_t> forced_random;
    /// Wall-clock limit; exceeding it raises SimulationError(Timeout).
    std::optional<std::chrono::steady_clock::time_point> wall_deadline;
};

struct SimRunResult {
    Time exec_time = 0;
    std::int64_t financial_cost = 0;
    std::map<CallSite, int> violations;
    std::map<std::string, int> peak_by_category;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> random_draws;
    Time total_work = 0;
    std::vector<int> leftover_holds;
};

struct Stats {
    std::int64_t min = 0;
    std::int64_t max = 0;
    lang::Rational avg = 0;
};

struct AggregateResult {
    std::string exec_id;
    std::string file;
    lang::Profile profile;
    Stats time;
    Stats cost;
    int total_violations = 0;
    std::map<CallSite, int> per_site;
    std::map<std::string, int> peaks;
    std::vector<SimRunResult> runs;
};

/// One run of a preprocessed program. The resource pool is the program's pool
/// reduced by the profile's availability.
SimRunResult simulate_once(const lang::Program& program, const lang::Profile& profile, std::uint64_t seed,
                           const SimOptions& options = {});

/// profile.num_sims runs with seeds profile.seed + i. `source` and `salt`
/// feed the execution id only.
AggregateResult simulate_many(const lang::Program& program, const lang::Profile& profile,
                              const SimOptions& options = {}, std::string_view source = {},
                              std::string_view file = {}, std::uint64_t salt = 0);

/// (line, count) for every call site with violations, ascending by line.
std::vector<std::pair<int, int>> violation_markers(const AggregateResult& result);

/// Eight lowercase hex digits.
std::string make_exec_id(std::string_view source, const lang::Profile& profile, std::uint64_t salt);

/// Decimal rendering rounded half away from zero, e.g. "300.50".
std::string format_fixed(const lang::Rational& r, int decimals = 2);

} // namespace rpl::sim
