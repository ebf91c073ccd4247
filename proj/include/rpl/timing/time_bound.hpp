#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/lang/profile.hpp"
#include "rpl/sim/simulator.hpp"
#include "rpl/timing/equations.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rpl::timing {

struct Evaluation {
    std::int64_t efficiency = 100;
    std::int64_t cases = 1;
    std::int64_t sequential = 0;
    std::int64_t critical = 0;
};

struct SolvedMethod {
    BoundPtr sequential;  // over the method's own parameters and the profile parameters
    BoundPtr critical;
};

struct TimeBoundReport {
    BoundPtr sequential;
    BoundPtr critical;
    std::map<std::string, SolvedMethod> methods;
    std::vector<Evaluation> evaluations;
    std::vector<Equation> equations;
};

/// (efficiency, cases) points reported when none are requested.
std::vector<std::pair<std::int64_t, std::int64_t>> default_points();

/// Eliminates references bottom-up. Throws AnalysisError when main's bound
/// still depends on a value the analysis could not track.
TimeBoundReport solve(const CostEquationSystem& sys,
                      const std::vector<std::pair<std::int64_t, std::int64_t>>& points = default_points());

/// Shorthand for solve(build_equations(program), points).
TimeBoundReport analyze_time(const lang::Program& program,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>& points = default_points());

Evaluation evaluate_at(const TimeBoundReport& report, std::int64_t efficiency, std::int64_t cases);

struct BoundCheck {
    bool holds = true;
    std::int64_t bound = 0;
    std::int64_t worst = 0;
    std::vector<std::uint64_t> offending_seeds;
};

/// Runs simulate_many on the preprocessed program and compares every run's
/// execution time with the sequential bound at the profile's parameters.
BoundCheck check_bound(const lang::Program& program, const lang::Profile& profile, const TimeBoundReport& report,
                       const sim::SimOptions& options = {});

nlohmann::ordered_json to_json(const TimeBoundReport& report);

} // namespace rpl::timing
