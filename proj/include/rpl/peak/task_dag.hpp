#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/lang/profile.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rpl::peak {

/// One static task instance: a method body under one unrolled call context.
struct DagNode {
    int id = 0;
    std::string label;  // "Class.method", or "main"
    int line = 0;       // line of the spawning call, 0 for main
    /// Most units of each category the task itself holds at once.
    std::map<std::string, int> hold_profile;
    /// Nodes guaranteed to have ended before this node starts.
    std::set<int> ends_before_start;
    /// Nodes guaranteed to have ended before this node ends.
    std::set<int> ends_before_end;
    /// Unresolved branch arms the node was spawned under: (branch instance, arm).
    std::vector<std::pair<int, int>> path;
};

struct TaskDag {
    std::vector<DagNode> nodes;

    /// Happens-before in either direction.
    bool ordered(int a, int b) const;
    /// Spawned under different arms of the same unresolved branch.
    bool exclusive(int a, int b) const;
    bool may_overlap(int a, int b) const { return a != b && !ordered(a, b) && !exclusive(a, b); }
};

/// Abstractly executes a preprocessed program, unrolling loops whose
/// conditions evaluate to constants. Throws AnalysisError for recursion or
/// loops that spawn or hold under an unknown condition.
TaskDag build_task_dag(const lang::Program& program, std::size_t loop_cap = 100'000);

/// Heaviest set of pairwise adjacent vertices, by branch and bound.
int max_weight_clique(const std::vector<int>& weights, const std::function<bool(int, int)>& adjacent);

/// Per category: the heaviest set of pairwise overlapping holders, capped at
/// the number of available units.
std::map<std::string, int> static_peak_bound(const lang::Program& program, const lang::Profile& profile);

} // namespace rpl::peak
