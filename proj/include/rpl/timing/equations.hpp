#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/timing/bound_expr.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rpl::timing {

/// Cost equations of one method. `sequential` (C) is the total work of the
/// method and everything it spawns; `critical` (P) is its completion time
/// relative to its start when nothing waits for an actor or a resource.
/// Both may reference other equations as C_label / P_label applied to the
/// method's numeric arguments.
struct Equation {
    std::string label;  // method name, qualified as Class.method when ambiguous; "main"
    std::vector<std::string> params;  // numeric formal parameters, in order
    BoundPtr sequential;
    BoundPtr critical;
};

struct CostEquationSystem {
    /// Callees before callers; main last.
    std::vector<Equation> equations;
    const Equation* find(std::string_view label) const;
};

/// Accepts raw source (placeholders kept symbolic) or preprocessed source.
/// Throws AnalysisError on recursion, loops without a derivable iteration
/// count, and costs that depend on values it cannot track.
CostEquationSystem build_equations(const lang::Program& program);

} // namespace rpl::timing
