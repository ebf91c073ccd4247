#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rpl::timing {

struct BoundExpr;
using BoundPtr = std::shared_ptr<const BoundExpr>;

inline constexpr std::string_view kEfficiency = "EFFICIENCY";
inline constexpr std::string_view kConcCases = "CONC_CASES";

/// Integer-valued symbolic expression. Param names EFFICIENCY and CONC_CASES
/// are the profile parameters; any other Param is a method's formal
/// parameter. Ref stands for another method's equation applied to arguments.
struct BoundExpr {
    enum class Kind { Const, Param, Add, Mul, Max, TruncDiv, Ref };
    Kind kind = Kind::Const;
    std::int64_t value = 0;
    std::string name;
    std::vector<BoundPtr> args;  // operands; Ref arguments
};

BoundPtr constant(std::int64_t v);
BoundPtr param(std::string name);
BoundPtr ref(std::string name, std::vector<BoundPtr> args = {});
/// The constructors below fold constants and drop neutral elements only;
/// use simplify() for the full rewrite.
BoundPtr add(BoundPtr a, BoundPtr b);
BoundPtr mul(BoundPtr a, BoundPtr b);
BoundPtr max(BoundPtr a, BoundPtr b);
BoundPtr trunc_div(BoundPtr a, BoundPtr b);

bool is_const(const BoundPtr& e, std::int64_t v);
bool equal(const BoundPtr& a, const BoundPtr& b);
/// True when the value is provably non-negative for EFFICIENCY, CONC_CASES >= 1.
bool non_negative(const BoundPtr& e);

/// Constant folding, flattening, deduplication and max-subsumption
/// (max(x, x + y) = x + y for y >= 0).
BoundPtr simplify(const BoundPtr& e);

/// Replaces Param nodes named in `bindings`.
BoundPtr substitute(const BoundPtr& e, const std::map<std::string, BoundPtr>& bindings);

using Env = std::map<std::string, std::int64_t, std::less<>>;
/// Throws rpl::Error on an unbound name, a Ref, or division by zero.
std::int64_t evaluate(const BoundExpr& e, const Env& env);

/// const | EFFICIENCY | CONC_CASES | (e+e) | (e*e) | max(e,e) | trunc(e/e).
/// Refs print as C_name / P_name with optional argument lists.
std::string to_string(const BoundExpr& e);
inline std::string to_string(const BoundPtr& e) { return to_string(*e); }
/// Inverse of to_string for Ref-free expressions. Throws rpl::Error.
BoundPtr parse_bound(std::string_view text);

} // namespace rpl::timing
