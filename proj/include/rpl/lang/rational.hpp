#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace rpl::lang {

using Rational = boost::rational<std::int64_t>;

/// Integer part of `r`, rounding toward zero.
inline std::int64_t truncate(const Rational& r) { return r.numerator() / r.denominator(); }

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

/// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& r);

} // namespace rpl::lang
