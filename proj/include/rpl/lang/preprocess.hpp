#pragma once

#include "rpl/lang/profile.hpp"

#include <string>
#include <string_view>

namespace rpl::lang {

inline constexpr std::string_view kAvailability = "AVAILABILITY";
inline constexpr std::string_view kEfficiency = "EFFICIENCY";
inline constexpr std::string_view kConcCases = "CONC_CASES";

bool is_known_placeholder(std::string_view name);

/// Replaces `$AVAILABILITY`, `$EFFICIENCY` and `$CONC_CASES` with the decimal
/// value of the matching profile field. A bare `$` (the resource group
/// separator) is left alone. Throws UnknownPlaceholder for any other `$NAME`.
std::string preprocess(std::string_view source, const Profile& profile);

} // namespace rpl::lang
