#pragma once

#include "rpl/lang/resources.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rpl::sim {

/// Assigns a distinct resource (index into `pool.resources`) to every
/// requested unit. A unit matches a resource of the same category whose
/// efficiency is at least the requested minimum and for which `usable`
/// holds. Candidates are preferred by lowest cost per unit, then lowest id.
std::optional<std::vector<std::size_t>> match_request(const std::vector<lang::ResourceRequest>& request,
                                                      const lang::ResourcePool& pool,
                                                      const std::function<bool(std::size_t)>& usable);

} // namespace rpl::sim
