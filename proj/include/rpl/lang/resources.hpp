#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rpl::lang {

/// One shared resource: the boolean flag plus the quality set of the resource map.
struct ResourceDescriptor {
    int id = 0;                    // 1-based, declaration order across the whole pool
    std::string category;
    std::int64_t efficiency = 0;   // power for machines, experience for humans
    std::int64_t cost_per_unit = 0;
    std::int64_t extra_quality = 0; // stored, never interpreted
    bool available = true;

    bool operator==(const ResourceDescriptor&) const = default;
};

/// Consecutive descriptors of one category, as delimited by `$` lines.
struct ResourceGroup {
    std::vector<ResourceDescriptor> descriptors;

    const std::string& category() const { return descriptors.front().category; }
};

/// Every declared resource, flattened in id order.
struct ResourcePool {
    std::vector<ResourceDescriptor> resources;

    /// Categories in order of first declaration.
    std::vector<std::string> categories() const;
    int count(std::string_view category) const;
    int available_count(std::string_view category) const;
};

/// One requested unit of a hold: `set[ResEfficiency(n), Category]`.
struct ResourceRequest {
    std::string category;
    std::int64_t min_efficiency = 0;

    bool operator==(const ResourceRequest&) const = default;
};

/// Marks floor(n * pct / 100) descriptors per category available, lowest ids
/// first; the rest are unavailable for the whole run.
ResourcePool apply_availability(ResourcePool pool, int availability_pct);

} // namespace rpl::lang
