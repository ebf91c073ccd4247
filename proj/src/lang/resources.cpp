#include "rpl/lang/resources.hpp"

#include <algorithm>
#include <map>

namespace rpl::lang {

std::vector<std::string> ResourcePool::categories() const
{
    std::vector<std::string> out;
    for (const auto& r : resources)
        if (std::find(out.begin(), out.end(), r.category) == out.end())
            out.push_back(r.category);
    return out;
}

int ResourcePool::count(std::string_view category) const
{
    return static_cast<int>(std::count_if(resources.begin(), resources.end(),
                                          [&](const auto& r) { return r.category == category; }));
}

int ResourcePool::available_count(std::string_view category) const
{
    return static_cast<int>(std::count_if(resources.begin(), resources.end(), [&](const auto& r) {
        return r.category == category && r.available;
    }));
}

ResourcePool apply_availability(ResourcePool pool, int availability_pct)
{
    std::map<std::string, int> quota;
    for (const auto& category : pool.categories())
        quota[category] = pool.count(category) * availability_pct / 100;

    std::vector<ResourceDescriptor*> by_id;
    for (auto& r : pool.resources)
        by_id.push_back(&r);
    std::sort(by_id.begin(), by_id.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (auto* r : by_id) {
        int& left = quota[r->category];
        r->available = left > 0;
        if (left > 0)
            --left;
    }
    return pool;
}

} // namespace rpl::lang
