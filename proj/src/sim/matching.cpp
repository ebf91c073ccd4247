#include "rpl/sim/matching.hpp"

#include <algorithm>

namespace rpl::sim {

namespace {

struct Matcher {
    const std::vector<std::vector<std::size_t>>& candidates;
    std::vector<long> owner;  // resource index -> unit, -1 if unassigned
    std::vector<char> seen;

    bool augment(std::size_t unit)
    {
        for (std::size_t r : candidates[unit]) {
            if (seen[r])
                continue;
            seen[r] = 1;
            if (owner[r] < 0 || augment(static_cast<std::size_t>(owner[r]))) {
                owner[r] = static_cast<long>(unit);
                return true;
            }
        }
        return false;
    }
};

} // namespace

std::optional<std::vector<std::size_t>> match_request(const std::vector<lang::ResourceRequest>& request,
                                                      const lang::ResourcePool& pool,
                                                      const std::function<bool(std::size_t)>& usable)
{
    const auto& res = pool.resources;
    std::vector<std::size_t> ranked(res.size());
    for (std::size_t i = 0; i < ranked.size(); ++i)
        ranked[i] = i;
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        if (res[a].cost_per_unit != res[b].cost_per_unit)
            return res[a].cost_per_unit < res[b].cost_per_unit;
        return res[a].id < res[b].id;
    });

    std::vector<std::vector<std::size_t>> candidates(request.size());
    for (std::size_t u = 0; u < request.size(); ++u)
        for (std::size_t r : ranked)
            if (res[r].category == request[u].category && res[r].efficiency >= request[u].min_efficiency && usable(r))
                candidates[u].push_back(r);

    Matcher m{candidates, std::vector<long>(res.size(), -1), {}};
    for (std::size_t u = 0; u < request.size(); ++u) {
        // Greedy pass keeps the cheapest free candidate when no conflict exists.
        auto free = std::find_if(candidates[u].begin(), candidates[u].end(), [&](std::size_t r) { return m.owner[r] < 0; });
        if (free != candidates[u].end()) {
            m.owner[*free] = static_cast<long>(u);
            continue;
        }
        m.seen.assign(res.size(), 0);
        if (!m.augment(u))
            return std::nullopt;
    }

    std::vector<std::size_t> out(request.size());
    for (std::size_t r = 0; r < res.size(); ++r)
        if (m.owner[r] >= 0)
            out[static_cast<std::size_t>(m.owner[r])] = r;
    return out;
}

} // namespace rpl::sim
