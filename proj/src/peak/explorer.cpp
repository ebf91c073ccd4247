#include "rpl/peak/explorer.hpp"
#include "rpl/lang/resources.hpp"
#include "rpl/lang/error.hpp"
#include "rpl/sim/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace rpl::peak {

using namespace rpl::sim;

namespace {

struct Key {
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ull)); }
};

Key digest(const std::string& s)
{
    std::uint64_t fnv = 14695981039346656037ull;
    for (unsigned char c : s) {
        fnv ^= c;
        fnv *= 1099511628211ull;
    }
    return {fnv, std::hash<std::string>{}(s)};
}

void merge(std::vector<int>& into, const std::vector<int>& from)
{
    for (std::size_t i = 0; i < into.size(); ++i)
        into[i] = std::max(into[i], from[i]);
}

class Explorer {
public:
    Explorer(const ExploreOptions& options) : options_(options) {}

    // Highest per-category hold count reachable from `m` onwards.
    std::vector<int> visit(Machine m)
    {
        m.reset_peak();
        RunStatus status = m.run();
        std::vector<int> result = m.peak();
        if (status != RunStatus::NeedChoice) {
            ++out.explored_schedules;
            return result;
        }
        Key key = digest(m.state_key());
        if (auto hit = memo_.find(key); hit != memo_.end()) {
            merge(result, hit->second);
            return result;
        }
        if (out.states >= options_.budget) {
            out.truncated = true;
            return result;
        }
        ++out.states;
        if (options_.wall_deadline && (out.states & 0x3ff) == 0 &&
            std::chrono::steady_clock::now() > *options_.wall_deadline)
            throw SimulationError(SimErrorKind::Timeout, "peak exploration exceeded its wall-clock limit");

        std::vector<int> below = m.held();
        const std::size_t n = m.choice().arity;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t option = options_.reverse_order ? n - 1 - k : k;
            Machine child = m;
            child.choose(option);
            merge(below, visit(std::move(child)));
        }
        memo_.emplace(key, below);
        merge(result, below);
        return result;
    }

    ExactPeak out;

private:
    const ExploreOptions& options_;
    std::unordered_map<Key, std::vector<int>, KeyHash> memo_;
};

} // namespace

ExactPeak exact_peak(const lang::Program& program, const lang::Profile& profile, const ExploreOptions& options)
{
    MachineOptions mo;
    mo.explore = true;
    mo.anchor = options.anchor;
    Machine root(compile(program), lang::apply_availability(program.pool(), profile.availability_pct), mo);
    Explorer ex(options);
    std::vector<int> peak = ex.visit(root);
    if (ex.out.explored_schedules == 0)
        throw AnalysisError(AnalysisErrorKind::BudgetExceeded,
                            "no complete execution fits in a budget of " + std::to_string(options.budget) + " states");
    for (std::size_t i = 0; i < root.categories().size(); ++i)
        ex.out.per_category[root.categories()[i]] = peak[i];
    return ex.out;
}

} // namespace rpl::peak
