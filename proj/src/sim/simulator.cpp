#include "rpl/sim/simulator.hpp"
#include "rpl/lang/resources.hpp"
#include "rpl/sim/error.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace rpl::sim {

using namespace rpl::lang;

namespace {

// Debiased modulo; std::uniform_int_distribution differs between libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n)
{
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        std::uint64_t r = rng();
        if (r >= threshold)
            return r % n;
    }
}

} // namespace

SimRunResult simulate_once(const Program& program, const Profile& profile, std::uint64_t seed,
                           const SimOptions& options)
{
    MachineOptions mo;
    mo.anchor = options.anchor;
    mo.ready_policy = options.ready_policy;
    Machine m(compile(program), apply_availability(program.pool(), profile.availability_pct), mo);
    std::mt19937_64 rng(seed);

    std::uint64_t choices = 0;
    while (true) {
        RunStatus status = m.run();
        if (status == RunStatus::Finished)
            break;
        if (status == RunStatus::Deadlocked)
            throw SimulationError(SimErrorKind::Deadlock, "deadlock: " + m.deadlock_reason());
        const Choice& c = m.choice();
        std::size_t pick;
        if (c.kind == ChoiceKind::Random && options.forced_random)
            pick = static_cast<std::size_t>(
                std::clamp<std::int64_t>(*options.forced_random, 0, static_cast<std::int64_t>(c.arity) - 1));
        else
            pick = static_cast<std::size_t>(uniform_below(rng, c.arity));
        m.choose(pick);
        if (options.wall_deadline && (++choices & 0xff) == 0 &&
            std::chrono::steady_clock::now() > *options.wall_deadline)
            throw SimulationError(SimErrorKind::Timeout, "simulation exceeded its wall-clock limit");
    }

    SimRunResult r;
    r.exec_time = m.now();
    r.financial_cost = m.financial_cost();
    r.violations = m.violations();
    for (std::size_t i = 0; i < m.categories().size(); ++i)
        r.peak_by_category[m.categories()[i]] = m.peak()[i];
    r.seed = seed;
    r.random_draws = m.random_draws();
    r.total_work = m.total_work();
    r.leftover_holds = m.held_resources();
    return r;
}

AggregateResult simulate_many(const Program& program, const Profile& profile, const SimOptions& options,
                              std::string_view source, std::string_view file, std::uint64_t salt)
{
    if (profile.num_sims < 1)
        throw Error("number of simulations must be at least 1");
    AggregateResult out;
    out.exec_id = make_exec_id(source, profile, salt);
    out.file = std::string(file);
    out.profile = profile;

    Rational time_sum = 0, cost_sum = 0;
    for (int i = 0; i < profile.num_sims; ++i) {
        SimRunResult run;
        try {
            run = simulate_once(program, profile, profile.seed + static_cast<std::uint64_t>(i), options);
        } catch (const SimulationError& e) {
            throw e.with_run(i);
        }
        if (i == 0) {
            out.time.min = out.time.max = run.exec_time;
            out.cost.min = out.cost.max = run.financial_cost;
        }
        out.time.min = std::min(out.time.min, run.exec_time);
        out.time.max = std::max(out.time.max, run.exec_time);
        out.cost.min = std::min(out.cost.min, run.financial_cost);
        out.cost.max = std::max(out.cost.max, run.financial_cost);
        time_sum += run.exec_time;
        cost_sum += run.financial_cost;
        for (const auto& [site, n] : run.violations) {
            out.per_site[site] += n;
            out.total_violations += n;
        }
        for (const auto& [cat, n] : run.peak_by_category)
            out.peaks[cat] = std::max(out.peaks[cat], n);
        out.runs.push_back(std::move(run));
    }
    out.time.avg = time_sum / profile.num_sims;
    out.cost.avg = cost_sum / profile.num_sims;
    return out;
}

std::vector<std::pair<int, int>> violation_markers(const AggregateResult& result)
{
    std::map<int, int> by_line;
    for (const auto& [site, n] : result.per_site)
        if (n > 0)
            by_line[site.line] += n;
    return {by_line.begin(), by_line.end()};
}

std::string make_exec_id(std::string_view source, const Profile& profile, std::uint64_t salt)
{
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    feed(source);
    feed(to_string(profile.tool));
    for (long long v : {static_cast<long long>(profile.efficiency_pct), static_cast<long long>(profile.availability_pct),
                        static_cast<long long>(profile.conc_cases), static_cast<long long>(profile.num_sims)})
        feed(std::to_string(v));
    feed(std::to_string(profile.seed));
    feed(std::to_string(salt));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>((h ^ (h >> 32)) & 0xffffffffu));
    return buf;
}

std::string format_fixed(const Rational& r, int decimals)
{
    std::int64_t scale = 1;
    for (int i = 0; i < decimals; ++i)
        scale *= 10;
    Rational scaled = r * scale;
    bool negative = scaled.numerator() < 0;
    if (negative)
        scaled = -scaled;
    std::int64_t n = (scaled.numerator() * 2 + scaled.denominator()) / (2 * scaled.denominator());
    std::string digits = std::to_string(n);
    if (static_cast<int>(digits.size()) <= decimals)
        digits.insert(0, static_cast<std::size_t>(decimals + 1) - digits.size(), '0');
    std::string out = negative && n != 0 ? "-" : "";
    out += digits.substr(0, digits.size() - static_cast<std::size_t>(decimals));
    if (decimals > 0)
        out += "." + digits.substr(digits.size() - static_cast<std::size_t>(decimals));
    return out;
}

} // namespace rpl::sim
