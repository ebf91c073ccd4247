#include "rpl/timing/time_bound.hpp"
#include "rpl/lang/error.hpp"

#include <algorithm>

namespace rpl::timing {

std::vector<std::pair<std::int64_t, std::int64_t>> default_points()
{
    return {{100, 1}, {100, 8}, {70, 1}, {70, 4}};
}

namespace {

bool free_params(const BoundPtr& e, std::string& found)
{
    if (e->kind == BoundExpr::Kind::Param && e->name != kEfficiency && e->name != kConcCases) {
        found = e->name;
        return true;
    }
    for (const auto& a : e->args)
        if (free_params(a, found))
            return true;
    return false;
}

class Solver {
public:
    explicit Solver(const CostEquationSystem& sys) : sys_(sys) {}

    std::map<std::string, SolvedMethod> run()
    {
        for (const auto& eq : sys_.equations)
            solved_[eq.label] = {simplify(expand(eq.sequential)), simplify(expand(eq.critical))};
        return solved_;
    }

private:
    const CostEquationSystem& sys_;
    std::map<std::string, SolvedMethod> solved_;

    BoundPtr expand(const BoundPtr& e)
    {
        if (e->kind == BoundExpr::Kind::Ref) {
            bool seq = e->name.rfind("C_", 0) == 0;
            std::string label = e->name.substr(2);
            const Equation* eq = sys_.find(label);
            auto it = solved_.find(label);
            if (!eq || it == solved_.end())
                throw AnalysisError(AnalysisErrorKind::Unsupported, "no equation for " + e->name);
            std::map<std::string, BoundPtr> bindings;
            for (std::size_t i = 0; i < eq->params.size() && i < e->args.size(); ++i)
                bindings[eq->params[i]] = expand(e->args[i]);
            return substitute(seq ? it->second.sequential : it->second.critical, bindings);
        }
        if (e->args.empty())
            return e;
        auto copy = std::make_shared<BoundExpr>(*e);
        for (auto& a : copy->args)
            a = expand(a);
        return copy;
    }
};

} // namespace

TimeBoundReport solve(const CostEquationSystem& sys, const std::vector<std::pair<std::int64_t, std::int64_t>>& points)
{
    TimeBoundReport report;
    report.equations = sys.equations;
    report.methods = Solver(sys).run();
    const SolvedMethod& main = report.methods.at("main");
    std::string name;
    if (free_params(main.sequential, name) || free_params(main.critical, name))
        throw AnalysisError(AnalysisErrorKind::Unsupported,
                            "the bound depends on a value the analysis cannot track (" + name + ")");
    report.sequential = main.sequential;
    report.critical = main.critical;
    for (const auto& [eff, cases] : points)
        report.evaluations.push_back(evaluate_at(report, eff, cases));
    return report;
}

TimeBoundReport analyze_time(const lang::Program& program,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>& points)
{
    return solve(build_equations(program), points);
}

Evaluation evaluate_at(const TimeBoundReport& report, std::int64_t efficiency, std::int64_t cases)
{
    Env env{{std::string(kEfficiency), efficiency}, {std::string(kConcCases), cases}};
    return {efficiency, cases, evaluate(*report.sequential, env), evaluate(*report.critical, env)};
}

BoundCheck check_bound(const lang::Program& program, const lang::Profile& profile, const TimeBoundReport& report,
                       const sim::SimOptions& options)
{
    BoundCheck out;
    out.bound = evaluate_at(report, profile.efficiency_pct, profile.conc_cases).sequential;
    auto agg = sim::simulate_many(program, profile, options);
    for (const auto& run : agg.runs) {
        out.worst = std::max<std::int64_t>(out.worst, run.exec_time);
        if (run.exec_time > out.bound) {
            out.holds = false;
            out.offending_seeds.push_back(run.seed);
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const TimeBoundReport& report)
{
    nlohmann::ordered_json j;
    j["sequential"] = to_string(report.sequential);
    j["criticalPath"] = to_string(report.critical);
    j["evaluations"] = nlohmann::ordered_json::array();
    for (const auto& e : report.evaluations)
        j["evaluations"].push_back({{"EFFICIENCY", e.efficiency},
                                    {"CONC_CASES", e.cases},
                                    {"sequential", e.sequential},
                                    {"criticalPath", e.critical}});
    j["equations"] = nlohmann::ordered_json::array();
    for (const auto& eq : report.equations)
        j["equations"].push_back({{"method", eq.label},
                                  {"params", eq.params},
                                  {"sequential", to_string(eq.sequential)},
                                  {"criticalPath", to_string(eq.critical)}});
    return j;
}

} // namespace rpl::timing
