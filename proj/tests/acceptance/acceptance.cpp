// Runs every end-to-end acceptance check and prints one PASS/FAIL line each.
#include "support.hpp"

#include "rpl/bench/runner.hpp"
#include "rpl/bench/service.hpp"
#include "rpl/bench/store.hpp"
#include "rpl/parse/printer.hpp"
#include "rpl/peak/explorer.hpp"
#include "rpl/peak/peak.hpp"
#include "rpl/peak/task_dag.hpp"
#include "rpl/sim/result_json.hpp"
#include "rpl/sim/simulator.hpp"
#include "rpl/timing/time_bound.hpp"

#include <httplib.h>

#include <unistd.h>

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

using namespace rpl;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Failure {
    std::string why;
};

void require(bool ok, const std::string& why)
{
    if (!ok)
        throw Failure{why};
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string peaks_text(const std::map<std::string, int>& m)
{
    std::ostringstream os;
    os << "{";
    for (auto it = m.begin(); it != m.end(); ++it)
        os << (it == m.begin() ? "" : ", ") << it->first << ":" << it->second;
    os << "}";
    return os.str();
}

std::string parse_fidelity()
{
    auto t0 = Clock::now();
    auto r = parse::parse(test::model_source("supply_chain.rpl"));
    require(r.ok() && r.diagnostics.empty(), "supply chain model produced diagnostics");
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(test::models_dir())) {
        if (entry.path().extension() != ".rpl")
            continue;
        std::string text = test::read_text(entry.path());
        for (const std::string& src : {text, lang::preprocess(text, lang::Profile{})}) {
            lang::Program p = test::parse_text(src);
            lang::Program again = test::parse_text(parse::pretty_print(p));
            require(parse::dump(p) == parse::dump(again),
                    "round trip changed " + entry.path().filename().string());
        }
        ++files;
    }
    double s = seconds_since(t0);
    require(s < 1.0, "took " + std::to_string(s) + " s");
    return std::to_string(files) + " models round-tripped in " + std::to_string(s) + " s";
}

std::string trace_oracle()
{
    lang::Profile profile = test::profile_of(100, 100, 1);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    int found = 0, missing = 0;
    const std::map<sim::CallSite, int> expected{{{"check_goods", 12}, 1}};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        sim::SimRunResult r = sim::simulate_once(p, profile, seed);
        require(r.random_draws.size() == 1, "expected one random draw per run");
        std::string at = " (seed " + std::to_string(seed) + ")";
        if (r.random_draws[0] == 1) {
            require(r.exec_time == 200, "found run took " + std::to_string(r.exec_time) + at);
            ++found;
        } else {
            require(r.exec_time == 400, "order run took " + std::to_string(r.exec_time) + at);
            require(r.financial_cost == 2212500, "order run cost " + std::to_string(r.financial_cost) + at);
            ++missing;
        }
        require(r.violations == expected, "violations differ from one at check_goods line 12" + at);
    }
    require(found > 0 && missing > 0, "only one branch was exercised");
    return std::to_string(found) + " runs at 200, " + std::to_string(missing) + " runs at 400 / 2212500";
}

std::string aggregation()
{
    lang::Profile profile = test::profile_of(100, 100, 1, 10, 7);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    sim::AggregateResult a = sim::simulate_many(p, profile);
    require(a.total_violations == 10, "total violations " + std::to_string(a.total_violations));
    auto in = [](std::int64_t v) { return v == 200 || v == 400; };
    require(in(a.time.min) && in(a.time.max), "time range outside {200, 400}");
    require(lang::Rational(a.time.min) <= a.time.avg && a.time.avg <= lang::Rational(a.time.max),
            "time average out of range");
    require(lang::Rational(a.cost.min) <= a.cost.avg && a.cost.avg <= lang::Rational(a.cost.max),
            "cost average out of range");
    return "time " + std::to_string(a.time.min) + ".." + std::to_string(a.time.max) + " avg " +
           sim::format_fixed(a.time.avg);
}

std::string determinism()
{
    lang::Profile profile = test::profile_of(85, 75, 4, 25, 3);
    std::string src = test::model_source("supply_chain.rpl");
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    std::string a = sim::to_json(sim::simulate_many(p, profile, {}, src, "supply_chain.rpl")).dump();
    std::string b = sim::to_json(sim::simulate_many(test::load_model("supply_chain.rpl", profile), profile, {}, src,
                                                    "supply_chain.rpl"))
                        .dump();
    require(a == b, "JSON differs between identical executions");
    return std::to_string(a.size()) + " identical bytes";
}

std::string peak_sandwich()
{
    std::ostringstream notes;
    struct Case {
        std::string model;
        int cases;
    };
    for (const Case& c : {Case{"supply_chain.rpl", 1}, Case{"supply_chain.rpl", 2}, Case{"supply_chain.rpl", 4},
                          Case{"parallel_holds.rpl", 1}, Case{"chained_holds.rpl", 1}}) {
        lang::Profile profile = test::profile_of(100, 100, c.cases, 10);
        lang::Program p = test::load_model(c.model, profile);
        auto t0 = Clock::now();
        auto observed = peak::observed_peak(p, profile);
        auto exact = peak::exact_peak(p, profile);
        double s = seconds_since(t0);
        auto bound = peak::static_peak_bound(p, profile);
        std::string tag = c.model + " cases " + std::to_string(c.cases);
        require(!exact.truncated, tag + ": exhaustive search truncated");
        if (c.cases <= 2)
            require(s < 30.0, tag + ": exhaustive search took " + std::to_string(s) + " s");
        for (const auto& [cat, n] : exact.per_category) {
            require(observed.at(cat) <= n, tag + ": observed above exact for " + cat);
            require(n <= bound.at(cat), tag + ": exact above static bound for " + cat);
        }
        if (c.model == "supply_chain.rpl" && c.cases == 1) {
            const std::map<std::string, int> one{{"Driver", 1}, {"Helper", 1}, {"Van", 1}};
            require(observed == one && exact.per_category == one && bound == one,
                    "single case peaks " + peaks_text(observed) + " " + peaks_text(exact.per_category) + " " +
                        peaks_text(bound));
        }
        notes << tag << " " << peaks_text(exact.per_category) << "; ";
    }
    std::string out = notes.str();
    return out.substr(0, out.size() - 2);
}

std::string time_bound()
{
    timing::TimeBoundReport report = timing::analyze_time(test::load_raw("supply_chain.rpl"));
    const std::vector<std::pair<int, int>> points{{100, 1}, {100, 8}, {70, 1}, {70, 4}};
    const std::vector<std::int64_t> expected{400, 3200, 570, 2280};
    std::ostringstream notes;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [eff, cases] = points[i];
        std::int64_t bound = timing::evaluate_at(report, eff, cases).sequential;
        require(bound == expected[i], "bound at (" + std::to_string(eff) + "," + std::to_string(cases) + ") is " +
                                          std::to_string(bound));
        lang::Profile profile = test::profile_of(eff, 100, cases, 20, 0);
        timing::BoundCheck check = timing::check_bound(test::load_model("supply_chain.rpl", profile), profile, report);
        require(check.holds, "simulated time " + std::to_string(check.worst) + " exceeds " + std::to_string(bound));
        notes << "(" << eff << "," << cases << ") worst " << check.worst << " <= " << bound << "; ";
    }
    std::string out = notes.str();
    return out.substr(0, out.size() - 2);
}

std::string monotonicity()
{
    std::ostringstream notes;
    for (std::uint64_t seed : {0ull, 1ull, 2ull, 3ull}) {
        std::int64_t previous = -1;
        notes << "seed " << seed << ":";
        for (int eff = 100; eff >= 50; eff -= 10) {
            lang::Profile profile = test::profile_of(eff, 100, 1, 1, seed);
            auto r = sim::simulate_once(test::load_model("supply_chain.rpl", profile), profile, seed);
            require(r.exec_time >= previous, "seed " + std::to_string(seed) + ": time fell at efficiency " +
                                                 std::to_string(eff));
            previous = r.exec_time;
            notes << " " << r.exec_time;
        }
        notes << "; ";
    }
    std::string out = notes.str();
    return out.substr(0, out.size() - 2);
}

std::string service_contract()
{
    auto path = std::filesystem::temp_directory_path() / ("rpl_acceptance_" + std::to_string(::getpid()) + ".jsonl");
    std::filesystem::remove(path);
    std::string source = test::model_source("supply_chain.rpl");
    json profile = {{"tool", "simulate"}, {"efficiency", 100}, {"availability", 100}, {"cases", 1}, {"sims", 10},
                    {"seed", 7}};
    json body = {{"source", source}, {"fileName", "supply_chain.rpl"}, {"profile", profile}};
    std::string posted, id, listed;
    {
        bench::RunStore store(path);
        bench::Service service(store);
        httplib::Client client("127.0.0.1", service.start());
        client.set_read_timeout(60, 0);
        auto empty = client.Get("/api/runs");
        require(empty && empty->status == 200 && empty->body == "[]", "empty store does not list []");
        auto created = client.Post("/api/runs", body.dump(), "application/json");
        require(created && created->status == 201, "POST did not return 201");
        posted = created->body;
        json result = json::parse(posted);
        require(result["violations"]["total"] == 10, "violations.total is not numSims");
        id = result["execId"];
        auto fetched = client.Get("/api/runs/" + id);
        require(fetched && fetched->status == 200 && fetched->body == posted, "GET differs from POST");
        listed = client.Get("/api/runs")->body;

        json bad = body;
        bad["source"] = "module M;\n{\n  Int x = ;\n}";
        auto r400 = client.Post("/api/runs", bad.dump(), "application/json");
        require(r400 && r400->status == 400, "malformed source did not give 400");
        bad = body;
        bad["profile"]["cases"] = 0;
        auto r422 = client.Post("/api/runs", bad.dump(), "application/json");
        require(r422 && r422->status == 422, "invalid profile did not give 422");
        auto r404 = client.Get("/api/runs/deadbeef");
        require(r404 && r404->status == 404, "unknown id did not give 404");
        require(store.size() == 1, "failed runs left records behind");
    }
    bench::RunStore reopened(path);
    bench::Service service(reopened);
    httplib::Client client("127.0.0.1", service.start());
    auto after = client.Get("/api/runs/" + id);
    require(after && after->status == 200 && after->body == posted, "result changed across restart");
    require(client.Get("/api/runs")->body == listed, "overview changed across restart");
    std::filesystem::remove(path);
    return "run " + id + " identical after restart; 400/404/422 as expected";
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<std::string()>>> checks = {
        {"parse-fidelity", parse_fidelity},   {"trace-oracle", trace_oracle},
        {"aggregation", aggregation},         {"determinism", determinism},
        {"peak-sandwich", peak_sandwich},     {"time-bound-soundness", time_bound},
        {"efficiency-monotonicity", monotonicity}, {"service-contract", service_contract},
    };
    int failed = 0;
    for (const auto& [name, run] : checks) {
        try {
            std::string detail = run();
            std::cout << "PASS " << name << ": " << detail << std::endl;
        } catch (const Failure& f) {
            ++failed;
            std::cout << "FAIL " << name << ": " << f.why << std::endl;
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL " << name << ": error: " << e.what() << std::endl;
        }
    }
    return failed == 0 ? 0 : 1;
}
