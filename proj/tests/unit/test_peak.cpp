#include "support.hpp"

#include "rpl/lang/error.hpp"
#include "rpl/peak/explorer.hpp"
#include "rpl/peak/peak.hpp"
#include "rpl/peak/task_dag.hpp"

#include <doctest.h>

#include <chrono>
#include <random>

using namespace rpl;
using namespace rpl::peak;
using lang::Profile;

namespace {

using Peaks = std::map<std::string, int>;

const Peaks kOneEach{{"Driver", 1}, {"Helper", 1}, {"Van", 1}};

void check_sandwich(const std::string& model, int cases)
{
    Profile profile = test::profile_of(100, 100, cases, 10);
    lang::Program p = test::load_model(model, profile);
    PeakReport r = analyze_peaks(p, profile);
    CHECK_FALSE(r.truncated);
    for (const auto& [cat, v] : r.per_category) {
        CAPTURE(cat);
        REQUIRE(v.exact);
        CHECK(v.observed <= *v.exact);
        CHECK(*v.exact <= v.static_bound);
    }
}

} // namespace

TEST_CASE("one case holds one of each")
{
    Profile profile = test::profile_of(100, 100, 1, 10);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    CHECK(observed_peak(p, profile) == kOneEach);
    ExactPeak e = exact_peak(p, profile);
    CHECK(e.per_category == kOneEach);
    CHECK(e.explored_schedules == 2);
    CHECK_FALSE(e.truncated);
    CHECK(static_peak_bound(p, profile) == kOneEach);
}

TEST_CASE("empty main observes nothing")
{
    Profile profile = test::profile_of(100, 100, 1, 3);
    lang::Program p = test::parse_text("module M;\n{  }\nResources:\nVan,1,1,1\n");
    CHECK(observed_peak(p, profile) == Peaks{{"Van", 0}});
    CHECK(exact_peak(p, profile).per_category == Peaks{{"Van", 0}});
}

TEST_CASE("unordered holders overlap")
{
    Profile profile = test::profile_of(100, 100, 1, 10);
    lang::Program p = test::load_model("parallel_holds.rpl", profile);
    CHECK(exact_peak(p, profile).per_category == Peaks{{"Van", 2}});
    CHECK(static_peak_bound(p, profile) == Peaks{{"Van", 2}});
}

TEST_CASE("after-chained holders never overlap")
{
    Profile profile = test::profile_of(100, 100, 1, 10);
    lang::Program p = test::load_model("chained_holds.rpl", profile);
    CHECK(observed_peak(p, profile) == Peaks{{"Van", 1}});
    CHECK(exact_peak(p, profile).per_category == Peaks{{"Van", 1}});
    CHECK(static_peak_bound(p, profile) == Peaks{{"Van", 1}});
}

TEST_CASE("sandwich on the supply chain")
{
    check_sandwich("supply_chain.rpl", 1);
    check_sandwich("supply_chain.rpl", 2);
    check_sandwich("parallel_holds.rpl", 1);
    check_sandwich("chained_holds.rpl", 1);
}

TEST_CASE("two cases: exhaustive search is fast and order independent")
{
    Profile profile = test::profile_of(100, 100, 2, 10);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    auto t0 = std::chrono::steady_clock::now();
    ExactPeak forward = exact_peak(p, profile);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(30));
    ExploreOptions rev;
    rev.reverse_order = true;
    ExactPeak backward = exact_peak(p, profile, rev);
    CHECK(forward.per_category == backward.per_category);
    CHECK(forward.per_category == Peaks{{"Driver", 2}, {"Helper", 2}, {"Van", 2}});
    Peaks bound = static_peak_bound(p, profile);
    for (const auto& [cat, n] : forward.per_category)
        CHECK(n <= bound.at(cat));
}

TEST_CASE("a tiny budget truncates")
{
    Profile profile = test::profile_of(100, 100, 2, 1);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    ExploreOptions o;
    o.budget = 30;
    ExactPeak e = exact_peak(p, profile, o);
    CHECK(e.truncated);
    CHECK(e.explored_schedules >= 1);
    ExactPeak full = exact_peak(p, profile);
    for (const auto& [cat, n] : e.per_category)
        CHECK(n <= full.per_category.at(cat));
}

TEST_CASE("a budget too small for any execution fails")
{
    Profile profile = test::profile_of(100, 100, 2, 1);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    ExploreOptions o;
    o.budget = 1;
    try {
        exact_peak(p, profile, o);
        FAIL("expected BudgetExceeded");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == AnalysisErrorKind::BudgetExceeded);
    }
}

TEST_CASE("static bound is capped by the available units")
{
    for (int cases : {1, 3, 8, 20}) {
        for (int avail : {25, 50, 100}) {
            Profile profile = test::profile_of(100, avail, cases);
            lang::Program p = test::load_model("supply_chain.rpl", profile);
            lang::ResourcePool pool = lang::apply_availability(p.pool(), avail);
            for (const auto& [cat, n] : static_peak_bound(p, profile)) {
                CHECK(n <= pool.available_count(cat));
                CHECK(n <= cases * 2);
            }
        }
    }
}

TEST_CASE("observed peak stays under the static bound with forced outcomes")
{
    Profile profile = test::profile_of(100, 100, 8, 10);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    sim::SimOptions forced;
    forced.forced_random = 0;
    Peaks observed = observed_peak(p, profile, forced);
    Peaks bound = static_peak_bound(p, profile);
    for (const auto& [cat, n] : observed) {
        CHECK(n >= 1);
        CHECK(n <= bound.at(cat));
    }
}

TEST_CASE("task dag of one case")
{
    lang::Program p = test::load_model("supply_chain.rpl", test::profile_of(100, 100, 1));
    TaskDag dag = build_task_dag(p);
    REQUIRE(dag.nodes.size() == 6);
    int check = -1, order = -1, deliver_then = -1, deliver_else = -1;
    for (const auto& n : dag.nodes) {
        if (n.label == "Warehouse.check_goods")
            check = n.id;
        if (n.label == "Supplier.order_goods")
            order = n.id;
        if (n.label == "Cargo.deliver_goods")
            (deliver_then < 0 ? deliver_then : deliver_else) = n.id;
    }
    REQUIRE(check >= 0);
    REQUIRE(order >= 0);
    CHECK(dag.ordered(check, order));
    CHECK(dag.ordered(check, deliver_then));
    CHECK(dag.exclusive(deliver_then, order));
    CHECK(dag.ordered(order, deliver_else));
    CHECK_FALSE(dag.may_overlap(order, deliver_else));
    CHECK(dag.nodes[static_cast<std::size_t>(order)].hold_profile == kOneEach);
}

TEST_CASE("a loop without a bound is rejected")
{
    lang::Program p = test::parse_text(R"(module M;
interface A { Int f(); }
class A implements A { Int f() { Pair<List<Int>,Int> p = hold(list[set[ResEfficiency(1),Van]]); release(p); return 1; } }
{
  A a = new A();
  Int n = random(5);
  Int i = 0;
  while (i < n) {
    Fut<Int> x = !f(a) after dl 5;
    i = i + 1;
  }
}
Resources:
Van,1,1,1
)");
    try {
        static_peak_bound(p, Profile{});
        FAIL("expected UnboundedLoop");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == AnalysisErrorKind::UnboundedLoop);
    }
}

TEST_CASE("maximum weight clique agrees with brute force")
{
    std::mt19937 rng(5);
    for (int round = 0; round < 200; ++round) {
        int n = std::uniform_int_distribution<int>(0, 10)(rng);
        std::vector<int> w(static_cast<std::size_t>(n));
        for (auto& x : w)
            x = std::uniform_int_distribution<int>(0, 4)(rng);
        std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                adj[i][j] = adj[j][i] = std::bernoulli_distribution(0.5)(rng);
        int best = 0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            bool clique = true;
            int sum = 0;
            for (int i = 0; i < n && clique; ++i) {
                if (!(mask >> i & 1))
                    continue;
                sum += w[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < n; ++j)
                    if ((mask >> j & 1) && !adj[i][j])
                        clique = false;
            }
            if (clique)
                best = std::max(best, sum);
        }
        CHECK(max_weight_clique(w, [&](int a, int b) { return adj[a][b]; }) == best);
    }
}

TEST_CASE("peak report JSON")
{
    Profile profile = test::profile_of(100, 100, 1, 4);
    lang::Program p = test::load_model("supply_chain.rpl", profile);
    auto j = to_json(analyze_peaks(p, profile));
    CHECK(j["perCategory"]["Van"]["observed"] == 1);
    CHECK(j["perCategory"]["Van"]["exact"] == 1);
    CHECK(j["perCategory"]["Van"]["static"] == 1);
    CHECK(j["exploredSchedules"] == 2);
    CHECK(j["truncated"] == false);
    PeakOptions skip;
    skip.run_exact = false;
    CHECK(to_json(analyze_peaks(p, profile, skip))["perCategory"]["Van"]["exact"].is_null());
}
