#include "support.hpp"

#include "rpl/lang/error.hpp"
#include "rpl/lang/preprocess.hpp"
#include "rpl/lang/profile.hpp"
#include "rpl/lang/rational.hpp"
#include "rpl/lang/resources.hpp"
#include "rpl/lang/value.hpp"

#include <doctest.h>

#include <random>

using namespace rpl;
using namespace rpl::lang;

TEST_CASE("preprocess substitutes efficiency inside an expression")
{
    Profile p;
    p.efficiency_pct = 100;
    CHECK(preprocess("cost(truncate(150*(100/$EFFICIENCY)));", p) == "cost(truncate(150*(100/100)));");
}

TEST_CASE("preprocess leaves placeholder-free text alone")
{
    std::string src = "module M;\n{ Int x = 3; }\n";
    CHECK(preprocess(src, Profile{}) == src);
}

TEST_CASE("preprocess substitutes concurrent cases")
{
    Profile p;
    p.conc_cases = 8;
    CHECK(preprocess("Int max = $CONC_CASES;", p) == "Int max = 8;");
}

TEST_CASE("preprocess substitutes availability")
{
    Profile p;
    p.availability_pct = 35;
    CHECK(preprocess("Int a = $AVAILABILITY;", p) == "Int a = 35;");
}

TEST_CASE("preprocess rejects unknown placeholders with their line")
{
    try {
        preprocess("module M;\n{ Int x = $SPEED; }", Profile{});
        FAIL("expected UnknownPlaceholder");
    } catch (const UnknownPlaceholder& e) {
        CHECK(e.name() == "SPEED");
        CHECK(e.line() == 2);
    }
}

TEST_CASE("preprocess keeps resource group separators")
{
    std::string src = "Resources:\nVan,1,2,3\n$\nDriver,1,2,3\n";
    CHECK(preprocess(src, Profile{}) == src);
}

TEST_CASE("preprocess is idempotent on its own output")
{
    std::mt19937 rng(11);
    std::string src = test::model_source("supply_chain.rpl");
    for (int i = 0; i < 25; ++i) {
        Profile p;
        p.efficiency_pct = std::uniform_int_distribution<int>(1, 300)(rng);
        p.availability_pct = std::uniform_int_distribution<int>(0, 100)(rng);
        p.conc_cases = std::uniform_int_distribution<int>(1, 50)(rng);
        std::string once = preprocess(src, p);
        CHECK(preprocess(once, p) == once);
        CHECK(once.find("$EFFICIENCY") == std::string::npos);
        CHECK(once.find("$CONC_CASES") == std::string::npos);
    }
}

namespace {

ResourcePool pool_of(const std::vector<std::pair<std::string, int>>& groups)
{
    ResourcePool pool;
    int id = 1;
    for (const auto& [cat, n] : groups)
        for (int i = 0; i < n; ++i)
            pool.resources.push_back({id++, cat, 10, 5, 1, true});
    return pool;
}

} // namespace

TEST_CASE("availability at 50% keeps the lowest half of eight vans")
{
    ResourcePool pool = test::load_model("supply_chain.rpl").pool();
    ResourcePool half = apply_availability(pool, 50);
    int seen = 0;
    for (const auto& r : half.resources) {
        if (r.category != "Van")
            continue;
        CHECK(r.available == (seen < 4));
        ++seen;
    }
    CHECK(seen == 8);
    CHECK(half.available_count("Van") == 4);
    CHECK(half.available_count("Helper") == 2);
}

TEST_CASE("availability at 100% changes nothing")
{
    ResourcePool pool = pool_of({{"Van", 3}, {"Driver", 5}});
    CHECK(apply_availability(pool, 100).resources == pool.resources);
}

TEST_CASE("availability at 0% removes every helper")
{
    ResourcePool none = apply_availability(pool_of({{"Helper", 4}}), 0);
    CHECK(none.available_count("Helper") == 0);
    CHECK(none.count("Helper") == 4);
}

TEST_CASE("available count follows the floor formula for every percentage")
{
    ResourcePool pool = pool_of({{"Van", 8}, {"Driver", 7}, {"Helper", 3}, {"Crane", 1}});
    for (int pct = 0; pct <= 100; ++pct) {
        ResourcePool out = apply_availability(pool, pct);
        for (const auto& cat : pool.categories()) {
            int n = pool.count(cat);
            CHECK(out.available_count(cat) == n * pct / 100);
        }
        // the available ones form a prefix by id within each category
        std::map<std::string, bool> gap;
        for (const auto& r : out.resources) {
            if (!r.available)
                gap[r.category] = true;
            else
                CHECK_FALSE(gap[r.category]);
        }
    }
}

TEST_CASE("profile ranges")
{
    CHECK(validate(Profile{}).empty());
    Profile p;
    p.efficiency_pct = 0;
    p.availability_pct = 101;
    p.conc_cases = 0;
    p.num_sims = 0;
    auto errors = validate(p);
    REQUIRE(errors.size() == 4);
    CHECK(errors[0].field == "efficiency");
    CHECK(errors[1].field == "availability");
    CHECK(errors[2].field == "cases");
    CHECK(errors[3].field == "sims");
    p = Profile{};
    p.availability_pct = 0;
    CHECK(validate(p).empty());
}

TEST_CASE("tool names round-trip")
{
    for (Tool t : {Tool::Simulate, Tool::Peak, Tool::Time})
        CHECK(tool_from_string(to_string(t)) == t);
    CHECK_FALSE(tool_from_string("gantt"));
}

TEST_CASE("rational arithmetic truncates toward zero")
{
    CHECK(truncate(Rational(150) * (Rational(100) / Rational(70))) == 214);
    CHECK(truncate(Rational(50) * (Rational(100) / Rational(70))) == 71);
    CHECK(truncate(Rational(200) * (Rational(100) / Rational(70))) == 285);
    CHECK(truncate(Rational(-7, 2)) == -3);
    CHECK(is_integer(Rational(4, 2)));
    CHECK(to_string(Rational(3, 2)) == "3/2");
    CHECK(to_string(Rational(6, 3)) == "2");
}

TEST_CASE("composite values compare by content")
{
    Value a = make_list({Value(1), Value(2)});
    Value b = make_list({Value(1), Value(2)});
    CHECK(a == b);
    CHECK_FALSE(a == make_list({Value(2), Value(1)}));
    Value p = make_pair(a, Value(Rational(5, 2)));
    CHECK(pair_items(p)[1] == Value(Rational(5, 2)));
    CHECK(list_items(pair_items(p)[0]).size() == 2);
    CHECK(std::string(kind_name(Value(true))) == "Bool");
}
