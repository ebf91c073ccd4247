#include "support.hpp"

#include "rpl/lang/error.hpp"
#include "rpl/timing/bound_expr.hpp"
#include "rpl/timing/equations.hpp"
#include "rpl/timing/time_bound.hpp"

#include <doctest.h>

#include <random>

using namespace rpl;
using namespace rpl::timing;
using lang::Profile;

namespace {

std::int64_t T(std::int64_t effort, std::int64_t eff) { return effort * 100 / eff; }

std::int64_t eval(const BoundPtr& e, std::int64_t eff, std::int64_t cases)
{
    return evaluate(*e, {{"EFFICIENCY", eff}, {"CONC_CASES", cases}});
}

const TimeBoundReport& supply_report()
{
    static const TimeBoundReport r = analyze_time(test::load_raw("supply_chain.rpl"));
    return r;
}

AnalysisErrorKind analysis_error(const std::string& src)
{
    try {
        build_equations(test::parse_text(src));
    } catch (const AnalysisError& e) {
        return e.kind();
    }
    FAIL("expected an analysis error");
    return AnalysisErrorKind::Unsupported;
}

BoundPtr random_expr(std::mt19937& rng, int depth)
{
    int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 6 : 2)(rng);
    switch (pick) {
    case 0: return constant(std::uniform_int_distribution<int>(0, 20)(rng));
    case 1: return param("EFFICIENCY");
    case 2: return param("CONC_CASES");
    case 3: return add(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return mul(random_expr(rng, depth - 1), random_expr(rng, 0));
    case 5: return max(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: return trunc_div(random_expr(rng, depth - 1), add(param("EFFICIENCY"), constant(1)));
    }
}

} // namespace

TEST_CASE("delivery equation keeps efficiency symbolic")
{
    CostEquationSystem sys = build_equations(test::load_raw("supply_chain.rpl"));
    const Equation* deliver = sys.find("deliver_goods");
    REQUIRE(deliver);
    CHECK(to_string(deliver->sequential) == "trunc(15000/EFFICIENCY)");
    for (int eff = 1; eff <= 300; eff += 7)
        CHECK(eval(deliver->sequential, eff, 1) == T(150, eff));
}

TEST_CASE("process_order equation has the branch shape")
{
    CostEquationSystem sys = build_equations(test::load_raw("supply_chain.rpl"));
    const Equation* po = sys.find("process_order");
    REQUIRE(po);
    BoundPtr expected = add(ref("C_check_goods"), max(ref("C_deliver_goods"), add(ref("C_order_goods"), ref("C_deliver_goods"))));
    CHECK(equal(po->sequential, expected));
    CHECK(to_string(po->sequential) == "(C_check_goods+max(C_deliver_goods,(C_order_goods+C_deliver_goods)))");
}

TEST_CASE("equations are listed callees first")
{
    CostEquationSystem sys = build_equations(test::load_raw("supply_chain.rpl"));
    REQUIRE(sys.equations.size() == 5);
    CHECK(sys.equations.back().label == "main");
    auto pos = [&](const std::string& l) {
        for (std::size_t i = 0; i < sys.equations.size(); ++i)
            if (sys.equations[i].label == l)
                return i;
        return sys.equations.size();
    };
    CHECK(pos("check_goods") < pos("process_order"));
    CHECK(pos("order_goods") < pos("process_order"));
    CHECK(pos("deliver_goods") < pos("process_order"));
}

TEST_CASE("a method without cost statements costs nothing")
{
    CostEquationSystem sys = build_equations(test::parse_text(R"(module M;
interface A { Int f(); }
class A implements A { Int f() { Int x = 1; return x; } }
{
  A a = new A();
  Fut<Int> y = !f(a) after dl 3;
  await y?;
}
)"));
    CHECK(eval(sys.find("f")->sequential, 100, 1) == 0);
    TimeBoundReport r = solve(sys);
    CHECK(to_string(r.sequential) == "0");
}

TEST_CASE("main bound is cases times the three efforts")
{
    const TimeBoundReport& r = supply_report();
    for (int eff = 1; eff <= 250; eff += 3)
        for (int cases = 1; cases <= 12; ++cases)
            CHECK(eval(r.sequential, eff, cases) == cases * (T(50, eff) + T(200, eff) + T(150, eff)));
}

TEST_CASE("bound values at the reference points")
{
    const TimeBoundReport& r = supply_report();
    REQUIRE(r.evaluations.size() == 4);
    CHECK(r.evaluations[0].sequential == 400);
    CHECK(r.evaluations[1].sequential == 3200);
    CHECK(r.evaluations[2].sequential == 570);
    CHECK(r.evaluations[3].sequential == 2280);
    CHECK(evaluate_at(r, 70, 1).sequential == 71 + 285 + 214);
    CHECK(r.evaluations[0].critical == 400);
}

TEST_CASE("sequential bound does not grow with efficiency")
{
    const TimeBoundReport& r = supply_report();
    for (int cases : {1, 2, 8}) {
        std::int64_t previous = eval(r.sequential, 1, cases);
        for (int eff = 2; eff <= 400; ++eff) {
            std::int64_t v = eval(r.sequential, eff, cases);
            CHECK(v <= previous);
            previous = v;
        }
    }
}

TEST_CASE("sequential bound is linear in cases")
{
    const TimeBoundReport& r = supply_report();
    for (int eff = 10; eff <= 200; eff += 10)
        for (int cases = 1; cases <= 30; ++cases)
            CHECK(eval(r.sequential, eff, cases) == cases * eval(r.sequential, eff, 1));
}

TEST_CASE("critical path never exceeds the sequential bound")
{
    for (const char* model : {"supply_chain.rpl", "parallel_holds.rpl", "chained_holds.rpl", "minimal.rpl"}) {
        TimeBoundReport r = analyze_time(test::load_raw(model));
        for (int eff = 5; eff <= 300; eff += 15)
            for (int cases = 1; cases <= 16; cases += 3)
                CHECK(eval(r.critical, eff, cases) <= eval(r.sequential, eff, cases));
    }
}

TEST_CASE("fixtures with method parameters")
{
    TimeBoundReport par = analyze_time(test::load_raw("parallel_holds.rpl"));
    CHECK(to_string(par.sequential) == "50");
    CHECK(to_string(par.critical) == "30");
    TimeBoundReport chain = analyze_time(test::load_raw("chained_holds.rpl"));
    CHECK(to_string(chain.critical) == "50");
}

TEST_CASE("check the bound against simulation")
{
    lang::Program raw = test::load_raw("supply_chain.rpl");
    TimeBoundReport r = analyze_time(raw);
    for (auto [eff, cases] : std::vector<std::pair<int, int>>{{100, 1}, {100, 8}, {70, 1}, {70, 4}}) {
        Profile profile = test::profile_of(eff, 100, cases, 20, 0);
        BoundCheck c = check_bound(test::load_model("supply_chain.rpl", profile), profile, r);
        CHECK(c.holds);
        CHECK(c.worst <= c.bound);
        CHECK(c.offending_seeds.empty());
    }
    Profile one = test::profile_of(100, 100, 1, 20);
    CHECK(check_bound(test::load_model("supply_chain.rpl", one), one, r).bound == 400);
    CHECK(check_bound(test::load_model("supply_chain.rpl", one), one, r).worst == 400);
}

TEST_CASE("empty main checks trivially")
{
    lang::Program p = test::parse_text("module M; {  }");
    TimeBoundReport r = analyze_time(p);
    BoundCheck c = check_bound(p, test::profile_of(100, 100, 1, 3), r);
    CHECK(c.holds);
    CHECK(c.bound == 0);
    CHECK(c.worst == 0);
}

TEST_CASE("a loop with cost in its body")
{
    TimeBoundReport r = analyze_time(test::parse_text(R"(module L;
interface A { Int f(Int k); }
class A implements A {
  Int f(Int k) { Int j = 0; while (j < k) { cost(2); j = j + 1; } return 1; }
}
{
  A a = new A();
  Int i = 1;
  while (i <= $CONC_CASES) {
    cost(10);
    Fut<Int> g = !f(a, 4) after dl 10;
    i = i + 1;
  }
}
)"));
    CHECK(eval(r.sequential, 100, 3) == 3 * (10 + 8));
    CHECK(eval(r.sequential, 100, 1) == 18);
    CHECK(eval(r.critical, 100, 3) <= eval(r.sequential, 100, 3));
}

TEST_CASE("recursion is rejected")
{
    CHECK(analysis_error(R"(module R;
interface A { Int f(A a, Int n); }
class A implements A {
  Int f(A a, Int n) {
    cost(1);
    Fut<Int> x = !f(a, a, n) after dl 10;
    await x?;
    return 1;
  }
}
{
  A a = new A();
  Fut<Int> g = !f(a, a, 3) after dl 10;
  await g?;
}
)") == AnalysisErrorKind::UnsupportedRecursion);
}

TEST_CASE("loops without a derivable count are rejected")
{
    CHECK(analysis_error(R"(module U;
interface A { Int f(); }
class A implements A { Int f() { cost(5); return 1; } }
{
  A a = new A();
  Int i = 0;
  while (i != 3) {
    Fut<Int> g = !f(a) after dl 10;
    i = i + 1;
  }
}
)") == AnalysisErrorKind::UnboundedLoop);
    CHECK(analysis_error(R"(module U;
{
  Int i = 0;
  while (i <= 10) {
    cost(1);
    i = i + 1;
    i = i - 1;
  }
}
)") == AnalysisErrorKind::UnboundedLoop);
}

TEST_CASE("a cost that depends on a random draw is unsupported")
{
    CHECK(analysis_error("module M;\n{\n  Int n = random(4);\n  cost(n);\n}") == AnalysisErrorKind::Unsupported);
}

TEST_CASE("report JSON")
{
    auto j = to_json(supply_report());
    CHECK(j["sequential"].is_string());
    CHECK(j["criticalPath"].is_string());
    REQUIRE(j["evaluations"].size() == 4);
    CHECK(j["evaluations"][1]["EFFICIENCY"] == 100);
    CHECK(j["evaluations"][1]["CONC_CASES"] == 8);
    CHECK(j["evaluations"][1]["sequential"] == 3200);
    CHECK(parse_bound(j["sequential"].get<std::string>())->kind != BoundExpr::Kind::Ref);
}

TEST_CASE("bound expression text round-trips")
{
    std::mt19937 rng(17);
    for (int i = 0; i < 300; ++i) {
        BoundPtr e = random_expr(rng, 4);
        std::string text = to_string(e);
        BoundPtr back = parse_bound(text);
        CHECK(to_string(back) == text);
        for (int eff : {1, 7, 100})
            for (int cases : {1, 3})
                CHECK(eval(back, eff, cases) == eval(e, eff, cases));
    }
}

TEST_CASE("simplification preserves values")
{
    std::mt19937 rng(23);
    for (int i = 0; i < 300; ++i) {
        BoundPtr e = random_expr(rng, 5);
        BoundPtr s = simplify(e);
        for (int eff : {1, 2, 50, 100, 140})
            for (int cases : {1, 4, 9})
                CHECK(eval(s, eff, cases) == eval(e, eff, cases));
    }
}

TEST_CASE("bound expression basics")
{
    CHECK(to_string(simplify(add(constant(2), constant(3)))) == "5");
    CHECK(to_string(simplify(max(param("EFFICIENCY"), add(param("EFFICIENCY"), param("CONC_CASES"))))) ==
          "(CONC_CASES+EFFICIENCY)");
    CHECK(to_string(simplify(max(constant(0), param("CONC_CASES")))) == "CONC_CASES");
    CHECK(evaluate(*trunc_div(constant(-7), constant(2)), {}) == -3);
    CHECK_THROWS_AS(evaluate(*trunc_div(constant(1), constant(0)), {}), Error);
    CHECK_THROWS_AS(evaluate(*param("X"), {}), Error);
    CHECK_THROWS_AS(parse_bound("max(1,"), Error);
    BoundPtr e = substitute(add(param("n"), constant(1)), {{"n", constant(4)}});
    CHECK(evaluate(*e, {}) == 5);
}
