#include "support.hpp"

#include "rpl/parse/outline.hpp"
#include "rpl/parse/parser.hpp"
#include "rpl/parse/printer.hpp"

#include <doctest.h>

#include <chrono>

using namespace rpl;
using namespace rpl::lang;

namespace {

const stmt::AsyncCall* find_call(const Block& b, const std::string& method)
{
    for (const auto& s : b.stmts) {
        if (const auto* c = std::get_if<stmt::AsyncCall>(&s.node); c && c->method == method)
            return c;
        if (const auto* f = std::get_if<stmt::If>(&s.node)) {
            if (const auto* c = find_call(f->then_block, method))
                return c;
            if (f->else_block)
                if (const auto* c = find_call(*f->else_block, method))
                    return c;
        }
        if (const auto* w = std::get_if<stmt::While>(&s.node))
            if (const auto* c = find_call(w->body, method))
                return c;
    }
    return nullptr;
}

bool has_error_at(const parse::ParseResult& r, int line)
{
    for (const auto& d : r.diagnostics)
        if (d.severity == parse::Severity::Error && d.span.line == line)
            return true;
    return false;
}

const char* kTwoMethods = R"(module Two;
interface Clerk {
  Int file();
  Int stamp(Int n);
}
class Clerk implements Clerk {
  Int file() { cost(1); return 1; }
  Int stamp(Int n) { cost(n); return n; }
}
{
  Clerk c = new Clerk();
  Fut<Int> f = !stamp(c, 4) after dl 10;
  await f?;
}
)";

} // namespace

TEST_CASE("the supply chain model parses cleanly")
{
    auto t0 = std::chrono::steady_clock::now();
    auto r = parse::parse(test::model_source("supply_chain.rpl"));
    auto elapsed = std::chrono::steady_clock::now() - t0;
    REQUIRE(r.ok());
    CHECK(r.diagnostics.empty());
    CHECK(elapsed < std::chrono::seconds(1));
    const Program& p = *r.program;
    CHECK(p.module_name == "Retail");
    CHECK(p.interfaces.size() == 4);
    CHECK(p.classes.size() == 4);
    REQUIRE(p.resources.size() == 3);
    CHECK(p.resources[0].descriptors.size() == 8);
    CHECK(p.resources[1].descriptors.size() == 8);
    CHECK(p.resources[2].descriptors.size() == 4);
    CHECK(p.resources[0].category() == "Van");
    CHECK(p.resources[2].descriptors[1].cost_per_unit == 450);
    CHECK(p.pool().resources.back().id == 20);
}

TEST_CASE("minimal program")
{
    auto r = parse::parse("module M; {  }");
    REQUIRE(r.ok());
    CHECK(r.program->module_name == "M");
    CHECK(r.program->main.stmts.empty());
    CHECK(r.program->classes.empty());
    CHECK(r.program->resources.empty());
}

TEST_CASE("a dependency-free call keeps its deadline")
{
    Program p = test::load_model("supply_chain.rpl");
    const MethodDecl* m = p.find_class("Retailer")->find("process_order");
    REQUIRE(m);
    const auto* order = find_call(m->body, "order_goods");
    REQUIRE(order);
    CHECK(order->target.name == "f2");
    CHECK(order->after.empty());
    REQUIRE(order->args.size() == 1);
    const auto* dl = std::get_if<expr::IntLit>(&order->deadline->node);
    REQUIRE(dl);
    CHECK(dl->value == 220);

    const auto* deliver = find_call(m->body, "deliver_goods");
    REQUIRE(deliver);
    const auto* check = find_call(m->body, "check_goods");
    REQUIRE(check);
    CHECK(check->args.size() == 1);
}

TEST_CASE("after lists name their futures")
{
    Program p = test::load_model("supply_chain.rpl");
    const Block& body = p.find_class("Retailer")->find("process_order")->body;
    const auto& branch = std::get<stmt::If>(body.stmts[7].node);
    const auto& f3 = std::get<stmt::AsyncCall>(branch.else_block->stmts[1].node);
    CHECK(f3.method == "deliver_goods");
    CHECK(f3.after == std::vector<std::string>{"f2"});
    CHECK(branch.else_block->stmts[1].span.line == 22);
}

TEST_CASE("statements carry their lines")
{
    Program p = test::load_model("supply_chain.rpl");
    const Block& body = p.find_class("Retailer")->find("process_order")->body;
    CHECK(body.stmts[4].span.line == 12);
    CHECK(std::holds_alternative<stmt::AsyncCall>(body.stmts[4].node));
    CHECK(body.stmts[7].span.line == 15);
    CHECK(p.main.stmts.front().span.line == 75);
}

TEST_CASE("outline of the supply chain model")
{
    auto entries = parse::outline(test::load_model("supply_chain.rpl"));
    bool retailer = false, process = false;
    for (const auto& e : entries) {
        retailer |= e.kind == parse::OutlineKind::Class && e.name == "Retailer";
        process |= e.kind == parse::OutlineKind::Method && e.name == "process_order";
    }
    CHECK(retailer);
    CHECK(process);
    for (std::size_t i = 1; i < entries.size(); ++i)
        CHECK(entries[i - 1].span.line <= entries[i].span.line);
}

TEST_CASE("outline of an empty program")
{
    CHECK(parse::outline(test::parse_text("module M; {  }")).empty());
}

TEST_CASE("outline lists one class and its two methods")
{
    auto entries = parse::outline(test::parse_text(kTwoMethods));
    int class_or_method = 0;
    for (const auto& e : entries)
        if (e.kind != parse::OutlineKind::Interface)
            ++class_or_method;
    CHECK(class_or_method == 3);
    auto j = parse::to_json(entries);
    CHECK(j.is_array());
}

TEST_CASE("pretty printing round-trips every model")
{
    for (const auto& entry : std::filesystem::directory_iterator(test::models_dir())) {
        if (entry.path().extension() != ".rpl")
            continue;
        CAPTURE(entry.path().filename().string());
        for (bool raw : {true, false}) {
            std::string text = test::read_text(entry.path());
            Program p = raw ? test::parse_text(text) : test::parse_text(preprocess(text, Profile{}));
            std::string printed = parse::pretty_print(p);
            Program again = test::parse_text(printed);
            CHECK(parse::dump(again) == parse::dump(p));
            CHECK(parse::pretty_print(again) == printed);
        }
    }
}

TEST_CASE("round trip also holds for a hand-written fixture")
{
    Program p = test::parse_text(kTwoMethods);
    CHECK(parse::dump(test::parse_text(parse::pretty_print(p))) == parse::dump(p));
}

TEST_CASE("syntax errors are reported at their line")
{
    auto r = parse::parse("module M;\n{\n  Int x = ;\n}");
    CHECK_FALSE(r.ok());
    CHECK(has_error_at(r, 3));
    auto j = parse::to_json(r.diagnostics);
    REQUIRE(j.size() >= 1);
    CHECK(j[0].contains("line"));
    CHECK(j[0].contains("column"));
    CHECK(j[0]["severity"] == "error");
    CHECK(j[0].contains("message"));
}

TEST_CASE("semantic errors")
{
    SUBCASE("undeclared method")
    {
        auto r = parse::parse(R"(module M;
interface A { Int f(); }
class A implements A { Int f() { return 1; } }
{
  A a = new A();
  Fut<Int> x = !g(a) after dl 1;
})");
        CHECK_FALSE(r.ok());
        CHECK(has_error_at(r, 6));
    }
    SUBCASE("arity mismatch")
    {
        auto r = parse::parse(R"(module M;
interface A { Int f(Int n); }
class A implements A { Int f(Int n) { return n; } }
{
  A a = new A();
  Fut<Int> x = !f(a) after dl 1;
})");
        CHECK_FALSE(r.ok());
        CHECK(has_error_at(r, 6));
    }
    SUBCASE("unknown type")
    {
        auto r = parse::parse("module M;\n{\n  Truck t = 1;\n}");
        CHECK_FALSE(r.ok());
        CHECK(has_error_at(r, 3));
    }
    SUBCASE("after names something that is not a future")
    {
        auto r = parse::parse(R"(module M;
interface A { Int f(); }
class A implements A { Int f() { return 1; } }
{
  A a = new A();
  Int n = 0;
  Fut<Int> x = !f(a) after n dl 1;
})");
        CHECK_FALSE(r.ok());
        CHECK(has_error_at(r, 7));
    }
    SUBCASE("class misses an interface method")
    {
        auto r = parse::parse(R"(module M;
interface A { Int f(); Int g(); }
class A implements A { Int f() { return 1; } }
{ })");
        CHECK_FALSE(r.ok());
    }
}

TEST_CASE("keywords are reserved")
{
    CHECK_FALSE(parse::parse("module M;\n{\n  Int while = 1;\n}").ok());
    CHECK_FALSE(parse::parse("module M;\n{\n  Int dl = 1;\n}").ok());
}

TEST_CASE("line comments are skipped")
{
    auto r = parse::parse("// header\nmodule M; // trailing\n{ // inside\n}");
    CHECK(r.ok());
}
