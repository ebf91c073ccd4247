#include "support.hpp"

#include "rpl/bench/chart.hpp"
#include "rpl/bench/presets.hpp"
#include "rpl/bench/runner.hpp"
#include "rpl/bench/service.hpp"
#include "rpl/bench/store.hpp"

#include <doctest.h>
#include <httplib.h>

#include <unistd.h>

#include <atomic>
#include <set>
#include <thread>

using namespace rpl;
using namespace rpl::bench;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("rpl_bench_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

RunRecord record(const std::string& id, const std::string& avg_cost = "2212500")
{
    RunRecord r;
    r.exec_id = id;
    r.file = "supply_chain.rpl";
    r.tool = "simulate";
    r.num_sims = 10;
    r.time_stats = {{"min", 200}, {"max", 400}, {"avg", "300"}};
    r.cost_stats = {{"min", 922500}, {"max", 2212500}, {"avg", avg_cost}};
    r.created_at = "2026-01-01T00:00:00Z";
    r.payload = R"({"execId":")" + id + R"(","value":1.5})";
    return r;
}

json post_body(const std::string& source, json profile, const std::string& file = "supply_chain.rpl")
{
    return {{"source", source}, {"fileName", file}, {"profile", std::move(profile)}};
}

struct Server {
    RunStore& store;
    Service service;
    int port;
    httplib::Client client;
    explicit Server(RunStore& s, ServiceConfig cfg = {})
        : store(s), service(s, cfg), port(service.start()), client("127.0.0.1", port)
    {
        client.set_read_timeout(120, 0);
    }
    httplib::Result post(const json& body) { return client.Post("/api/runs", body.dump(), "application/json"); }
};

const json kSimProfile = {{"tool", "simulate"}, {"efficiency", 100}, {"availability", 100}, {"cases", 1},
                          {"sims", 10}, {"seed", 7}};

} // namespace

TEST_CASE("store: append then get returns the same payload")
{
    RunStore store;
    store.append(record("00000001"));
    auto got = store.get("00000001");
    REQUIRE(got);
    CHECK(*got == record("00000001"));
    CHECK_FALSE(store.get("ffffffff"));
}

TEST_CASE("store: two appends keep their order")
{
    TempDir dir;
    RunStore store(dir.path / "runs.jsonl");
    store.append(record("0000000b"));
    store.append(record("0000000a"));
    auto all = store.list();
    REQUIRE(all.size() == 2);
    CHECK(all[0].exec_id == "0000000b");
    CHECK(all[1].exec_id == "0000000a");
}

TEST_CASE("store: duplicate ids are refused")
{
    RunStore store;
    store.append(record("00000001"));
    CHECK_THROWS_AS(store.append(record("00000001")), DuplicateExecId);
    CHECK(store.size() == 1);
}

TEST_CASE("store: records survive a reopen")
{
    TempDir dir;
    {
        RunStore store(dir.path / "runs.jsonl");
        store.append(record("00000001"));
        store.append(record("00000002"));
    }
    RunStore again(dir.path / "runs.jsonl");
    CHECK(again.list() == std::vector<RunRecord>{record("00000001"), record("00000002")});
    CHECK(again.warnings().empty());
    CHECK_THROWS_AS(again.append(record("00000002")), DuplicateExecId);
}

TEST_CASE("store: a corrupt line is skipped with a warning")
{
    TempDir dir;
    auto path = dir.path / "runs.jsonl";
    {
        std::ofstream out(path);
        out << to_json(record("00000001")).dump() << '\n';
        out << "{\"execId\": \"00000002\", \"tool\": tru\n";
        out << to_json(record("00000003")).dump() << '\n';
    }
    std::vector<std::string> seen;
    RunStore store(path, [&](const std::string& w) { seen.push_back(w); });
    CHECK(store.size() == 2);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].find(":2:") != std::string::npos);
    CHECK(store.warnings() == seen);
}

TEST_CASE("store: a torn final line does not swallow the next record")
{
    TempDir dir;
    auto path = dir.path / "runs.jsonl";
    {
        std::ofstream out(path);
        out << to_json(record("00000001")).dump() << '\n' << "{\"execId\":\"0000";
    }
    {
        RunStore store(path, [](const std::string&) {});
        store.append(record("00000002"));
    }
    RunStore again(path, [](const std::string&) {});
    CHECK(again.size() == 2);
    CHECK(again.warnings().size() == 1);
}

TEST_CASE("store: concurrent appends are serialized")
{
    TempDir dir;
    RunStore store(dir.path / "runs.jsonl");
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 25; ++i)
                store.append(record(std::to_string(t) + "-" + std::to_string(i)));
        });
    for (auto& th : threads)
        th.join();
    CHECK(store.size() == 100);
    RunStore again(dir.path / "runs.jsonl");
    CHECK(again.size() == 100);
    CHECK(again.warnings().empty());
}

TEST_CASE("overview row")
{
    RunRecord r = record("00af1171", "4425001/2");
    r.efficiency_pct = 90;
    auto row = overview_row(r);
    CHECK(row["execId"] == "00af1171");
    CHECK(row["file"] == "supply_chain.rpl");
    CHECK(row["executions"] == 10);
    CHECK(row["efficiency"] == 90);
    CHECK(row["availability"] == 100);
    CHECK(row["cases"] == 1);
    CHECK(row["time"]["avg"] == "300.00");
    CHECK(row["cost"]["avg"] == "2212500.50");
    CHECK(row["cost"]["min"] == 922500);
}

TEST_CASE("chart series")
{
    CHECK(chart_series({}).time.empty());
    CHECK(chart_series({}).cost.empty());
    ChartSeries one = chart_series({record("00000001")});
    REQUIRE(one.cost.size() == 1);
    CHECK(one.cost[0].value == doctest::Approx(2212500));
    CHECK(one.cost[0].millions == doctest::Approx(2.2125));
    CHECK(to_json(one)["cost"][0]["millions"].dump() == "2.2125");
    ChartSeries three = chart_series({record("a"), record("b"), record("c")});
    REQUIRE(three.time.size() == 3);
    CHECK(three.time[2].exec_id == "c");
    CHECK(three.time[0].value == doctest::Approx(300));
}

TEST_CASE("presets cover every tool")
{
    std::set<lang::Tool> tools;
    for (const auto& p : presets()) {
        tools.insert(p.profile.tool);
        CHECK(lang::validate(p.profile).empty());
        CHECK(find_preset(p.name) == &p);
    }
    CHECK(tools.size() == 3);
    CHECK(find_preset("nope") == nullptr);
}

TEST_CASE("overriding a preset leaves the preset untouched")
{
    const ProfilePreset* base = find_preset("simulate-baseline");
    REQUIRE(base);
    lang::Profile before = base->profile;
    lang::Profile p = profile_from_json({{"preset", "simulate-baseline"}, {"efficiency", 55}});
    CHECK(p.efficiency_pct == 55);
    CHECK(p.num_sims == before.num_sims);
    CHECK(base->profile == before);
}

TEST_CASE("profile JSON errors name their fields")
{
    try {
        profile_from_json({{"efficiency", "fast"}, {"availability", 140}, {"tool", "gantt"}, {"seed", -1}});
        FAIL("expected InvalidProfile");
    } catch (const InvalidProfile& e) {
        std::set<std::string> fields;
        for (const auto& f : e.fields())
            fields.insert(f.field);
        CHECK(fields == std::set<std::string>{"efficiency", "availability", "tool", "seed"});
    }
    CHECK_THROWS_AS(profile_from_json(json::array()), InvalidProfile);
}

TEST_CASE("runner: each tool produces a record")
{
    RunRequest req;
    req.source = test::model_source("supply_chain.rpl");
    req.file = "supply_chain.rpl";
    req.profile = profile_from_json(kSimProfile);

    RunOutcome sim = execute(req);
    CHECK(sim.payload["violations"]["total"] == 10);
    CHECK(sim.payload["markers"].dump() == R"([{"line":12,"count":10}])");
    CHECK(sim.record.payload == sim.payload.dump());
    CHECK(sim.record.exec_id == sim.payload["execId"]);
    CHECK(sim.record.time_stats["min"] == sim.payload["time"]["min"]);

    req.profile.tool = lang::Tool::Peak;
    RunOutcome peak = execute(req);
    CHECK(peak.payload["peak"]["perCategory"]["Van"]["exact"] == 1);
    CHECK(peak.record.time_stats.is_null());
    CHECK(peak.record.exec_id != sim.record.exec_id);

    req.profile.tool = lang::Tool::Time;
    RunOutcome time = execute(req);
    CHECK(time.payload["bound"]["evaluations"][0]["sequential"] == 400);
    CHECK(time.payload["check"]["holds"] == true);
    CHECK(time.payload["check"]["bound"] == 400);
}

TEST_CASE("runner: rejected sources and profiles")
{
    RunRequest req;
    req.source = "module M;\n{\n  Int x = ;\n}";
    CHECK_THROWS_AS(execute(req), SourceRejected);
    req.source = "module M;\n{\n  Int x = $WIND;\n}";
    CHECK_THROWS_AS(execute(req), SourceRejected);
    req.source = "module M; {  }";
    req.profile.num_sims = 0;
    CHECK_THROWS_AS(execute(req), InvalidProfile);
}

TEST_CASE("service: empty store and unknown runs")
{
    RunStore store;
    Server s(store);
    auto runs = s.client.Get("/api/runs");
    REQUIRE(runs);
    CHECK(runs->status == 200);
    CHECK(runs->body == "[]");
    auto missing = s.client.Get("/api/runs/deadbeef");
    REQUIRE(missing);
    CHECK(missing->status == 404);
}

TEST_CASE("service: simulate run on the supply chain example")
{
    RunStore store;
    Server s(store);
    auto example = s.client.Get("/api/examples/supply_chain.rpl");
    REQUIRE(example);
    REQUIRE(example->status == 200);
    std::string source = json::parse(example->body)["source"];

    auto res = s.post(post_body(source, kSimProfile));
    REQUIRE(res);
    REQUIRE(res->status == 201);
    json body = json::parse(res->body);
    CHECK(body["violations"]["total"] == 10);
    CHECK(body["execId"].get<std::string>().size() == 8);
    CHECK(store.size() == 1);

    auto again = s.client.Get("/api/runs/" + body["execId"].get<std::string>());
    REQUIRE(again);
    CHECK(again->status == 200);
    CHECK(again->body == res->body);

    auto rows = json::parse(s.client.Get("/api/runs")->body);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["execId"] == body["execId"]);
    CHECK(rows[0]["executions"] == 10);

    auto second = s.post(post_body(source, kSimProfile));
    REQUIRE(second);
    CHECK(second->status == 201);
    CHECK(json::parse(second->body)["execId"] != body["execId"]);
    rows = json::parse(s.client.Get("/api/runs")->body);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["execId"] == json::parse(second->body)["execId"]);

    auto charts = json::parse(s.client.Get("/api/charts")->body);
    CHECK(charts["cost"].size() == 2);
}

TEST_CASE("service: error statuses")
{
    RunStore store;
    Server s(store);
    std::string source = test::model_source("supply_chain.rpl");

    auto bad_source = s.post(post_body("module M;\n{\n  Int x = ;\n}", kSimProfile));
    REQUIRE(bad_source);
    CHECK(bad_source->status == 400);
    json diag = json::parse(bad_source->body)["diagnostics"];
    REQUIRE(diag.size() >= 1);
    CHECK(diag[0]["line"] == 3);

    json profile = kSimProfile;
    profile["availability"] = 250;
    auto bad_profile = s.post(post_body(source, profile));
    REQUIRE(bad_profile);
    CHECK(bad_profile->status == 422);
    CHECK(json::parse(bad_profile->body)["fields"][0]["field"] == "availability");

    auto bad_json = s.client.Post("/api/runs", "{not json", "application/json");
    REQUIRE(bad_json);
    CHECK(bad_json->status == 400);

    profile = kSimProfile;
    profile["availability"] = 0;
    auto deadlock = s.post(post_body(source, profile));
    REQUIRE(deadlock);
    CHECK(deadlock->status == 500);
    json ctx = json::parse(deadlock->body)["context"];
    CHECK(ctx["kind"] == "Deadlock");
    CHECK(ctx["run"] == 0);
    CHECK(ctx["tool"] == "simulate");

    CHECK(s.client.Get("/api/examples/nope.rpl")->status == 404);
    CHECK(store.size() == 0);
}

TEST_CASE("service: slow runs time out")
{
    RunStore store;
    ServiceConfig cfg;
    cfg.timeout = std::chrono::milliseconds(1);
    Server s(store, cfg);
    json profile = {{"tool", "peak"}, {"cases", 6}, {"sims", 1}};
    auto res = s.post(post_body(test::model_source("supply_chain.rpl"), profile));
    REQUIRE(res);
    CHECK(res->status == 504);
    CHECK(store.size() == 0);
}

TEST_CASE("service: examples, presets and outline")
{
    RunStore store;
    Server s(store);
    json examples = json::parse(s.client.Get("/api/examples")->body);
    std::set<std::string> names;
    for (const auto& e : examples)
        names.insert(e["name"]);
    CHECK(names.count("supply_chain.rpl"));
    CHECK(names.count("minimal.rpl"));

    CHECK(json::parse(s.client.Get("/api/presets")->body).size() == presets().size());

    httplib::Params q{{"source", test::model_source("supply_chain.rpl")}};
    auto outline = s.client.Get("/api/outline", q, httplib::Headers{});
    REQUIRE(outline);
    CHECK(outline->status == 200);
    CHECK(outline->body.find("process_order") != std::string::npos);
    auto broken = s.client.Get("/api/outline", httplib::Params{{"source", "module"}}, httplib::Headers{});
    REQUIRE(broken);
    CHECK(broken->status == 400);
}

TEST_CASE("service: results survive a restart bit for bit")
{
    TempDir dir;
    auto path = dir.path / "runs.jsonl";
    std::string source = test::model_source("supply_chain.rpl");
    std::string posted, listed;
    std::string id;
    {
        RunStore store(path);
        Server s(store);
        auto res = s.post(post_body(source, kSimProfile));
        REQUIRE(res);
        REQUIRE(res->status == 201);
        posted = res->body;
        id = json::parse(posted)["execId"];
        json time_profile = kSimProfile;
        time_profile["tool"] = "time";
        REQUIRE(s.post(post_body(source, time_profile))->status == 201);
        listed = s.client.Get("/api/runs")->body;
    }
    RunStore store(path);
    Server s(store);
    CHECK(s.client.Get("/api/runs/" + id)->body == posted);
    CHECK(s.client.Get("/api/runs")->body == listed);
}

TEST_CASE("service: concurrent posts each leave one record")
{
    RunStore store;
    Server s(store);
    std::string source = test::model_source("supply_chain.rpl");
    std::vector<std::thread> threads;
    std::atomic<int> created{0};
    for (int i = 0; i < 4; ++i)
        threads.emplace_back([&] {
            httplib::Client c("127.0.0.1", s.port);
            c.set_read_timeout(120, 0);
            auto r = c.Post("/api/runs", post_body(source, kSimProfile).dump(), "application/json");
            if (r && r->status == 201)
                ++created;
        });
    for (auto& t : threads)
        t.join();
    CHECK(created == 4);
    CHECK(store.size() == 4);
}
