// rpl: command-line front end for the workbench.
#include "rpl/bench/presets.hpp"
#include "rpl/bench/runner.hpp"
#include "rpl/bench/service.hpp"
#include "rpl/bench/store.hpp"
#include "rpl/sim/simulator.hpp"
#include "rpl/lang/error.hpp"
#include "rpl/parse/outline.hpp"
#include "rpl/parse/parser.hpp"
#include "rpl/sim/error.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace rpl;
using nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kRuntime = 2;
constexpr int kUsage = 64;

struct Flags {
    std::string file;
    std::optional<std::string> preset;
    std::optional<int> efficiency, availability, cases, sims;
    std::optional<std::uint64_t> seed;
    bool json = false;
    std::string store;
    long timeout_ms = 60000;
    bool issue_anchor = false;
    bool fifo = false;
    bool no_exact = false;
    int port = 0;
    std::string host = "127.0.0.1";
};

std::string env_or(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? v : std::move(fallback);
}

std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_diagnostics(const std::string& file, const std::vector<parse::Diagnostic>& diags)
{
    for (const auto& d : diags)
        std::cerr << file << ":" << parse::format(d) << '\n';
}

int check(const Flags& f)
{
    auto source = read_file(f.file);
    if (!source) {
        std::cerr << "rpl: cannot read " << f.file << '\n';
        return kRuntime;
    }
    auto result = parse::parse(*source);
    if (f.json) {
        ordered_json out = {{"ok", result.ok()}, {"diagnostics", parse::to_json(result.diagnostics)}};
        if (result.ok())
            out["outline"] = parse::to_json(parse::outline(*result.program));
        std::cout << out.dump(2) << '\n';
    } else {
        print_diagnostics(f.file, result.diagnostics);
        if (result.ok())
            std::cout << "OK\n";
    }
    return result.ok() ? kOk : kDiagnostics;
}

std::string stats_line(const char* label, const ordered_json& s)
{
    std::ostringstream os;
    os << std::left << std::setw(6) << label << "min " << s["min"] << "  max " << s["max"] << "  avg "
       << std::fixed << std::setprecision(2) << s["avg"].get<double>();
    return os.str();
}

void print_header(const ordered_json& p)
{
    std::cout << "execId " << p["execId"].get<std::string>() << "  " << p["file"].get<std::string>() << "  sims "
              << p["sims"] << "  efficiency " << p["efficiency"] << "%  availability " << p["availability"]
              << "%  cases " << p["cases"] << "  seed " << p["seed"] << '\n';
}

void print_simulation(const ordered_json& p)
{
    print_header(p);
    std::cout << stats_line("time", p["time"]) << '\n' << stats_line("cost", p["cost"]) << '\n';
    std::cout << "violations " << p["violations"]["total"] << '\n';
    for (const auto& site : p["violations"]["perSite"])
        std::cout << "  " << site["method"].get<std::string>() << " (line " << site["line"] << "): " << site["count"]
                  << '\n';
    std::cout << "peaks";
    for (const auto& [cat, n] : p["peaks"].items())
        std::cout << "  " << cat << " " << n;
    std::cout << '\n';
}

void print_peak(const ordered_json& p)
{
    print_header(p);
    const ordered_json& r = p["peak"];
    std::cout << std::left << std::setw(12) << "category" << std::setw(10) << "observed" << std::setw(8) << "exact"
              << "static\n";
    for (const auto& [cat, v] : r["perCategory"].items())
        std::cout << std::setw(12) << cat << std::setw(10) << v["observed"].dump() << std::setw(8)
                  << (v["exact"].is_null() ? "-" : v["exact"].dump()) << v["static"] << '\n';
    std::cout << "explored schedules " << r["exploredSchedules"] << (r["truncated"].get<bool>() ? " (truncated)" : "")
              << '\n';
}

void print_time(const ordered_json& p)
{
    print_header(p);
    const ordered_json& b = p["bound"];
    std::cout << "sequential     " << b["sequential"].get<std::string>() << '\n'
              << "critical path  " << b["criticalPath"].get<std::string>() << '\n';
    for (const auto& e : b["evaluations"])
        std::cout << "  EFFICIENCY=" << e["EFFICIENCY"] << " CONC_CASES=" << e["CONC_CASES"] << ": sequential "
                  << e["sequential"] << ", critical path " << e["criticalPath"] << '\n';
    const ordered_json& c = p["check"];
    std::cout << "bound at profile " << c["bound"] << ", worst simulated " << c["worstExecTime"] << ": "
              << (c["holds"].get<bool>() ? "holds" : "VIOLATED") << '\n';
}

int run_tool(lang::Tool tool, const Flags& f)
{
    auto source = read_file(f.file);
    if (!source) {
        std::cerr << "rpl: cannot read " << f.file << ": file not found or unreadable\n";
        return kRuntime;
    }
    bench::RunRequest request;
    request.source = *source;
    request.file = std::filesystem::path(f.file).filename().string();
    try {
        nlohmann::json profile = nlohmann::json::object();
        if (f.preset)
            profile["preset"] = *f.preset;
        profile["tool"] = lang::to_string(tool);
        if (f.efficiency)
            profile["efficiency"] = *f.efficiency;
        if (f.availability)
            profile["availability"] = *f.availability;
        if (f.cases)
            profile["cases"] = *f.cases;
        if (f.sims)
            profile["sims"] = *f.sims;
        if (f.seed)
            profile["seed"] = *f.seed;
        request.profile = bench::profile_from_json(profile);
    } catch (const bench::InvalidProfile& e) {
        for (const auto& field : e.fields())
            std::cerr << "rpl: --" << field.field << ": " << field.message << '\n';
        return kUsage;
    }

    bench::RunOptions options;
    options.timeout = std::chrono::milliseconds(f.timeout_ms);
    options.anchor = f.issue_anchor ? sim::DeadlineAnchor::Issue : sim::DeadlineAnchor::Enable;
    options.ready_policy = f.fifo ? sim::ReadyPolicy::Fifo : sim::ReadyPolicy::Random;
    options.exact_peak = !f.no_exact;
    try {
        std::unique_ptr<bench::RunStore> store;
        std::string store_path = f.store.empty() ? env_or("RPL_STORE", "") : f.store;
        if (!store_path.empty()) {
            store = std::make_unique<bench::RunStore>(store_path);
            while (store->contains(sim::make_exec_id(request.source, request.profile, options.salt)))
                ++options.salt;
        }
        bench::RunOutcome outcome = bench::execute(request, options);
        if (store)
            store->append(outcome.record);
        if (f.json)
            std::cout << outcome.payload.dump(2) << '\n';
        else if (tool == lang::Tool::Simulate)
            print_simulation(outcome.payload);
        else if (tool == lang::Tool::Peak)
            print_peak(outcome.payload);
        else
            print_time(outcome.payload);
        return kOk;
    } catch (const bench::SourceRejected& e) {
        print_diagnostics(f.file, e.diagnostics());
        return kDiagnostics;
    } catch (const sim::SimulationError& e) {
        std::cerr << "rpl: " << sim::to_string(e.kind()) << ": " << e.what();
        if (e.run_index())
            std::cerr << " (run " << *e.run_index() << ")";
        std::cerr << '\n';
        return kRuntime;
    } catch (const AnalysisError& e) {
        std::cerr << "rpl: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "rpl: " << e.what() << '\n';
        return kRuntime;
    }
}

bench::Service* g_service = nullptr;

int serve(const Flags& f)
{
    std::string store_path = f.store.empty() ? env_or("RPL_STORE", "rpl_runs.jsonl") : f.store;
    int port = f.port ? f.port : std::atoi(env_or("RPL_PORT", "8080").c_str());
    try {
        bench::RunStore store(store_path);
        bench::ServiceConfig config;
        config.timeout = std::chrono::milliseconds(f.timeout_ms);
        bench::Service service(store, config);
        g_service = &service;
        std::signal(SIGINT, [](int) {
            if (g_service)
                g_service->stop();
        });
        std::signal(SIGTERM, [](int) {
            if (g_service)
                g_service->stop();
        });
        std::cerr << "rpl: serving on http://" << f.host << ":" << port << " (store " << store_path << ")\n";
        bool ok = service.listen(f.host, port);
        g_service = nullptr;
        if (!ok) {
            std::cerr << "rpl: cannot listen on " << f.host << ":" << port << '\n';
            return kRuntime;
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "rpl: " << e.what() << '\n';
        return kRuntime;
    }
}

void add_run_flags(CLI::App* cmd, Flags& f)
{
    cmd->add_option("file", f.file, "RPL model")->required();
    cmd->add_option("--preset", f.preset, "start from a named profile");
    cmd->add_option("--efficiency", f.efficiency, "resource efficiency in percent");
    cmd->add_option("--availability", f.availability, "resource availability in percent");
    cmd->add_option("--cases", f.cases, "concurrent cases");
    cmd->add_option("--sims", f.sims, "number of simulations");
    cmd->add_option("--seed", f.seed, "seed of the first simulation");
    cmd->add_flag("--json", f.json, "print the result as JSON");
    cmd->add_option("--store", f.store, "append the run to this journal (default $RPL_STORE)");
    cmd->add_option("--timeout-ms", f.timeout_ms, "wall-clock limit");
    cmd->add_flag("--deadline-from-issue", f.issue_anchor, "measure deadlines from the call, not from enabling");
    cmd->add_flag("--fifo", f.fifo, "pick ready tasks first-in first-out");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RPL workflow workbench"};
    app.require_subcommand(1);
    Flags f;

    auto* check_cmd = app.add_subcommand("check", "parse and validate a model");
    check_cmd->add_option("file", f.file, "RPL model")->required();
    check_cmd->add_flag("--json", f.json, "print diagnostics and outline as JSON");

    auto* sim_cmd = app.add_subcommand("simulate", "run seeded simulations");
    add_run_flags(sim_cmd, f);
    auto* peak_cmd = app.add_subcommand("peak", "peak resource usage");
    add_run_flags(peak_cmd, f);
    peak_cmd->add_flag("--no-exact", f.no_exact, "skip the exhaustive schedule search");
    auto* time_cmd = app.add_subcommand("time", "closed-form execution time bound");
    add_run_flags(time_cmd, f);

    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
    serve_cmd->add_option("--port", f.port, "listening port (default $RPL_PORT or 8080)");
    serve_cmd->add_option("--host", f.host, "listening address");
    serve_cmd->add_option("--store", f.store, "run journal (default $RPL_STORE or rpl_runs.jsonl)");
    serve_cmd->add_option("--timeout-ms", f.timeout_ms, "per-run wall-clock limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*check_cmd)
        return check(f);
    if (*sim_cmd)
        return run_tool(lang::Tool::Simulate, f);
    if (*peak_cmd)
        return run_tool(lang::Tool::Peak, f);
    if (*time_cmd)
        return run_tool(lang::Tool::Time, f);
    return serve(f);
}
