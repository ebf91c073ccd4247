#include "rpl/bench/service.hpp"
#include "rpl/bench/chart.hpp"
#include "rpl/bench/presets.hpp"
#include "rpl/bench/runner.hpp"
#include "rpl/parse/outline.hpp"
#include "rpl/parse/parser.hpp"
#include "rpl/sim/error.hpp"
#include "rpl/sim/simulator.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

namespace rpl::bench {

using nlohmann::ordered_json;

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void reply(httplib::Response& res, int status, const ordered_json& body)
{
    res.status = status;
    res.set_content(body.dump(), kJson);
}

ordered_json error_body(const std::string& message) { return {{"error", message}}; }

bool safe_name(const std::string& name)
{
    return !name.empty() && name.find('/') == std::string::npos && name.find('\\') == std::string::npos &&
           name.find("..") == std::string::npos;
}

} // namespace

struct Service::Impl {
    RunStore& store;
    ServiceConfig config;
    httplib::Server server;
    std::thread thread;

    Impl(RunStore& s, ServiceConfig c) : store(s), config(std::move(c)) { routes(); }

    std::vector<std::string> example_names() const
    {
        std::vector<std::string> names;
        std::error_code ec;
        for (const auto& entry : std::filesystem::directory_iterator(config.models_dir, ec))
            if (entry.is_regular_file() && entry.path().extension() == ".rpl")
                names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
        return names;
    }

    void routes()
    {
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            reply(res, 500, error_body(what));
        });

        server.Get("/api/examples", [this](const httplib::Request&, httplib::Response& res) {
            ordered_json out = ordered_json::array();
            for (const auto& name : example_names())
                out.push_back({{"name", name}});
            reply(res, 200, out);
        });

        server.Get(R"(/api/examples/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::string name = req.matches[1];
            auto names = example_names();
            if (!safe_name(name) || std::find(names.begin(), names.end(), name) == names.end())
                return reply(res, 404, error_body("no example named " + name));
            std::ifstream in(config.models_dir / name);
            std::stringstream ss;
            ss << in.rdbuf();
            reply(res, 200, {{"name", name}, {"source", ss.str()}});
        });

        server.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
            ordered_json out = ordered_json::array();
            for (const auto& p : presets())
                out.push_back(to_json(p));
            reply(res, 200, out);
        });

        server.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
            auto records = store.list();
            ordered_json out = ordered_json::array();
            for (auto it = records.rbegin(); it != records.rend(); ++it)
                out.push_back(overview_row(*it));
            reply(res, 200, out);
        });

        server.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto record = store.get(req.matches[1].str());
            if (!record)
                return reply(res, 404, error_body("no run with id " + req.matches[1].str()));
            res.status = 200;
            res.set_content(record->payload, kJson);
        });

        server.Get("/api/charts", [this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, to_json(chart_series(store.list())));
        });

        server.Get("/api/outline", [](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("source"))
                return reply(res, 400, error_body("missing query parameter 'source'"));
            auto parsed = parse::parse(req.get_param_value("source"));
            if (!parsed.ok())
                return reply(res, 400, {{"error", "diagnostics"}, {"diagnostics", parse::to_json(parsed.diagnostics)}});
            reply(res, 200, parse::to_json(parse::outline(*parsed.program)));
        });

        server.Post("/api/runs", [this](const httplib::Request& req, httplib::Response& res) { post_run(req, res); });
    }

    void post_run(const httplib::Request& req, httplib::Response& res)
    {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            return reply(res, 400, error_body(std::string("malformed JSON: ") + e.what()));
        }
        if (!body.is_object() || !body.contains("source") || !body["source"].is_string())
            return reply(res, 400, error_body("body must be an object with a string 'source'"));

        RunRequest request;
        request.source = body["source"].get<std::string>();
        request.file = body.value("fileName", std::string("untitled.rpl"));
        ordered_json context = {{"file", request.file}};
        try {
            nlohmann::json profile = body.value("profile", nlohmann::json::object());
            if (body.contains("tool")) {
                if (!profile.is_object())
                    throw InvalidProfile(std::vector<lang::FieldError>{{"profile", "must be an object"}});
                profile["tool"] = body["tool"];
            }
            request.profile = profile_from_json(profile);
            context["tool"] = lang::to_string(request.profile.tool);

            RunOptions options;
            options.timeout = config.timeout;
            for (;;) {
                while (store.contains(sim::make_exec_id(request.source, request.profile, options.salt)))
                    ++options.salt;
                context["execId"] = sim::make_exec_id(request.source, request.profile, options.salt);
                RunOutcome outcome = execute(request, options);
                try {
                    store.append(outcome.record);
                } catch (const DuplicateExecId&) {
                    ++options.salt;
                    continue;
                }
                res.status = 201;
                res.set_content(outcome.record.payload, kJson);
                return;
            }
        } catch (const SourceRejected& e) {
            reply(res, 400, {{"error", "diagnostics"}, {"diagnostics", parse::to_json(e.diagnostics())}});
        } catch (const InvalidProfile& e) {
            ordered_json fields = ordered_json::array();
            for (const auto& f : e.fields())
                fields.push_back({{"field", f.field}, {"message", f.message}});
            reply(res, 422, {{"error", "invalid profile"}, {"fields", fields}});
        } catch (const sim::SimulationError& e) {
            context["kind"] = sim::to_string(e.kind());
            if (e.line() > 0)
                context["line"] = e.line();
            if (e.run_index())
                context["run"] = *e.run_index();
            int status = e.kind() == sim::SimErrorKind::Timeout ? 504 : 500;
            reply(res, status, {{"error", e.what()}, {"context", context}});
        } catch (const AnalysisError& e) {
            context["kind"] = to_string(e.kind());
            if (e.line() > 0)
                context["line"] = e.line();
            reply(res, 500, {{"error", e.what()}, {"context", context}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", e.what()}, {"context", context}});
        }
    }
};

Service::Service(RunStore& store, ServiceConfig config) : impl_(std::make_unique<Impl>(store, std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port)
{
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0)
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void Service::stop()
{
    if (!impl_)
        return;
    impl_->server.stop();
    if (impl_->thread.joinable())
        impl_->thread.join();
}

} // namespace rpl::bench
