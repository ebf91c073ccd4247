#include "rpl/bench/runner.hpp"
#include "rpl/bench/presets.hpp"
#include "rpl/lang/preprocess.hpp"
#include "rpl/parse/parser.hpp"
#include "rpl/peak/peak.hpp"
#include "rpl/sim/result_json.hpp"
#include "rpl/timing/time_bound.hpp"

#include <algorithm>
#include <ctime>
#include <limits>

namespace rpl::bench {

using nlohmann::ordered_json;

namespace {

std::string first_message(const std::vector<parse::Diagnostic>& diags)
{
    for (const auto& d : diags)
        if (d.severity == parse::Severity::Error)
            return parse::format(d);
    return "source rejected";
}

std::string field_summary(const std::vector<lang::FieldError>& fields)
{
    std::string out = "invalid profile";
    for (const auto& f : fields)
        out += "; " + f.field + " " + f.message;
    return out;
}

lang::Program parse_or_throw(const std::string& source)
{
    auto result = parse::parse(source);
    if (!result.ok())
        throw SourceRejected(result.diagnostics);
    return std::move(*result.program);
}

lang::Program parse_preprocessed(const std::string& source, const lang::Profile& profile)
{
    std::string text;
    try {
        text = lang::preprocess(source, profile);
    } catch (const UnknownPlaceholder& e) {
        parse::Diagnostic d;
        d.span.line = e.line();
        d.message = "unknown placeholder $" + e.name();
        throw SourceRejected({d});
    }
    return parse_or_throw(text);
}

ordered_json stats_record(const sim::Stats& s)
{
    return {{"min", s.min}, {"max", s.max}, {"avg", lang::to_string(s.avg)}};
}

ordered_json header(const std::string& exec_id, const RunRequest& r)
{
    const lang::Profile& p = r.profile;
    return {{"execId", exec_id},
            {"tool", lang::to_string(p.tool)},
            {"file", r.file},
            {"sims", p.num_sims},
            {"efficiency", p.efficiency_pct},
            {"availability", p.availability_pct},
            {"cases", p.conc_cases},
            {"seed", p.seed}};
}

} // namespace

SourceRejected::SourceRejected(std::vector<parse::Diagnostic> diags)
    : Error(first_message(diags)), diags_(std::move(diags))
{
}

InvalidProfile::InvalidProfile(std::vector<lang::FieldError> fields)
    : Error(field_summary(fields)), fields_(std::move(fields))
{
}

RunOutcome execute(const RunRequest& request, const RunOptions& options)
{
    const lang::Profile& profile = request.profile;
    if (auto errors = lang::validate(profile); !errors.empty())
        throw InvalidProfile(std::move(errors));
    lang::Program raw = parse_or_throw(request.source);
    auto deadline = std::chrono::steady_clock::now() + options.timeout;
    sim::SimOptions simopts;
    simopts.wall_deadline = deadline;
    simopts.anchor = options.anchor;
    simopts.ready_policy = options.ready_policy;

    RunOutcome out;
    RunRecord& rec = out.record;
    rec.exec_id = sim::make_exec_id(request.source, profile, options.salt);
    rec.file = request.file;
    rec.tool = lang::to_string(profile.tool);
    rec.num_sims = profile.num_sims;
    rec.efficiency_pct = profile.efficiency_pct;
    rec.availability_pct = profile.availability_pct;
    rec.conc_cases = profile.conc_cases;
    rec.created_at = utc_timestamp();

    switch (profile.tool) {
    case lang::Tool::Simulate: {
        lang::Program program = parse_preprocessed(request.source, profile);
        auto agg = sim::simulate_many(program, profile, simopts, request.source, request.file, options.salt);
        out.payload = sim::to_json(agg);
        out.payload["tool"] = "simulate";
        ordered_json markers = ordered_json::array();
        for (const auto& [line, count] : sim::violation_markers(agg))
            markers.push_back({{"line", line}, {"count", count}});
        out.payload["markers"] = markers;
        rec.time_stats = stats_record(agg.time);
        rec.cost_stats = stats_record(agg.cost);
        break;
    }
    case lang::Tool::Peak: {
        lang::Program program = parse_preprocessed(request.source, profile);
        peak::PeakOptions popts;
        popts.sim = simopts;
        popts.run_exact = options.exact_peak;
        popts.explore.wall_deadline = deadline;
        popts.explore.anchor = options.anchor;
        out.payload = header(rec.exec_id, request);
        out.payload["peak"] = peak::to_json(peak::analyze_peaks(program, profile, popts));
        break;
    }
    case lang::Tool::Time: {
        auto report = timing::analyze_time(raw);
        lang::Program program = parse_preprocessed(request.source, profile);
        auto check = timing::check_bound(program, profile, report, simopts);
        out.payload = header(rec.exec_id, request);
        out.payload["bound"] = timing::to_json(report);
        out.payload["check"] = {{"holds", check.holds},
                                {"bound", check.bound},
                                {"worstExecTime", check.worst},
                                {"offendingSeeds", check.offending_seeds}};
        break;
    }
    }
    rec.payload = out.payload.dump();
    return out;
}

lang::Profile profile_from_json(const nlohmann::json& j, const lang::Profile& base)
{
    if (j.is_null())
        return base;
    if (!j.is_object())
        throw InvalidProfile(std::vector<lang::FieldError>{{"profile", "must be an object"}});
    std::vector<lang::FieldError> errors;
    lang::Profile p = base;
    if (auto it = j.find("preset"); it != j.end()) {
        const ProfilePreset* preset = it->is_string() ? find_preset(it->get<std::string>()) : nullptr;
        if (preset)
            p = preset->profile;
        else
            errors.push_back({"preset", "unknown preset"});
    }
    if (auto it = j.find("tool"); it != j.end()) {
        auto tool = it->is_string() ? lang::tool_from_string(it->get<std::string>()) : std::nullopt;
        if (tool)
            p.tool = *tool;
        else
            errors.push_back({"tool", "must be one of simulate, peak, time"});
    }
    auto integer = [&](const char* key, int& slot) {
        auto it = j.find(key);
        if (it == j.end())
            return;
        if (!it->is_number_integer() || it->get<std::int64_t>() < std::numeric_limits<int>::min() ||
            it->get<std::int64_t>() > std::numeric_limits<int>::max())
            errors.push_back({key, "must be an integer"});
        else
            slot = it->get<int>();
    };
    integer("efficiency", p.efficiency_pct);
    integer("availability", p.availability_pct);
    integer("cases", p.conc_cases);
    integer("sims", p.num_sims);
    if (auto it = j.find("seed"); it != j.end()) {
        if (it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0))
            p.seed = it->get<std::uint64_t>();
        else
            errors.push_back({"seed", "must be a non-negative integer"});
    }
    for (auto& e : lang::validate(p))
        if (std::none_of(errors.begin(), errors.end(), [&](const lang::FieldError& x) { return x.field == e.field; }))
            errors.push_back(std::move(e));
    if (!errors.empty())
        throw InvalidProfile(std::move(errors));
    return p;
}

std::string utc_timestamp()
{
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace rpl::bench
