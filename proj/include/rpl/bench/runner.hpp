#pragma once

#include "rpl/bench/store.hpp"
#include "rpl/lang/profile.hpp"
#include "rpl/parse/diagnostics.hpp"
#include "rpl/sim/machine.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace rpl::bench {

/// The source does not parse or names an unknown placeholder.
class SourceRejected : public Error {
public:
    explicit SourceRejected(std::vector<parse::Diagnostic> diags);
    const std::vector<parse::Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    std::vector<parse::Diagnostic> diags_;
};

class InvalidProfile : public Error {
public:
    explicit InvalidProfile(std::vector<lang::FieldError> fields);
    const std::vector<lang::FieldError>& fields() const noexcept { return fields_; }

private:
    std::vector<lang::FieldError> fields_;
};

struct RunRequest {
    std::string source;
    std::string file;
    lang::Profile profile;  // profile.tool selects the tool
};

struct RunOptions {
    std::chrono::milliseconds timeout{60000};
    std::uint64_t salt = 0;
    sim::DeadlineAnchor anchor = sim::DeadlineAnchor::Enable;
    sim::ReadyPolicy ready_policy = sim::ReadyPolicy::Random;
    bool exact_peak = true;
};

struct RunOutcome {
    nlohmann::ordered_json payload;
    RunRecord record;
};

/// Runs the selected tool synchronously. Throws SourceRejected,
/// InvalidProfile, sim::SimulationError (Timeout once the wall-clock limit
/// passes) or AnalysisError.
RunOutcome execute(const RunRequest& request, const RunOptions& options = {});

/// Reads {preset, tool, efficiency, availability, cases, sims, seed}; every
/// key is optional and falls back to the preset, then to `base`.
/// Throws InvalidProfile.
lang::Profile profile_from_json(const nlohmann::json& j, const lang::Profile& base = {});

/// ISO 8601, UTC, second precision.
std::string utc_timestamp();

} // namespace rpl::bench
