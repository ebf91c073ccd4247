#pragma once

#include "rpl/lang/preprocess.hpp"
#include "rpl/parse/parser.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rpl::test {

inline std::filesystem::path models_dir() { return RPL_MODELS_DIR; }

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string model_source(const std::string& name) { return read_text(models_dir() / name); }

inline lang::Program parse_text(const std::string& text)
{
    auto r = parse::parse(text);
    if (!r.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : r.diagnostics)
            msg += " " + parse::format(d);
        throw std::runtime_error(msg);
    }
    return std::move(*r.program);
}

/// Placeholders substituted from `profile`.
inline lang::Program load_model(const std::string& name, const lang::Profile& profile = {})
{
    return parse_text(lang::preprocess(model_source(name), profile));
}

/// Placeholders kept symbolic.
inline lang::Program load_raw(const std::string& name) { return parse_text(model_source(name)); }

inline lang::Profile profile_of(int efficiency, int availability, int cases, int sims = 1, std::uint64_t seed = 0)
{
    lang::Profile p;
    p.efficiency_pct = efficiency;
    p.availability_pct = availability;
    p.conc_cases = cases;
    p.num_sims = sims;
    p.seed = seed;
    return p;
}

} // namespace rpl::test
