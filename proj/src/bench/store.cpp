#include "rpl/bench/store.hpp"
#include "rpl/bench/chart.hpp"
#include "rpl/sim/simulator.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>

namespace rpl::bench {

using nlohmann::ordered_json;

ordered_json to_json(const RunRecord& r)
{
    return {{"execId", r.exec_id},
            {"sourceFileName", r.file},
            {"tool", r.tool},
            {"numSims", r.num_sims},
            {"efficiencyPct", r.efficiency_pct},
            {"availabilityPct", r.availability_pct},
            {"concCases", r.conc_cases},
            {"timeStats", r.time_stats},
            {"costStats", r.cost_stats},
            {"createdAt", r.created_at},
            {"payload", r.payload}};
}

RunRecord record_from_json(const nlohmann::ordered_json& j)
{
    RunRecord r;
    r.exec_id = j.at("execId").get<std::string>();
    r.file = j.at("sourceFileName").get<std::string>();
    r.tool = j.at("tool").get<std::string>();
    r.num_sims = j.at("numSims").get<int>();
    r.efficiency_pct = j.at("efficiencyPct").get<int>();
    r.availability_pct = j.at("availabilityPct").get<int>();
    r.conc_cases = j.at("concCases").get<int>();
    r.time_stats = j.at("timeStats");
    r.cost_stats = j.at("costStats");
    r.created_at = j.at("createdAt").get<std::string>();
    r.payload = j.at("payload").get<std::string>();
    if (r.exec_id.empty())
        throw Error("empty execId");
    return r;
}

namespace {

ordered_json display_stats(const ordered_json& stats)
{
    if (stats.is_null())
        return nullptr;
    return {{"min", stats.at("min")},
            {"max", stats.at("max")},
            {"avg", sim::format_fixed(parse_rational(stats.at("avg").get<std::string>()))}};
}

} // namespace

ordered_json overview_row(const RunRecord& r)
{
    return {{"execId", r.exec_id},
            {"file", r.file},
            {"executions", r.num_sims},
            {"efficiency", r.efficiency_pct},
            {"availability", r.availability_pct},
            {"cases", r.conc_cases},
            {"time", display_stats(r.time_stats)},
            {"cost", display_stats(r.cost_stats)},
            {"tool", r.tool}};
}

RunStore::RunStore() = default;

RunStore::RunStore(std::filesystem::path journal, Warn warn) : path_(std::move(journal)), warn_(std::move(warn))
{
    if (path_.empty())
        return;
    if (path_.has_parent_path())
        std::filesystem::create_directories(path_.parent_path());
    load();
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw Error("cannot open run store " + path_.string() + ": " + std::strerror(errno));
    // a torn final line must not swallow the next record
    std::ifstream in(path_, std::ios::binary | std::ios::ate);
    if (in.tellg() > 0) {
        in.seekg(-1, std::ios::end);
        if (in.get() != '\n' && ::write(fd_, "\n", 1) != 1)
            throw Error("cannot write run store " + path_.string());
    }
}

RunStore::~RunStore()
{
    if (fd_ >= 0)
        ::close(fd_);
}

void RunStore::warn(std::string message)
{
    if (warn_)
        warn_(message);
    else
        std::cerr << "warning: " << message << '\n';
    warnings_.push_back(std::move(message));
}

void RunStore::load()
{
    std::ifstream in(path_);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            RunRecord r = record_from_json(ordered_json::parse(line));
            if (index_.count(r.exec_id)) {
                warn(path_.string() + ":" + std::to_string(number) + ": duplicate record " + r.exec_id + " skipped");
                continue;
            }
            index_.emplace(r.exec_id, records_.size());
            records_.push_back(std::move(r));
        } catch (const std::exception& e) {
            warn(path_.string() + ":" + std::to_string(number) + ": corrupt record skipped (" + e.what() + ")");
        }
    }
}

void RunStore::append(const RunRecord& record)
{
    std::unique_lock lock(mu_);
    if (index_.count(record.exec_id))
        throw DuplicateExecId(record.exec_id);
    if (fd_ >= 0) {
        std::string line = to_json(record).dump() + "\n";
        std::size_t done = 0;
        while (done < line.size()) {
            ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0)
                throw Error("cannot write run store " + path_.string() + ": " + std::strerror(errno));
            done += static_cast<std::size_t>(n);
        }
        if (::fsync(fd_) != 0)
            throw Error("cannot sync run store " + path_.string() + ": " + std::strerror(errno));
    }
    index_.emplace(record.exec_id, records_.size());
    records_.push_back(record);
}

std::vector<RunRecord> RunStore::list() const
{
    std::shared_lock lock(mu_);
    return records_;
}

std::optional<RunRecord> RunStore::get(std::string_view exec_id) const
{
    std::shared_lock lock(mu_);
    auto it = index_.find(std::string(exec_id));
    if (it == index_.end())
        return std::nullopt;
    return records_[it->second];
}

bool RunStore::contains(std::string_view exec_id) const
{
    std::shared_lock lock(mu_);
    return index_.count(std::string(exec_id)) != 0;
}

std::size_t RunStore::size() const
{
    std::shared_lock lock(mu_);
    return records_.size();
}

std::vector<std::string> RunStore::warnings() const
{
    std::shared_lock lock(mu_);
    return warnings_;
}

} // namespace rpl::bench
