#pragma once

#include "rpl/lang/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rpl::bench {

class DuplicateExecId : public Error {
public:
    explicit DuplicateExecId(const std::string& id) : Error("duplicate execution id " + id), id_(id) {}
    const std::string& exec_id() const noexcept { return id_; }

private:
    std::string id_;
};

/// One completed tool run. Stats objects hold {min, max, avg} with avg as an
/// exact rational string; they are null for tools without time/cost stats.
struct RunRecord {
    std::string exec_id;
    std::string file;
    std::string tool;
    int num_sims = 1;
    int efficiency_pct = 100;
    int availability_pct = 100;
    int conc_cases = 1;
    nlohmann::ordered_json time_stats;
    nlohmann::ordered_json cost_stats;
    std::string created_at;
    std::string payload;  // result JSON text, kept verbatim

    bool operator==(const RunRecord&) const = default;
};

nlohmann::ordered_json to_json(const RunRecord& r);
/// Throws on a malformed record.
RunRecord record_from_json(const nlohmann::ordered_json& j);

/// The eight overview columns plus the tool name; averages to two decimals.
nlohmann::ordered_json overview_row(const RunRecord& r);

/// Append-only JSON-lines journal. An empty path keeps records in memory only.
class RunStore {
public:
    using Warn = std::function<void(const std::string&)>;

    RunStore();
    explicit RunStore(std::filesystem::path journal, Warn warn = {});
    ~RunStore();
    RunStore(const RunStore&) = delete;
    RunStore& operator=(const RunStore&) = delete;

    /// Durable once it returns. Throws DuplicateExecId.
    void append(const RunRecord& record);

    std::vector<RunRecord> list() const;
    std::optional<RunRecord> get(std::string_view exec_id) const;
    bool contains(std::string_view exec_id) const;
    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }
    std::vector<std::string> warnings() const;

private:
    std::filesystem::path path_;
    Warn warn_;
    int fd_ = -1;
    mutable std::shared_mutex mu_;
    std::vector<RunRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> warnings_;

    void load();
    void warn(std::string message);
};

} // namespace rpl::bench
