#pragma once

#include "rpl/bench/store.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

namespace rpl::bench {

struct ServiceConfig {
    std::filesystem::path models_dir = RPL_MODELS_DIR;
    std::chrono::milliseconds timeout{60000};
};

/// HTTP/JSON API over a run store.
///
///   GET  /api/examples            example model names
///   GET  /api/examples/{name}     {name, source}
///   GET  /api/presets             profile presets
///   POST /api/runs                {source, fileName, tool?, profile} -> 201 result
///   GET  /api/runs                overview rows, newest first
///   GET  /api/runs/{execId}       stored result, verbatim
///   GET  /api/charts              average time / cost series
///   GET  /api/outline?source=...  outline entries
class Service {
public:
    explicit Service(RunStore& store, ServiceConfig config = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws rpl::Error when binding fails.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread until stop().
    bool listen(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace rpl::bench
