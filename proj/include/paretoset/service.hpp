#pragma once

#include "paretoset/problems.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace paretoset {

// HTTP/JSON front end over a directory of runs. Reads come from immutable snapshots on
// disk; `step` advances one run at a time in a background thread.
class RunService {
public:
    explicit RunService(std::filesystem::path runs_dir, std::filesystem::path data_dir = default_data_dir());
    ~RunService();
    RunService(const RunService&) = delete;
    RunService& operator=(const RunService&) = delete;

    // Blocks until stop(); returns false when the socket cannot be bound.
    bool listen(const std::string& host, int port);
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

    // Waits for a run's background step, if any.
    void join_step(const std::string& id);

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace paretoset
