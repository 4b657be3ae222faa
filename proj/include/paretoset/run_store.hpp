#pragma once

#include "paretoset/mobo.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace paretoset {

namespace fs = std::filesystem;

// Writes to a sibling temp file, then renames over the target.
void atomic_write(const fs::path& path, std::string_view content);

nlohmann::json read_json(const fs::path& path);

// Header plus one row per iteration; non-finite cells are left empty.
std::string metrics_csv(const std::vector<IterationMetrics>& rows);

// On-disk layout of one run:
//   run.json            config, problem, hypervolume reference
//   iter_<k>.json       archive, metrics so far, surrogate hyperparameters, model reference
//   model_<k>.json      set-model parameters trained at iteration k (k >= 1)
//   metrics.csv         one row per iteration
class RunStore {
public:
    static RunStore create(const fs::path& dir, const RunConfig& cfg, const Vector& hv_ref);
    static RunStore open(const fs::path& dir);

    // Picks `<root>/<base>`, or `<root>/<base>-<i>` when taken.
    static fs::path fresh_dir(const fs::path& root, const std::string& base);

    const fs::path& dir() const { return dir_; }
    std::string id() const { return dir_.filename().string(); }
    const RunConfig& config() const { return config_; }
    const Vector& hv_ref() const { return hv_ref_; }

    std::vector<int> iterations() const;
    // -1 when no snapshot has been written.
    int latest_iteration() const;

    // iter_<k>.json goes last, so a visible snapshot always has its model and metrics.
    void write(const IterationSnapshot& snap, const TrainLog* log = nullptr) const;
    IterationSnapshot load(int iteration) const;
    IterationSnapshot load_latest() const;

private:
    RunStore() = default;
    fs::path dir_;
    RunConfig config_;
    Vector hv_ref_;
};

// Run directories directly under `root`, sorted by name.
std::vector<RunStore> list_runs(const fs::path& root);

} // namespace paretoset
