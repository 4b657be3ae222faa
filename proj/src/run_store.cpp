#include "paretoset/run_store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>

namespace paretoset {

void atomic_write(const fs::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
             << counter++;
    const fs::path tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LoadError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw LoadError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::string metrics_csv(const std::vector<IterationMetrics>& rows) {
    std::ostringstream out;
    out << "iter,evals,hvd_archive,igd_archive,hvd_model,igd_model,wall_ms_model,wall_ms_select\n";
    out << std::setprecision(10);
    auto cell = [&](double v) {
        if (std::isfinite(v)) out << v;
    };
    for (const auto& r : rows) {
        out << r.iteration << ',' << r.evals << ',';
        cell(r.hvd_archive);
        out << ',';
        cell(r.igd_archive);
        out << ',';
        cell(r.hvd_model);
        out << ',';
        cell(r.igd_model);
        out << ',';
        cell(r.wall_ms_model);
        out << ',';
        cell(r.wall_ms_select);
        out << '\n';
    }
    return out.str();
}

RunStore RunStore::create(const fs::path& dir, const RunConfig& cfg, const Vector& hv_ref) {
    if (fs::exists(dir / "run.json")) throw DomainError("run directory already holds a run: " + dir.string());
    fs::create_directories(dir);
    nlohmann::json meta{{"id", dir.filename().string()}, {"config", to_json(cfg)}, {"hv_ref", to_std(hv_ref)}};
    atomic_write(dir / "run.json", meta.dump(2));
    return open(dir);
}

RunStore RunStore::open(const fs::path& dir) {
    if (!fs::exists(dir / "run.json")) throw LoadError("not a run directory: " + dir.string());
    RunStore s;
    s.dir_ = dir;
    const auto meta = read_json(dir / "run.json");
    s.config_ = run_config_from_json(meta.at("config"));
    s.hv_ref_ = from_std(meta.at("hv_ref").get<std::vector<double>>());
    return s;
}

fs::path RunStore::fresh_dir(const fs::path& root, const std::string& base) {
    fs::path p = root / base;
    for (int i = 2; fs::exists(p); ++i) p = root / (base + "-" + std::to_string(i));
    return p;
}

std::vector<int> RunStore::iterations() const {
    static const std::regex pattern(R"(iter_(\d+)\.json)");
    std::vector<int> out;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        std::smatch m;
        const auto name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) out.push_back(std::stoi(m[1].str()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int RunStore::latest_iteration() const {
    const auto its = iterations();
    return its.empty() ? -1 : its.back();
}

void RunStore::write(const IterationSnapshot& snap, const TrainLog* log) const {
    nlohmann::json j{{"iteration", snap.iteration}, {"archive", to_json(snap.archive)},
                     {"hv_ref", to_std(snap.hv_ref)}, {"gp_train_count", snap.gp_train_count}};
    j["metrics"] = nlohmann::json::array();
    for (const auto& met : snap.metrics) j["metrics"].push_back(to_json(met));
    j["gp_hyper"] = nlohmann::json::array();
    for (const auto& h : snap.gp_hyper) j["gp_hyper"].push_back(to_json(h));
    j["norm"] = snap.norm ? nlohmann::json{{"lower", to_std(snap.norm->lower)}, {"upper", to_std(snap.norm->upper)}}
                          : nlohmann::json(nullptr);
    if (snap.model) {
        const std::string name = "model_" + std::to_string(snap.iteration) + ".json";
        atomic_write(dir_ / name, to_json(*snap.model).dump());
        j["model"] = name;
    } else {
        j["model"] = nullptr;
    }
    if (log && !log->rows.empty()) log->append_csv((dir_ / "train_log.csv").string(), snap.iteration);
    atomic_write(dir_ / "metrics.csv", metrics_csv(snap.metrics));
    atomic_write(dir_ / ("iter_" + std::to_string(snap.iteration) + ".json"), j.dump());
}

IterationSnapshot RunStore::load(int iteration) const {
    const auto path = dir_ / ("iter_" + std::to_string(iteration) + ".json");
    if (!fs::exists(path)) throw LoadError("no snapshot for iteration " + std::to_string(iteration) + " in " + dir_.string());
    const auto j = read_json(path);
    const auto spec = make_problem(config_.problem);
    IterationSnapshot s;
    try {
        s.iteration = j.at("iteration").get<int>();
        s.archive = archive_from_json(j.at("archive"), spec.n, spec.m);
        for (const auto& met : j.at("metrics")) s.metrics.push_back(metrics_from_json(met));
        for (const auto& h : j.at("gp_hyper")) s.gp_hyper.push_back(gp_hyper_from_json(h));
        s.gp_train_count = j.at("gp_train_count").get<Eigen::Index>();
        s.hv_ref = from_std(j.at("hv_ref").get<std::vector<double>>());
        if (!j.at("norm").is_null())
            s.norm = NormalizationState{from_std(j["norm"].at("lower").get<std::vector<double>>()),
                                        from_std(j["norm"].at("upper").get<std::vector<double>>())};
        if (!j.at("model").is_null()) s.model = set_model_from_json(read_json(dir_ / j["model"].get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("malformed snapshot " + path.string() + ": " + e.what());
    }
    return s;
}

IterationSnapshot RunStore::load_latest() const {
    const int k = latest_iteration();
    if (k < 0) throw LoadError("run has no snapshots: " + dir_.string());
    return load(k);
}

std::vector<RunStore> list_runs(const fs::path& root) {
    std::vector<RunStore> out;
    if (!fs::is_directory(root)) return out;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "run.json")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
        try {
            out.push_back(RunStore::open(d));
        } catch (const std::exception&) {
            // Half-written or foreign directories are skipped.
        }
    }
    return out;
}

} // namespace paretoset
