#include "paretoset/service.hpp"

#include "paretoset/run_store.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace paretoset {

namespace {

// A loaded iteration with its rebuilt surrogate. Never mutated after construction.
struct ServedSnapshot {
    IterationSnapshot snap;
    std::optional<GpSurrogate> gp;
};

} // namespace

class RunService::Impl {
public:
    Impl(fs::path runs_dir, fs::path data_dir)
        : root_(std::move(runs_dir)), data_dir_(std::move(data_dir)) {
        routes();
    }
    ~Impl() { stop(); }

    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    int bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

    void stop() {
        server_.stop();
        std::vector<std::thread> workers;
        {
            std::lock_guard lock(mu_);
            for (auto& [id, st] : steppers_)
                if (st.worker.joinable()) workers.push_back(std::move(st.worker));
        }
        for (auto& w : workers) w.join();
    }

    void join_step(const std::string& id) {
        std::thread worker;
        {
            std::lock_guard lock(mu_);
            auto it = steppers_.find(id);
            if (it == steppers_.end() || !it->second.worker.joinable()) return;
            worker = std::move(it->second.worker);
        }
        worker.join();
    }

private:
    struct Stepper {
        bool running = false;
        std::string error;
        std::thread worker;
    };

    static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }
    static void send_error(httplib::Response& res, int status, const std::string& message) {
        send_json(res, status, {{"error", message}});
    }

    std::optional<RunStore> find_run(const std::string& id) const {
        if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) return std::nullopt;
        const auto dir = root_ / id;
        if (!fs::exists(dir / "run.json")) return std::nullopt;
        return RunStore::open(dir);
    }

    std::shared_ptr<const ServedSnapshot> snapshot(const RunStore& store, int iteration) {
        const auto key = store.id() + "#" + std::to_string(iteration);
        {
            std::lock_guard lock(cache_mu_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        auto served = std::make_shared<ServedSnapshot>();
        served->snap = store.load(iteration);
        if (!served->snap.gp_hyper.empty())
            served->gp = served->snap.surrogate(make_problem(store.config().problem), store.config().gp);
        std::lock_guard lock(cache_mu_);
        return cache_.emplace(key, std::move(served)).first->second;
    }

    // Resolves the `iter` query parameter (default latest); writes an error response on failure.
    std::optional<int> pick_iteration(const RunStore& store, const httplib::Request& req, httplib::Response& res,
                                      const nlohmann::json* body = nullptr) const {
        const int latest = store.latest_iteration();
        if (latest < 0) {
            send_error(res, 404, "run has no snapshots yet");
            return std::nullopt;
        }
        int k = latest;
        try {
            if (req.has_param("iter")) k = std::stoi(req.get_param_value("iter"));
            else if (body && body->contains("iteration") && !(*body)["iteration"].is_null())
                k = (*body)["iteration"].get<int>();
        } catch (const std::exception&) {
            send_error(res, 400, "iteration must be an integer");
            return std::nullopt;
        }
        if (k < 0 || k > latest) {
            send_error(res, 404, "iteration " + std::to_string(k) + " not available (latest " + std::to_string(latest) + ")");
            return std::nullopt;
        }
        return k;
    }

    nlohmann::json status_json(const RunStore& store) {
        std::lock_guard lock(mu_);
        nlohmann::json j{{"id", store.id()}, {"iteration", store.latest_iteration()}, {"state", "idle"}};
        if (auto it = steppers_.find(store.id()); it != steppers_.end()) {
            if (it->second.running) j["state"] = "stepping";
            else if (!it->second.error.empty()) {
                j["state"] = "failed";
                j["error"] = it->second.error;
            }
        }
        return j;
    }

    void step_worker(RunStore store) {
        std::string error;
        try {
            const auto spec = make_problem(store.config().problem);
            MoboRunner runner(store.config(), ground_truth(spec, data_dir_).points, store.load_latest());
            TrainLog log;
            runner.step(&log);
            store.write(runner.snapshot(), &log);
        } catch (const std::exception& e) {
            error = e.what();
        }
        std::lock_guard lock(mu_);
        auto& st = steppers_[store.id()];
        st.running = false;
        st.error = error;
    }

    void routes() {
        server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                     {"Access-Control-Allow-Headers", "Content-Type"}});
        server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const DomainError& e) {
                send_error(res, 400, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            }
        });

        server_.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
            auto out = nlohmann::json::array();
            for (const auto& s : list_runs(root_))
                out.push_back({{"id", s.id()}, {"problem", to_string(s.config().problem)},
                               {"iteration", s.latest_iteration()}});
            send_json(res, 200, out);
        });

        server_.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            nlohmann::json j{{"id", store->id()}, {"config", to_json(store->config())},
                             {"hv_ref", to_std(store->hv_ref())}, {"iteration", store->latest_iteration()},
                             {"metrics", nlohmann::json::array()}};
            if (store->latest_iteration() >= 0)
                for (const auto& met : snapshot(*store, store->latest_iteration())->snap.metrics)
                    j["metrics"].push_back(to_json(met));
            send_json(res, 200, j);
        });

        server_.Get(R"(/api/runs/([^/]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            send_json(res, 200, status_json(*store));
        });

        server_.Get(R"(/api/runs/([^/]+)/archive)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            const auto k = pick_iteration(*store, req, res);
            if (!k) return;
            auto j = to_json(snapshot(*store, *k)->snap.archive);
            j["iteration_of_snapshot"] = *k;
            send_json(res, 200, j);
        });

        server_.Get(R"(/api/runs/([^/]+)/truth)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            const auto truth = ground_truth(make_problem(store->config().problem), data_dir_);
            send_json(res, 200, {{"f", detail::matrix_columns(truth.points)}});
        });

        server_.Get(R"(/api/runs/([^/]+)/front)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            const auto k = pick_iteration(*store, req, res);
            if (!k) return;
            int count = 100;
            try {
                if (req.has_param("count")) count = std::stoi(req.get_param_value("count"));
            } catch (const std::exception&) {
                return send_error(res, 400, "count must be an integer");
            }
            if (count < 1 || count > 10000) return send_error(res, 400, "count must lie in [1, 10000]");
            const auto served = snapshot(*store, *k);
            if (!served->snap.model) return send_error(res, 409, "iteration " + std::to_string(*k) + " has no trained model");
            const auto spec = make_problem(store->config().problem);
            const auto fs_ = sample_front(*served->snap.model, *served->gp, spec, count, mix_seed(store->config().seed, 77));
            const Matrix sd = served->gp->std_batch(fs_.designs);
            auto points = nlohmann::json::array();
            for (Eigen::Index c = 0; c < fs_.designs.cols(); ++c)
                points.push_back({{"w", to_std(fs_.preferences.col(c))}, {"x", to_std(fs_.designs.col(c))},
                                  {"f_surrogate_mean", to_std(fs_.predicted.col(c))},
                                  {"f_surrogate_std", to_std(sd.col(c))},
                                  {"f_true", to_std(fs_.true_objectives->col(c))}});
            send_json(res, 200, {{"iteration", *k}, {"points", points}});
        });

        server_.Post(R"(/api/runs/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::exception&) {
                return send_error(res, 400, "request body is not valid JSON");
            }
            if (!body.is_object() || !body.contains("w") || !body["w"].is_array())
                return send_error(res, 400, "request needs a numeric array 'w'");
            std::vector<double> raw;
            try {
                raw = body["w"].get<std::vector<double>>();
            } catch (const nlohmann::json::exception&) {
                return send_error(res, 400, "'w' must contain numbers only");
            }
            const auto k = pick_iteration(*store, req, res, &body);
            if (!k) return;
            const auto spec = make_problem(store->config().problem);
            Vector w;
            try {
                w = validate_preference(from_std(raw), spec.m);
            } catch (const DomainError& e) {
                return send_error(res, 400, e.what());
            }
            const auto served = snapshot(*store, *k);
            if (!served->snap.model) return send_error(res, 409, "iteration " + std::to_string(*k) + " has no trained model");
            const Vector x = served->snap.model->forward(w);
            const auto pred = served->gp->predict(x);
            send_json(res, 200, {{"iteration", *k}, {"w", to_std(w)}, {"x", to_std(x)},
                                 {"f_surrogate_mean", to_std(pred.mean)}, {"f_surrogate_std", to_std(pred.std)},
                                 {"f_true", to_std(evaluate(spec, x))}});
        });

        server_.Post(R"(/api/runs/([^/]+)/step)", [this](const httplib::Request& req, httplib::Response& res) {
            auto store = find_run(req.matches[1]);
            if (!store) return send_error(res, 404, "unknown run");
            if (store->latest_iteration() < 0) return send_error(res, 409, "run has no initial snapshot");
            std::lock_guard lock(mu_);
            auto& st = steppers_[store->id()];
            if (st.running) return send_error(res, 409, "a step is already in progress");
            if (st.worker.joinable()) st.worker.join();
            st.running = true;
            st.error.clear();
            const int target = store->latest_iteration() + 1;
            st.worker = std::thread(&Impl::step_worker, this, *store);
            send_json(res, 202, {{"state", "stepping"}, {"target_iteration", target}});
        });
    }

    fs::path root_;
    fs::path data_dir_;
    httplib::Server server_;
    std::mutex mu_;
    std::map<std::string, Stepper> steppers_;
    std::mutex cache_mu_;
    std::map<std::string, std::shared_ptr<const ServedSnapshot>> cache_;
};

RunService::RunService(fs::path runs_dir, fs::path data_dir)
    : impl_(std::make_unique<Impl>(std::move(runs_dir), std::move(data_dir))) {}
RunService::~RunService() = default;

bool RunService::listen(const std::string& host, int port) { return impl_->listen(host, port); }
int RunService::bind_any_port(const std::string& host) { return impl_->bind_any_port(host); }
bool RunService::listen_after_bind() { return impl_->listen_after_bind(); }
void RunService::wait_until_ready() const { impl_->wait_until_ready(); }
void RunService::stop() { impl_->stop(); }
void RunService::join_step(const std::string& id) { impl_->join_step(id); }

} // namespace paretoset
