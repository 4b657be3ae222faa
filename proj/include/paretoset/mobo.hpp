#pragma once

#include "paretoset/common.hpp"
#include "paretoset/metrics.hpp"
#include "paretoset/problems.hpp"
#include "paretoset/surrogate.hpp"
#include "paretoset/trainer.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <random>

namespace paretoset {

// Evaluated samples in insertion order, one column per record.
class Archive {
public:
    Archive() = default;
    Archive(int n, int m) : xs_(n, 0), fs_(m, 0) {}

    int dim() const { return static_cast<int>(xs_.rows()); }
    int num_objectives() const { return static_cast<int>(fs_.rows()); }
    Eigen::Index size() const { return xs_.cols(); }
    const Matrix& designs() const { return xs_; }
    const Matrix& objectives() const { return fs_; }
    const std::vector<int>& iterations() const { return iters_; }

    bool contains(const Eigen::Ref<const Vector>& x, double tol = 1e-9) const {
        for (Eigen::Index j = 0; j < size(); ++j)
            if ((xs_.col(j) - x).norm() <= tol) return true;
        return false;
    }

    // Returns false and leaves the archive unchanged when x duplicates a stored design.
    bool add(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& f, int iteration) {
        if (x.size() != xs_.rows() || f.size() != fs_.rows()) throw DomainError("archive record dimension mismatch");
        if (contains(x)) return false;
        xs_.conservativeResize(Eigen::NoChange, size() + 1);
        fs_.conservativeResize(Eigen::NoChange, fs_.cols() + 1);
        xs_.col(size() - 1) = x;
        fs_.col(fs_.cols() - 1) = f;
        iters_.push_back(iteration);
        return true;
    }

    std::vector<bool> nondominated() const { return nondominated_mask(fs_); }
    Matrix front() const { return nondominated_filter(fs_); }

    // Prefix of the first `count` records.
    Archive head(Eigen::Index count) const {
        Archive a(dim(), num_objectives());
        a.xs_ = xs_.leftCols(count);
        a.fs_ = fs_.leftCols(count);
        a.iters_.assign(iters_.begin(), iters_.begin() + count);
        return a;
    }

private:
    Matrix xs_;
    Matrix fs_;
    std::vector<int> iters_;
};

struct RunConfig {
    ProblemId problem = ProblemId::ZDT3;
    int n_init = 20;
    int batch_size = 10;
    int n_iterations = 20;
    TrainConfig train;
    GpConfig gp;
    std::uint64_t seed = 0;
    bool warm_start = false;        // keep the set model and GP hyperparameters across iterations
    int eval_ref_per_objective = 8;
    int front_samples = 100;
    double ideal_margin = 0.0;      // normalization lower bound = ideal - margin * (nadir - ideal)

    void validate() const {
        if (n_init < 2) throw DomainError("n_init must be >= 2");
        if (batch_size < 1) throw DomainError("batch size must be >= 1");
        if (n_iterations < 0) throw DomainError("iteration count must be >= 0");
        if (eval_ref_per_objective < 1) throw DomainError("eval_ref_per_objective must be >= 1");
        if (front_samples < 1) throw DomainError("front_samples must be >= 1");
        if (!(ideal_margin >= 0.0)) throw DomainError("ideal_margin must be >= 0");
        train.validate();
        gp.validate();
    }
};

// Reduced budget for single-core machines: narrower model, smaller inner search, shorter fits.
inline RunConfig fast_preset(RunConfig c) {
    c.train.iterations = 50;
    c.train.hidden_width = 64;
    c.train.learning_rate = 3e-3;
    c.train.cem.samples = 200;
    c.train.cem.elites = 20;
    c.train.cem.iterations = 3;
    c.gp.hyperopt_iterations = 50;
    c.gp.hyperopt_restarts = 1;
    c.warm_start = true;
    return c;
}

// Latin hypercube: each of the n_init strata per dimension is hit exactly once.
inline Matrix initial_design(const ProblemSpec& spec, int n_init, std::mt19937_64& rng) {
    if (n_init < 1) throw DomainError("initial design needs at least one point");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix x(spec.n, n_init);
    std::vector<int> perm(static_cast<std::size_t>(n_init));
    for (int d = 0; d < spec.n; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int j = 0; j < n_init; ++j) {
            const double u = (perm[static_cast<std::size_t>(j)] + unit(rng)) / n_init;
            x(d, j) = spec.lower[d] + u * (spec.upper[d] - spec.lower[d]);
        }
    }
    return x;
}

struct BatchSelection {
    Matrix designs;                 // n x batch
    std::vector<int> source_ref;    // reference point index per design, -1 for random fill
    int random_fill = 0;
};

// Ranks each reference point's candidates (final elites plus w*) by the penalized loss and
// picks them round-robin, best reference points first, skipping near-duplicates.
template <ObjectiveModel Obj>
BatchSelection select_batch(const SetModel& model, const Obj& obj, const NormalizationState& norm,
                            const std::vector<ReferencePoint>& refs, int batch_size, const Matrix& archive_x,
                            const TrainConfig& cfg, std::mt19937_64& rng, double dup_tol = 1e-6) {
    if (batch_size < 1) throw DomainError("batch size must be >= 1");
    const int m = model.input_dim();
    const Vector lower = model.lower();
    const Vector range = model.upper() - model.lower();
    const auto& sc = cfg.scalarization;

    struct Ranked {
        std::vector<std::pair<double, Vector>> items;   // (Q, x) ascending
        std::size_t next = 0;
    };
    std::vector<Ranked> ranked(refs.size());
    for (std::size_t r = 0; r < refs.size(); ++r) {
        const Vector& z = refs[r].z;
        Matrix ws;
        if (cfg.random_preferences) {
            ws = sample_simplex(m, cfg.cem.elites + 1, rng);
        } else {
            auto score = [&](const Matrix& cand) { return detail::score_preferences(model, obj, norm, sc, z, cand); };
            auto res = cem_optimize(score, m, cfg.cem, CemState::initial(m, cfg.cem.init_std), rng);
            ws.resize(m, res.elites.cols() + 1);
            ws << res.w_star, res.elites;
        }
        const Matrix xs = model.forward_batch(ws);
        const Matrix fn = norm.normalize(obj.values(xs));
        for (Eigen::Index c = 0; c < ws.cols(); ++c) {
            double q = scalarize(sc, fn.col(c), ws.col(c), z);
            if (sc.lambda > 0.0 && ws.cols() > 1) {
                double total = 0.0;
                for (Eigen::Index e = 0; e < ws.cols(); ++e)
                    if (e != c) total += cone_penalty(fn.col(e), fn.col(c), z, sc.half_apex).value;
                q += sc.lambda * total / static_cast<double>(ws.cols() - 1);
            }
            if (!std::isfinite(q)) q = std::numeric_limits<double>::infinity();
            ranked[r].items.emplace_back(q, xs.col(c));
        }
        std::stable_sort(ranked[r].items.begin(), ranked[r].items.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    std::vector<std::size_t> order(refs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranked[a].items.front().first < ranked[b].items.front().first;
    });

    BatchSelection out;
    out.designs.resize(model.output_dim(), 0);
    std::vector<Vector> chosen_unit;
    const Matrix archive_unit = (archive_x.colwise() - lower).array().colwise() / range.array();
    auto is_duplicate = [&](const Vector& x) {
        const Vector u = (x - lower).cwiseQuotient(range);
        for (Eigen::Index j = 0; j < archive_unit.cols(); ++j)
            if ((archive_unit.col(j) - u).norm() < dup_tol) return true;
        for (const auto& c : chosen_unit)
            if ((c - u).norm() < dup_tol) return true;
        return false;
    };
    auto push = [&](const Vector& x, int source) {
        chosen_unit.push_back((x - lower).cwiseQuotient(range));
        out.designs.conservativeResize(Eigen::NoChange, out.designs.cols() + 1);
        out.designs.col(out.designs.cols() - 1) = x;
        out.source_ref.push_back(source);
    };

    bool progress = true;
    while (static_cast<int>(out.designs.cols()) < batch_size && progress) {
        progress = false;
        for (std::size_t r : order) {
            if (static_cast<int>(out.designs.cols()) >= batch_size) break;
            auto& rk = ranked[r];
            while (rk.next < rk.items.size()) {
                const auto& cand = rk.items[rk.next++].second;
                if (!is_duplicate(cand)) {
                    push(cand, static_cast<int>(r));
                    progress = true;
                    break;
                }
            }
        }
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(out.designs.cols()) < batch_size) {
        Vector x(model.output_dim());
        for (Eigen::Index d = 0; d < x.size(); ++d) x[d] = lower[d] + unit(rng) * range[d];
        if (is_duplicate(x)) continue;
        push(x, -1);
        ++out.random_fill;
    }
    return out;
}

// Metrics of one iteration; model entries are NaN at the initial design.
struct IterationMetrics {
    int iteration = 0;
    Eigen::Index evals = 0;
    double hvd_archive = 0.0;
    double igd_archive = 0.0;
    double hvd_model = std::numeric_limits<double>::quiet_NaN();
    double igd_model = std::numeric_limits<double>::quiet_NaN();
    double wall_ms_model = 0.0;
    double wall_ms_select = 0.0;
    double hv_archive = 0.0;
    int random_fill = 0;
};

// Everything needed to serve or resume a run at one iteration.
struct IterationSnapshot {
    int iteration = 0;
    Archive archive;
    std::vector<IterationMetrics> metrics;
    std::optional<SetModel> model;
    std::vector<GpHyper> gp_hyper;
    Eigen::Index gp_train_count = 0;    // archive prefix the surrogate was conditioned on
    std::optional<NormalizationState> norm;
    Vector hv_ref;

    GpSurrogate surrogate(const ProblemSpec& spec, const GpConfig& cfg) const {
        if (gp_hyper.empty()) throw DomainError("iteration " + std::to_string(iteration) + " has no surrogate");
        return GpSurrogate::from_hyper(archive.designs().leftCols(gp_train_count),
                                       archive.objectives().leftCols(gp_train_count), spec.lower, spec.upper, cfg,
                                       gp_hyper);
    }
};

struct RunResult {
    RunConfig config;
    Vector hv_ref;
    Archive archive;
    std::vector<IterationMetrics> metrics;
    std::optional<SetModel> final_model;
    std::vector<GpHyper> final_gp_hyper;
};

// Front sample with true objectives for analytic problems.
inline FrontSample sample_front(const SetModel& model, const GpSurrogate& gp, const ProblemSpec& spec, int count,
                                std::uint64_t seed) {
    FrontSample s = predict_front(model, gp, count, seed);
    s.true_objectives = evaluate_batch(spec, s.designs);
    return s;
}

// The outer loop. Each iteration derives its randomness from (seed, iteration), so a run
// resumed from a snapshot continues exactly as an uninterrupted one.
class MoboRunner {
public:
    using Observer = std::function<void(const IterationSnapshot&, const TrainLog&)>;

    MoboRunner(RunConfig cfg, Matrix truth)
        : cfg_(std::move(cfg)), spec_(make_problem(cfg_.problem)), truth_(std::move(truth)) {
        cfg_.validate();
        if (truth_.rows() != spec_.m || truth_.cols() == 0) throw DomainError("ground truth does not match the problem");
        snap_.hv_ref = hv_reference(truth_);
        truth_hv_ = hypervolume(truth_, snap_.hv_ref);
        snap_.archive = Archive(spec_.n, spec_.m);
    }

    // Continue from a stored snapshot.
    MoboRunner(RunConfig cfg, Matrix truth, IterationSnapshot snap) : MoboRunner(std::move(cfg), std::move(truth)) {
        snap_ = std::move(snap);
        truth_hv_ = hypervolume(truth_, snap_.hv_ref);
        started_ = true;
    }

    const RunConfig& config() const { return cfg_; }
    const ProblemSpec& problem() const { return spec_; }
    const IterationSnapshot& snapshot() const { return snap_; }
    int completed_iterations() const { return started_ ? snap_.iteration : -1; }
    bool finished() const { return started_ && snap_.iteration >= cfg_.n_iterations; }

    // Evaluates the initial design (iteration 0).
    const IterationSnapshot& initialize() {
        if (started_) throw DomainError("run already initialized");
        std::mt19937_64 rng(mix_seed(cfg_.seed, 0));
        const Matrix x0 = initial_design(spec_, cfg_.n_init, rng);
        for (Eigen::Index j = 0; j < x0.cols(); ++j) snap_.archive.add(x0.col(j), evaluate(spec_, x0.col(j)), 0);
        started_ = true;
        snap_.iteration = 0;
        IterationMetrics met;
        fill_archive_metrics(met);
        snap_.metrics.push_back(met);
        return snap_;
    }

    // One iteration: fit surrogate, train set model, select batch, evaluate, extend archive.
    const IterationSnapshot& step(TrainLog* log = nullptr) {
        if (!started_) initialize();
        const int it = snap_.iteration + 1;
        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();

        GpConfig gcfg = cfg_.gp;
        gcfg.seed = mix_seed(cfg_.gp.seed ^ cfg_.seed, static_cast<std::uint64_t>(it) * 2 + 1);
        const Archive& arch = snap_.archive;
        const std::vector<GpHyper>* warm = (cfg_.warm_start && !snap_.gp_hyper.empty()) ? &snap_.gp_hyper : nullptr;
        GpSurrogate gp;
        try {
            gp = GpSurrogate::fit(arch.designs(), arch.objectives(), spec_.lower, spec_.upper, gcfg, warm);
        } catch (const FitError& e) {
            throw FitError("iteration " + std::to_string(it) + ": " + e.what());
        }
        NormalizationState norm = NormalizationState::from_archive(arch.objectives());
        norm.lower -= cfg_.ideal_margin * norm.range();

        TrainConfig tcfg = cfg_.train;
        tcfg.seed = mix_seed(cfg_.seed, static_cast<std::uint64_t>(it) * 2);
        SetModel model = (cfg_.warm_start && snap_.model)
                             ? *snap_.model
                             : SetModel::init(mix_seed(tcfg.seed, 1), spec_.m, spec_.n, spec_.lower, spec_.upper,
                                              tcfg.hidden_width, tcfg.hidden_layers);
        const SurrogateObjective objective(gp, gcfg.lcb_kappa);
        TrainLog local;
        model = train(std::move(model), objective, tcfg, norm, log ? log : &local);
        const auto t1 = clock::now();

        std::mt19937_64 rng(mix_seed(tcfg.seed, 2));
        const auto refs = sample_reference_points(spec_.m, cfg_.eval_ref_per_objective, rng, tcfg.ref_axes);
        const auto batch = select_batch(model, objective, norm, refs, cfg_.batch_size, arch.designs(), tcfg, rng);
        const auto t2 = clock::now();

        IterationSnapshot next;
        next.iteration = it;
        next.archive = arch;
        next.metrics = snap_.metrics;
        next.gp_train_count = arch.size();
        next.gp_hyper = gp.hyperparameters();
        next.norm = norm;
        next.hv_ref = snap_.hv_ref;
        for (Eigen::Index j = 0; j < batch.designs.cols(); ++j)
            next.archive.add(batch.designs.col(j), evaluate(spec_, batch.designs.col(j)), it);

        IterationMetrics met;
        met.wall_ms_model = std::chrono::duration<double, std::milli>(t1 - t0).count();
        met.wall_ms_select = std::chrono::duration<double, std::milli>(t2 - t1).count();
        met.random_fill = batch.random_fill;
        const auto front = sample_front(model, gp, spec_, cfg_.front_samples, mix_seed(tcfg.seed, 3));
        met.hvd_model = hvd(*front.true_objectives, truth_, snap_.hv_ref);
        met.igd_model = igd(*front.true_objectives, truth_);
        next.model = std::move(model);
        snap_ = std::move(next);
        fill_archive_metrics(met);
        snap_.metrics.push_back(met);
        return snap_;
    }

    RunResult run(const Observer& observer = {}) {
        if (!started_) {
            initialize();
            if (observer) observer(snap_, TrainLog{});
        }
        while (!finished()) {
            TrainLog log;
            step(&log);
            if (observer) observer(snap_, log);
        }
        return result();
    }

    RunResult result() const {
        return {cfg_, snap_.hv_ref, snap_.archive, snap_.metrics, snap_.model, snap_.gp_hyper};
    }

private:
    void fill_archive_metrics(IterationMetrics& met) const {
        met.iteration = snap_.iteration;
        met.evals = snap_.archive.size();
        const Matrix front = snap_.archive.front();
        met.hv_archive = hypervolume(front, snap_.hv_ref);
        met.hvd_archive = truth_hv_ - met.hv_archive;
        met.igd_archive = igd(front, truth_);
    }

    RunConfig cfg_;
    ProblemSpec spec_;
    Matrix truth_;
    double truth_hv_ = 0.0;
    IterationSnapshot snap_;
    bool started_ = false;
};

// ---- JSON ----

namespace detail {

inline nlohmann::json matrix_columns(const Matrix& a) {
    auto out = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.push_back(to_std(a.col(j)));
    return out;
}

inline Matrix matrix_from_columns(const nlohmann::json& j, Eigen::Index rows) {
    Matrix a(rows, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
        const auto v = j[c].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != rows) throw LoadError("column has wrong length");
        a.col(static_cast<Eigen::Index>(c)) = from_std(v);
    }
    return a;
}

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
inline double number_or_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace detail

inline nlohmann::json to_json(const ScalarizationConfig& c) {
    return {{"kind", to_string(c.kind)}, {"rho", c.rho}, {"lambda", c.lambda}, {"half_apex", c.half_apex},
            {"pbi_normalized_direction", c.pbi_normalized_direction}, {"pbi_signed", c.pbi_signed}};
}
inline ScalarizationConfig scalarization_from_json(const nlohmann::json& j) {
    ScalarizationConfig c = ScalarizationConfig::defaults(parse_scalarization(j.at("kind").get<std::string>()));
    c.rho = j.value("rho", c.rho);
    c.lambda = j.value("lambda", c.lambda);
    c.half_apex = j.value("half_apex", c.half_apex);
    c.pbi_normalized_direction = j.value("pbi_normalized_direction", c.pbi_normalized_direction);
    c.pbi_signed = j.value("pbi_signed", c.pbi_signed);
    return c;
}

inline nlohmann::json to_json(const CemConfig& c) {
    return {{"samples", c.samples}, {"elites", c.elites}, {"iterations", c.iterations},
            {"smoothing", c.smoothing}, {"init_std", c.init_std}, {"min_std", c.min_std}};
}
inline CemConfig cem_from_json(const nlohmann::json& j) {
    CemConfig c;
    c.samples = j.value("samples", c.samples);
    c.elites = j.value("elites", c.elites);
    c.iterations = j.value("iterations", c.iterations);
    c.smoothing = j.value("smoothing", c.smoothing);
    c.init_std = j.value("init_std", c.init_std);
    c.min_std = j.value("min_std", c.min_std);
    return c;
}

inline nlohmann::json to_json(const TrainConfig& c) {
    return {{"iterations", c.iterations}, {"ref_per_objective", c.ref_per_objective}, {"ref_axes", c.ref_axes},
            {"cem", to_json(c.cem)}, {"scalarization", to_json(c.scalarization)},
            {"learning_rate", c.learning_rate}, {"hidden_width", c.hidden_width},
            {"hidden_layers", c.hidden_layers}, {"random_preferences", c.random_preferences},
            {"implicit_correction", c.implicit_correction}, {"seed", c.seed}};
}
inline TrainConfig train_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.iterations = j.value("iterations", c.iterations);
    c.ref_per_objective = j.value("ref_per_objective", c.ref_per_objective);
    c.ref_axes = j.value("ref_axes", c.ref_axes);
    if (j.contains("cem")) c.cem = cem_from_json(j["cem"]);
    if (j.contains("scalarization")) c.scalarization = scalarization_from_json(j["scalarization"]);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.hidden_width = j.value("hidden_width", c.hidden_width);
    c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
    c.random_preferences = j.value("random_preferences", c.random_preferences);
    c.implicit_correction = j.value("implicit_correction", c.implicit_correction);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline nlohmann::json to_json(const GpConfig& c) {
    return {{"noise_floor", c.noise_floor}, {"hyperopt_restarts", c.hyperopt_restarts},
            {"hyperopt_iterations", c.hyperopt_iterations}, {"hyperopt_learning_rate", c.hyperopt_learning_rate},
            {"lcb_kappa", c.lcb_kappa}, {"standardize_targets", c.standardize_targets}, {"seed", c.seed}};
}
inline GpConfig gp_config_from_json(const nlohmann::json& j) {
    GpConfig c;
    c.noise_floor = j.value("noise_floor", c.noise_floor);
    c.hyperopt_restarts = j.value("hyperopt_restarts", c.hyperopt_restarts);
    c.hyperopt_iterations = j.value("hyperopt_iterations", c.hyperopt_iterations);
    c.hyperopt_learning_rate = j.value("hyperopt_learning_rate", c.hyperopt_learning_rate);
    c.lcb_kappa = j.value("lcb_kappa", c.lcb_kappa);
    c.standardize_targets = j.value("standardize_targets", c.standardize_targets);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"problem", to_string(c.problem)}, {"n_init", c.n_init}, {"batch_size", c.batch_size},
            {"n_iterations", c.n_iterations}, {"train", to_json(c.train)}, {"gp", to_json(c.gp)},
            {"seed", c.seed}, {"warm_start", c.warm_start}, {"eval_ref_per_objective", c.eval_ref_per_objective},
            {"front_samples", c.front_samples}, {"ideal_margin", c.ideal_margin}};
}
inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.problem = parse_problem_id(j.at("problem").get<std::string>());
    c.n_init = j.value("n_init", c.n_init);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.n_iterations = j.value("n_iterations", c.n_iterations);
    if (j.contains("train")) c.train = train_from_json(j["train"]);
    if (j.contains("gp")) c.gp = gp_config_from_json(j["gp"]);
    c.seed = j.value("seed", c.seed);
    c.warm_start = j.value("warm_start", c.warm_start);
    c.eval_ref_per_objective = j.value("eval_ref_per_objective", c.eval_ref_per_objective);
    c.front_samples = j.value("front_samples", c.front_samples);
    c.ideal_margin = j.value("ideal_margin", c.ideal_margin);
    return c;
}

inline nlohmann::json to_json(const Archive& a) {
    return {{"x", detail::matrix_columns(a.designs())}, {"f", detail::matrix_columns(a.objectives())},
            {"iteration", a.iterations()}, {"nondominated", a.nondominated()}};
}
inline Archive archive_from_json(const nlohmann::json& j, int n, int m) {
    const Matrix x = detail::matrix_from_columns(j.at("x"), n);
    const Matrix f = detail::matrix_from_columns(j.at("f"), m);
    const auto iters = j.at("iteration").get<std::vector<int>>();
    if (x.cols() != f.cols() || static_cast<Eigen::Index>(iters.size()) != x.cols())
        throw LoadError("archive columns disagree in length");
    Archive a(n, m);
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        if (!a.add(x.col(c), f.col(c), iters[static_cast<std::size_t>(c)])) throw LoadError("archive holds a duplicate design");
    return a;
}

inline nlohmann::json to_json(const IterationMetrics& r) {
    return {{"iter", r.iteration}, {"evals", r.evals}, {"hvd_archive", r.hvd_archive},
            {"igd_archive", detail::finite_or_null(r.igd_archive)}, {"hvd_model", detail::finite_or_null(r.hvd_model)},
            {"igd_model", detail::finite_or_null(r.igd_model)}, {"wall_ms_model", r.wall_ms_model},
            {"wall_ms_select", r.wall_ms_select}, {"hv_archive", r.hv_archive}, {"random_fill", r.random_fill}};
}
inline IterationMetrics metrics_from_json(const nlohmann::json& j) {
    IterationMetrics r;
    r.iteration = j.at("iter").get<int>();
    r.evals = j.at("evals").get<Eigen::Index>();
    r.hvd_archive = j.at("hvd_archive").get<double>();
    r.igd_archive = detail::number_or_nan(j.at("igd_archive"));
    r.hvd_model = detail::number_or_nan(j.at("hvd_model"));
    r.igd_model = detail::number_or_nan(j.at("igd_model"));
    r.wall_ms_model = j.at("wall_ms_model").get<double>();
    r.wall_ms_select = j.at("wall_ms_select").get<double>();
    r.hv_archive = j.value("hv_archive", 0.0);
    r.random_fill = j.value("random_fill", 0);
    return r;
}

inline nlohmann::json to_json(const RunResult& r) {
    nlohmann::json out{{"config", to_json(r.config)}, {"hv_ref", to_std(r.hv_ref)}, {"archive", to_json(r.archive)}};
    out["metrics"] = nlohmann::json::array();
    for (const auto& met : r.metrics) out["metrics"].push_back(to_json(met));
    out["final_model"] = r.final_model ? to_json(*r.final_model) : nlohmann::json(nullptr);
    out["final_gp_hyper"] = nlohmann::json::array();
    for (const auto& h : r.final_gp_hyper) out["final_gp_hyper"].push_back(to_json(h));
    return out;
}
inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult r;
    r.config = run_config_from_json(j.at("config"));
    const auto spec = make_problem(r.config.problem);
    r.hv_ref = from_std(j.at("hv_ref").get<std::vector<double>>());
    r.archive = archive_from_json(j.at("archive"), spec.n, spec.m);
    for (const auto& met : j.at("metrics")) r.metrics.push_back(metrics_from_json(met));
    if (!j.at("final_model").is_null()) r.final_model = set_model_from_json(j["final_model"]);
    for (const auto& h : j.at("final_gp_hyper")) r.final_gp_hyper.push_back(gp_hyper_from_json(h));
    return r;
}

} // namespace paretoset
