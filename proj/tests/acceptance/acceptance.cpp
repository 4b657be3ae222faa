// One PASS/FAIL line per acceptance criterion. Exit status 1 when any criterion fails.
#include "paretoset/run_store.hpp"
#include "support/oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>

using namespace paretoset;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Mean distance from each model-front point to the nearest ground-truth point.
double generational_distance(const Matrix& front, const Matrix& truth) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < front.cols(); ++j)
        total += std::sqrt((truth.colwise() - front.col(j)).colwise().squaredNorm().minCoeff());
    return total / static_cast<double>(front.cols());
}

struct Options {
    fs::path runs_dir = "acceptance_runs";
    int seeds = 5;
};

// Executes one stored run; `on_iteration` sees every snapshot after the initial design.
RunResult stored_run(const RunConfig& cfg, const fs::path& dir, const Matrix& truth,
                     const std::function<void(const IterationSnapshot&)>& on_iteration = {}) {
    MoboRunner runner(cfg, truth);
    fs::remove_all(dir);
    const auto store = RunStore::create(dir, cfg, runner.snapshot().hv_ref);
    return runner.run([&](const IterationSnapshot& snap, const TrainLog& log) {
        store.write(snap, &log);
        if (snap.iteration > 0 && on_iteration) on_iteration(snap);
    });
}

RunConfig base_config(ProblemId problem, std::uint64_t seed, int iterations) {
    RunConfig cfg = fast_preset(RunConfig{});
    cfg.problem = problem;
    cfg.seed = seed;
    cfg.n_init = 20;
    cfg.batch_size = 10;
    cfg.n_iterations = iterations;
    return cfg;
}

Verdict gradient_integrity(const Options&) {
    const auto t0 = Clock::now();
    double worst_model = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) worst_model = std::max(worst_model, oracle::set_model_gradient_error(s));
    double worst_scalar = 0.0;
    int checked_min = 100;
    for (auto kind : {ScalarizationKind::WeightedSum, ScalarizationKind::Tchebycheff,
                      ScalarizationKind::AugTchebycheff, ScalarizationKind::PBI}) {
        const auto r = oracle::grad_f_error(kind, 100, 42);
        worst_scalar = std::max(worst_scalar, r.worst);
        checked_min = std::min(checked_min, r.checked);
    }
    const double secs = seconds_since(t0);
    return {worst_model < 1e-5 && worst_scalar < 1e-5 && checked_min >= 100 && secs < 10.0,
            fmt("set-model max rel err %.2e over 10 configs, grad_f max rel err %.2e at >=%d points/kind, %.2f s",
                worst_model, worst_scalar, checked_min, secs)};
}

Verdict implicit_gradient_check(const Options&) {
    auto omega = [](const Vector& w, const Vector& t) { return std::pow(w[0] - t[0], 2); };
    auto psi = [](const Vector& w) { return w[0] * w[0]; };
    double exact_err = 0.0;
    for (double theta : {-1.5, -0.2, 0.3, 1.0, 2.0}) {
        const Vector t = Vector::Constant(1, theta);
        exact_err = std::max(exact_err, std::abs(implicit_gradient(omega, psi, t, t)[0] - 2 * theta));
    }
    double resolve_err = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) resolve_err = std::max(resolve_err, oracle::implicit_gradient_vs_resolve(s));
    return {exact_err < 1e-8 && resolve_err < 1e-4,
            fmt("|err| vs 2*theta %.2e, max err vs re-solved argmin %.2e on 10 quadratics", exact_err, resolve_err)};
}

Verdict hypervolume_oracle(const Options&) {
    const auto t0 = Clock::now();
    Matrix hand(2, 2);
    hand << 1, 2, 2, 1;
    const double hand_hv = hypervolume(hand, Vector::Constant(2, 3.0));
    int within = 0;
    double worst_sigma = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int m = t % 2 == 0 ? 2 : 3;
        const Matrix pts = oracle::random_point_set(m, 1000 + t, 5 + t % 20);
        const Vector ref = Vector::Constant(m, 1.1);
        const auto est = mc_hypervolume_estimate(pts, ref, Vector::Zero(m), 1000000, 2000 + t);
        const double z = std::abs(est.value - hypervolume(pts, ref)) / est.standard_error;
        worst_sigma = std::max(worst_sigma, z);
        if (z <= 3.0) ++within;
    }
    const double secs = seconds_since(t0);
    return {hand_hv == 3.0 && within == 50 && secs < 60.0,
            fmt("hand case %.6f, %d/50 sets within 3 sigma (worst %.2f sigma), %.1f s", hand_hv, within, worst_sigma,
                secs)};
}

Verdict cem_convergence(const Options&) {
    int ok = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const double e = oracle::cem_quadratic_error(s, 10);
        worst = std::max(worst, e);
        if (e < 0.02) ++ok;
    }
    return {ok == 10, fmt("%d/10 seeds with L-inf error < 0.02 in 10 iterations (worst %.4f)", ok, worst)};
}

Verdict cone_penalty_values(const Options&) {
    const double apex = std::numbers::pi / 4;
    const double at_apex = cone_penalty_from_cos(std::cos(apex), apex);
    const double at_one = cone_penalty_from_cos(1.0, apex);
    const double at_zero = cone_penalty_from_cos(0.0, apex);
    bool interval_ok = true;
    for (int i = 0; i <= 20000; ++i) {
        const double c = -1.0 + 2.0 * i / 20000.0;
        const double zeta = cone_penalty_from_cos(c, apex);
        if (c >= std::cos(apex) && zeta > 1.0) interval_ok = false;
        if (c < std::cos(apex) - 1e-6 && zeta <= 1.0) interval_ok = false;
    }
    return {std::abs(at_apex - 1.0) < 1e-12 && std::abs(at_one - 1.0) < 1e-12 &&
                std::abs(at_zero - 2.028114981647472) < 1e-6 && interval_ok,
            fmt("zeta(cos apex)=%.12f zeta(1)=%.12f zeta(0)=%.9f, inside-interval scan %s", at_apex, at_one, at_zero,
                interval_ok ? "ok" : "violated")};
}

Verdict zdt3_end_to_end(const Options& opt) {
    const auto t0 = Clock::now();
    const auto truth = ground_truth(make_problem(ProblemId::ZDT3)).points;
    bool monotone = true;
    std::vector<double> igd_a, igd_m, abl_a, abl_m;
    for (int s = 0; s < opt.seeds; ++s) {
        for (bool ablation : {false, true}) {
            RunConfig cfg = base_config(ProblemId::ZDT3, s, 20);
            cfg.train.random_preferences = ablation;
            const auto dir = opt.runs_dir / fmt("zdt3-%s-seed%d", ablation ? "psl" : "popsl", s);
            const auto res = stored_run(cfg, dir, truth);
            for (std::size_t i = 1; i < res.metrics.size(); ++i)
                if (res.metrics[i].hv_archive < res.metrics[i - 1].hv_archive) monotone = false;
            (ablation ? abl_a : igd_a).push_back(res.metrics.back().igd_archive);
            (ablation ? abl_m : igd_m).push_back(res.metrics.back().igd_model);
        }
    }
    const double secs = seconds_since(t0);
    const bool better = mean(igd_a) < mean(abl_a) && mean(igd_m) < mean(abl_m);
    return {monotone && better && secs < 600.0,
            fmt("archive HV %s; mean final IGD archive %.4f vs ablation %.4f, model %.4f vs ablation %.4f; "
                "%d seeds in %.0f s",
                monotone ? "non-decreasing" : "DECREASED", mean(igd_a), mean(abl_a), mean(igd_m), mean(abl_m),
                opt.seeds, secs)};
}

// DTLZ5 runs shared by the degeneracy and axis-ablation criteria.
struct Dtlz5Runs {
    std::vector<std::array<double, 3>> gd;    // per seed at iterations 5, 10, 20
    std::vector<double> igd_all_axes;         // final model-front IGD
};

const Dtlz5Runs& dtlz5_runs(const Options& opt) {
    static std::optional<Dtlz5Runs> cache;
    if (cache) return *cache;
    Dtlz5Runs out;
    const auto spec = make_problem(ProblemId::DTLZ5);
    const auto truth = ground_truth(spec).points;
    for (int s = 0; s < opt.seeds; ++s) {
        const RunConfig cfg = base_config(ProblemId::DTLZ5, s, 20);
        std::array<double, 3> gd{};
        const auto res = stored_run(cfg, opt.runs_dir / fmt("dtlz5-seed%d", s), truth, [&](const IterationSnapshot& snap) {
            const std::array checkpoints{5, 10, 20};
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                if (snap.iteration != checkpoints[c]) continue;
                const auto front = sample_front(*snap.model, snap.surrogate(spec, cfg.gp), spec, 100,
                                                mix_seed(cfg.seed, 500 + c));
                gd[c] = generational_distance(*front.true_objectives, truth);
            }
        });
        out.gd.push_back(gd);
        out.igd_all_axes.push_back(res.metrics.back().igd_model);
    }
    cache = std::move(out);
    return *cache;
}

Verdict dtlz5_degeneracy(const Options& opt) {
    const auto& runs = dtlz5_runs(opt);
    int inversions = 0;
    std::string per_seed;
    for (const auto& g : runs.gd) {
        inversions += (g[1] > g[0]) + (g[2] > g[1]);
        per_seed += fmt(" (%.3f,%.3f,%.3f)", g[0], g[1], g[2]);
    }
    return {inversions <= 1, fmt("%d inversions across %d seeds; GD at iterations 5,10,20:%s", inversions,
                                 opt.seeds, per_seed.c_str())};
}

Verdict axis_ablation(const Options& opt) {
    const auto& runs = dtlz5_runs(opt);
    const auto truth = ground_truth(make_problem(ProblemId::DTLZ5)).points;
    std::vector<double> restricted;
    for (int s = 0; s < opt.seeds; ++s) {
        RunConfig cfg = base_config(ProblemId::DTLZ5, s, 20);
        cfg.train.ref_axes = {0};
        restricted.push_back(stored_run(cfg, opt.runs_dir / fmt("dtlz5-axis0-seed%d", s), truth).metrics.back().igd_model);
    }
    const double ratio = mean(restricted) / mean(runs.igd_all_axes);
    return {ratio >= 1.5, fmt("mean model-front IGD one axis %.4f vs all axes %.4f, ratio %.2f (need >= 1.5)",
                              mean(restricted), mean(runs.igd_all_axes), ratio)};
}

Verdict timing_columns(const Options& opt) {
    fs::path dir = opt.runs_dir / "zdt3-popsl-seed0";
    if (!fs::exists(dir / "run.json")) {
        dir = opt.runs_dir / "timing";
        stored_run(base_config(ProblemId::ZDT3, 0, 2), dir, ground_truth(make_problem(ProblemId::ZDT3)).points);
    }
    std::ifstream in(dir / "metrics.csv");
    std::string header, line;
    std::getline(in, header);
    const bool has_cols = header.find("wall_ms_model") != std::string::npos &&
                          header.find("wall_ms_select") != std::string::npos;
    int rows = 0, timed = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (rows == 1) continue;    // initial design: nothing trained or selected
        const auto last = line.rfind(',');
        const auto prev = line.rfind(',', last - 1);
        const double model_ms = std::stod(line.substr(prev + 1, last - prev - 1));
        const double select_ms = std::stod(line.substr(last + 1));
        if (model_ms > 0.0 && select_ms > 0.0) ++timed;
    }
    return {has_cols && rows > 1 && timed == rows - 1,
            fmt("%s: %d of %d iterations carry positive model and selection times", (dir / "metrics.csv").c_str(),
                timed, rows - 1)};
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    std::vector<std::string> only;
    CLI::App app{"Acceptance checks"};
    app.add_option("--runs-dir", opt.runs_dir, "directory for end-to-end run output");
    app.add_option("--seeds", opt.seeds, "seeds per end-to-end criterion")->check(CLI::Range(1, 100));
    app.add_option("--only", only, "run only the named criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Verdict(const Options&)>>> criteria = {
        {"gradient-integrity", gradient_integrity},
        {"implicit-gradient", implicit_gradient_check},
        {"hypervolume-oracle", hypervolume_oracle},
        {"cem-convergence", cem_convergence},
        {"cone-penalty", cone_penalty_values},
        {"zdt3-end-to-end", zdt3_end_to_end},
        {"dtlz5-degeneracy", dtlz5_degeneracy},
        {"axis-ablation", axis_ablation},
        {"timing-columns", timing_columns},
    };
    const std::set<std::string> selected(only.begin(), only.end());
    fs::create_directories(opt.runs_dir);
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        if (!selected.empty() && !selected.contains(name)) continue;
        Verdict v;
        try {
            v = check(opt);
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
