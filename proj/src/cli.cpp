#include "paretoset/cli.hpp"

#include "paretoset/run_store.hpp"
#include "paretoset/service.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <optional>
#include <sstream>

namespace paretoset {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Preference-optimized Pareto set learning for multi-objective Bayesian optimization"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Execute an optimization run and write snapshots");
    std::string problem;
    RunConfig cfg;
    std::string out_root = "runs";
    std::string run_id;
    std::string scalarization = "pbi";
    std::string preset = "default";
    std::optional<double> lambda, half_apex, lr, kappa;
    std::optional<bool> warm_start;
    std::optional<int> train_iters, width, cem_samples, cem_elites, cem_iters, gp_iters, gp_restarts;
    std::vector<int> ref_axes;
    bool quiet = false;
    run->add_option("--problem", problem, "zdt3, dtlz5 or re5")->required();
    run->add_option("--n-init", cfg.n_init, "initial design size")->capture_default_str();
    run->add_option("--batch", cfg.batch_size, "evaluations added per iteration")->capture_default_str();
    run->add_option("--iters", cfg.n_iterations, "optimization iterations")->capture_default_str();
    run->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    run->add_option("--out", out_root, "directory that receives the run directory")->capture_default_str();
    run->add_option("--id", run_id, "run directory name (default <problem>-seed<seed>)");
    run->add_option("--preset", preset, "default or fast")->check(CLI::IsMember({"default", "fast"}))->capture_default_str();
    run->add_option("--scalarization", scalarization, "pbi, tch, augtch or ws")
        ->check(CLI::IsMember({"pbi", "tch", "augtch", "ws"}))
        ->capture_default_str();
    run->add_option("--lambda", lambda, "cone penalty weight");
    run->add_option("--half-apex", half_apex, "cone half-apex angle in radians");
    run->add_option("--ref-per-obj", cfg.train.ref_per_objective, "reference points per objective axis")->capture_default_str();
    run->add_option("--ref-axis", ref_axes, "restrict reference points to these objective axes (0-based)");
    run->add_flag("--warm-start,!--no-warm-start", warm_start,
                  "keep model and surrogate hyperparameters across iterations (fast preset: on)");
    run->add_flag("--random-preferences", cfg.train.random_preferences, "ablation: uniform preferences instead of the inner search");
    run->add_flag("--pbi-signed", cfg.train.scalarization.pbi_signed, "PBI distance along the preference keeps its sign");
    run->add_option("--train-iters", train_iters, "set-model updates per iteration");
    run->add_option("--width", width, "hidden layer width");
    run->add_option("--lr", lr, "set-model learning rate");
    run->add_option("--cem-samples", cem_samples, "inner search samples per round");
    run->add_option("--cem-elites", cem_elites, "inner search elite count");
    run->add_option("--cem-iters", cem_iters, "inner search rounds");
    run->add_option("--kappa", kappa, "lower-confidence-bound weight");
    run->add_option("--gp-iters", gp_iters, "surrogate hyperparameter ascent steps");
    run->add_option("--gp-restarts", gp_restarts, "surrogate hyperparameter restarts");
    run->add_option("--ideal-margin", cfg.ideal_margin, "shift of the normalization lower bound below the archive ideal")
        ->capture_default_str();
    run->add_flag("--quiet", quiet, "suppress per-iteration lines");

    // eval
    auto* eval = app.add_subcommand("eval", "Print the final metrics of a run");
    std::string eval_dir;
    bool eval_all = false;
    eval->add_option("--run", eval_dir, "run directory")->required();
    eval->add_flag("--all", eval_all, "print every iteration");

    // export-front
    auto* exp = app.add_subcommand("export-front", "Write a CSV sample of the learned front");
    std::string exp_dir, exp_out;
    int exp_count = 100;
    std::optional<int> exp_iter;
    std::uint64_t exp_seed = 0;
    exp->add_option("--run", exp_dir, "run directory")->required();
    exp->add_option("--count", exp_count, "number of preference vectors")->check(CLI::Range(1, 1000000))->capture_default_str();
    exp->add_option("--iter", exp_iter, "iteration (default latest with a model)");
    exp->add_option("--seed", exp_seed, "sampling seed")->capture_default_str();
    exp->add_option("--output", exp_out, "file to write (default stdout)");

    // serve
    auto* srv = app.add_subcommand("serve", "Serve runs over HTTP/JSON");
    std::string srv_root = "runs", host = "127.0.0.1";
    int port = 8080;
    srv->add_option("--runs-dir", srv_root, "directory holding run directories")->capture_default_str();
    srv->add_option("--host", host, "bind address")->capture_default_str();
    srv->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    auto usage_error = [&](const std::string& msg, const CLI::App* sub) {
        err << "error: " << msg << "\n\n" << (sub ? sub->help() : app.help());
        return 2;
    };

    if (*run) {
        try {
            cfg.problem = parse_problem_id(problem);
            if (preset == "fast") {
                const RunConfig fast = fast_preset(cfg);
                cfg.train = fast.train;
                cfg.gp = fast.gp;
                cfg.warm_start = fast.warm_start;
            }
            if (warm_start) cfg.warm_start = *warm_start;
            const auto sc_kind = parse_scalarization(scalarization);
            const bool signed_d1 = cfg.train.scalarization.pbi_signed;
            const double default_lambda = cfg.train.scalarization.lambda;
            cfg.train.scalarization = ScalarizationConfig::defaults(sc_kind);
            cfg.train.scalarization.lambda = default_lambda;
            cfg.train.scalarization.pbi_signed = signed_d1;
            if (lambda) cfg.train.scalarization.lambda = *lambda;
            if (half_apex) cfg.train.scalarization.half_apex = *half_apex;
            if (!ref_axes.empty()) cfg.train.ref_axes = ref_axes;
            if (train_iters) cfg.train.iterations = *train_iters;
            if (width) cfg.train.hidden_width = *width;
            if (lr) cfg.train.learning_rate = *lr;
            if (cem_samples) cfg.train.cem.samples = *cem_samples;
            if (cem_elites) cfg.train.cem.elites = *cem_elites;
            if (cem_iters) cfg.train.cem.iterations = *cem_iters;
            if (kappa) cfg.gp.lcb_kappa = *kappa;
            if (gp_iters) cfg.gp.hyperopt_iterations = *gp_iters;
            if (gp_restarts) cfg.gp.hyperopt_restarts = *gp_restarts;
            for (int a : cfg.train.ref_axes)
                if (a < 0 || a >= make_problem(cfg.problem).m) throw DomainError("--ref-axis out of range");
            cfg.validate();
        } catch (const DomainError& e) {
            return usage_error(e.what(), run);
        }
        try {
            const auto spec = make_problem(cfg.problem);
            const auto truth = ground_truth(spec);
            if (run_id.empty()) run_id = to_string(cfg.problem) + "-seed" + std::to_string(cfg.seed);
            const auto dir = RunStore::fresh_dir(out_root, run_id);
            MoboRunner runner(cfg, truth.points);
            const auto store = RunStore::create(dir, cfg, runner.snapshot().hv_ref);
            runner.run([&](const IterationSnapshot& snap, const TrainLog& log) {
                store.write(snap, &log);
                if (!quiet) {
                    const auto& m = snap.metrics.back();
                    out << "iter " << m.iteration << " evals " << m.evals << " hvd_archive " << m.hvd_archive
                        << " igd_archive " << m.igd_archive << " igd_model " << m.igd_model << "\n";
                    out.flush();
                }
            });
            out << "run written to " << dir.string() << "\n";
            return 0;
        } catch (const std::exception& e) {
            err << "run failed: " << e.what() << "\n";
            return 1;
        }
    }

    if (*eval) {
        try {
            const auto store = RunStore::open(eval_dir);
            const auto snap = store.load_latest();
            const std::string csv = metrics_csv(snap.metrics);
            std::istringstream lines(csv);
            std::string header, line, last;
            std::getline(lines, header);
            out << header << "\n";
            while (std::getline(lines, line)) {
                if (eval_all) out << line << "\n";
                last = line;
            }
            if (!eval_all) out << last << "\n";
            return 0;
        } catch (const std::exception& e) {
            err << "eval failed: " << e.what() << "\n";
            return 1;
        }
    }

    if (*exp) {
        try {
            const auto store = RunStore::open(exp_dir);
            int k = exp_iter ? *exp_iter : store.latest_iteration();
            if (k < 0) throw LoadError("run has no snapshots");
            const auto snap = store.load(k);
            if (!snap.model) throw LoadError("iteration " + std::to_string(k) + " has no trained model");
            const auto spec = make_problem(store.config().problem);
            const auto gp = snap.surrogate(spec, store.config().gp);
            const auto front = predict_front(*snap.model, gp, exp_count, exp_seed);
            std::ostringstream csv;
            csv << std::setprecision(12);
            for (int i = 0; i < spec.m; ++i) csv << "w" << i + 1 << ",";
            for (int i = 0; i < spec.n; ++i) csv << "x" << i + 1 << ",";
            for (int i = 0; i < spec.m; ++i) csv << "fhat" << i + 1 << (i + 1 < spec.m ? "," : "\n");
            for (Eigen::Index c = 0; c < front.designs.cols(); ++c) {
                for (int i = 0; i < spec.m; ++i) csv << front.preferences(i, c) << ",";
                for (int i = 0; i < spec.n; ++i) csv << front.designs(i, c) << ",";
                for (int i = 0; i < spec.m; ++i) csv << front.predicted(i, c) << (i + 1 < spec.m ? "," : "\n");
            }
            if (exp_out.empty()) out << csv.str();
            else atomic_write(exp_out, csv.str());
            return 0;
        } catch (const std::exception& e) {
            err << "export failed: " << e.what() << "\n";
            return 1;
        }
    }

    if (*srv) {
        try {
            fs::create_directories(srv_root);
            RunService service(srv_root);
            out << "serving " << srv_root << " on http://" << host << ":" << port << "\n";
            out.flush();
            if (!service.listen(host, port)) {
                err << "cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        } catch (const std::exception& e) {
            err << "serve failed: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}

} // namespace paretoset
