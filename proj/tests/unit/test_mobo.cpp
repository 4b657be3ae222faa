#include "paretoset/mobo.hpp"

#include <gtest/gtest.h>

using namespace paretoset;

namespace {

RunConfig tiny_config(ProblemId problem, int iterations) {
    RunConfig c;
    c.problem = problem;
    c.n_iterations = iterations;
    c.train.iterations = 3;
    c.train.hidden_width = 8;
    c.train.hidden_layers = 2;
    c.train.ref_per_objective = 2;
    c.train.cem.samples = 30;
    c.train.cem.elites = 5;
    c.train.cem.iterations = 2;
    c.gp.hyperopt_iterations = 5;
    c.gp.hyperopt_restarts = 1;
    c.eval_ref_per_objective = 3;
    c.front_samples = 20;
    return c;
}

Matrix truth_of(ProblemId id) { return ground_truth(make_problem(id)).points; }

} // namespace

TEST(InitialDesign, LatinHypercubeStrata) {
    const auto spec = make_problem(ProblemId::RE5);
    std::mt19937_64 rng(3);
    const Matrix x = initial_design(spec, 20, rng);
    for (int d = 0; d < spec.n; ++d) {
        std::vector<int> hits(20, 0);
        for (int j = 0; j < 20; ++j) {
            const double u = (x(d, j) - spec.lower[d]) / (spec.upper[d] - spec.lower[d]);
            ++hits[static_cast<std::size_t>(std::min(19, static_cast<int>(u * 20)))];
        }
        for (int h : hits) EXPECT_EQ(h, 1);
    }
}

TEST(Archive, RejectsDuplicates) {
    Archive a(2, 2);
    EXPECT_TRUE(a.add(Vector::Zero(2), Vector::Ones(2), 0));
    EXPECT_FALSE(a.add(Vector::Constant(2, 1e-12), Vector::Ones(2), 1));
    EXPECT_TRUE(a.add(Vector::Constant(2, 1e-3), Vector::Zero(2), 1));
    EXPECT_EQ(a.size(), 2);
    EXPECT_EQ(a.iterations(), (std::vector<int>{0, 1}));
    EXPECT_EQ(a.front().cols(), 1);
    EXPECT_EQ(a.head(1).size(), 1);
    EXPECT_THROW(a.add(Vector::Zero(3), Vector::Ones(2), 0), DomainError);
}

TEST(RunConfig, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), DomainError);
    c = RunConfig{};
    c.n_init = 1;
    EXPECT_THROW(c.validate(), DomainError);
    c = RunConfig{};
    c.train.scalarization.lambda = -1;
    EXPECT_THROW(c.validate(), DomainError);
}

class SelectBatchTest : public ::testing::Test {
protected:
    void SetUp() override {
        spec = make_problem(ProblemId::ZDT3);
        std::mt19937_64 rng(0);
        xs = initial_design(spec, 15, rng);
        GpConfig g;
        g.hyperopt_iterations = 5;
        g.hyperopt_restarts = 1;
        gp = GpSurrogate::fit(xs, evaluate_batch(spec, xs), spec.lower, spec.upper, g);
        model = SetModel::init(1, 2, spec.n, spec.lower, spec.upper, 8, 2);
        norm = NormalizationState::from_archive(evaluate_batch(spec, xs));
        cfg = tiny_config(ProblemId::ZDT3, 1).train;
    }
    ProblemSpec spec;
    Matrix xs;
    GpSurrogate gp;
    SetModel model;
    NormalizationState norm;
    TrainConfig cfg;
};

TEST_F(SelectBatchTest, DistinctReferencePointsFirst) {
    std::mt19937_64 rng(4);
    const auto refs = sample_reference_points(2, 3, rng);
    const SurrogateObjective obj(gp, 0.0);
    const auto batch = select_batch(model, obj, norm, refs, 6, xs, cfg, rng);
    ASSERT_EQ(batch.designs.cols(), 6);
    std::vector<int> sources = batch.source_ref;
    std::sort(sources.begin(), sources.end());
    if (batch.random_fill == 0) EXPECT_EQ(sources, (std::vector<int>{0, 1, 2, 3, 4, 5}));
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) EXPECT_GT((batch.designs.col(a) - batch.designs.col(b)).norm(), 0.0);
}

TEST_F(SelectBatchTest, SingleDesignIsGlobalBest) {
    std::mt19937_64 rng(5);
    const auto refs = sample_reference_points(2, 2, rng);
    const SurrogateObjective obj(gp, 0.0);
    std::mt19937_64 a(9), b(9);
    const auto one = select_batch(model, obj, norm, refs, 1, xs, cfg, a);
    const auto all = select_batch(model, obj, norm, refs, static_cast<int>(refs.size()), xs, cfg, b);
    ASSERT_EQ(one.designs.cols(), 1);
    EXPECT_EQ(one.designs.col(0), all.designs.col(0));
}

TEST_F(SelectBatchTest, NeverReturnsArchiveDuplicates) {
    std::mt19937_64 rng(6);
    const auto refs = sample_reference_points(2, 2, rng);
    const SurrogateObjective obj(gp, 0.0);
    std::mt19937_64 r1(7);
    const auto first = select_batch(model, obj, norm, refs, 4, xs, cfg, r1);
    Matrix extended(xs.rows(), xs.cols() + first.designs.cols());
    extended << xs, first.designs;
    std::mt19937_64 r2(7);
    const auto second = select_batch(model, obj, norm, refs, 4, extended, cfg, r2);
    const Vector range = spec.upper - spec.lower;
    for (Eigen::Index c = 0; c < second.designs.cols(); ++c)
        for (Eigen::Index j = 0; j < extended.cols(); ++j)
            EXPECT_GE((second.designs.col(c) - extended.col(j)).cwiseQuotient(range).norm(), 1e-6);
}

TEST(MoboRunner, ArchiveGrowthAndMonotoneHypervolume) {
    MoboRunner runner(tiny_config(ProblemId::ZDT3, 20), truth_of(ProblemId::ZDT3));
    const auto res = runner.run();
    EXPECT_EQ(res.archive.size(), 220);
    ASSERT_EQ(res.metrics.size(), 21u);
    for (std::size_t i = 1; i < res.metrics.size(); ++i) {
        EXPECT_GE(res.metrics[i].hv_archive, res.metrics[i - 1].hv_archive);
        EXPECT_EQ(res.metrics[i].evals, 20 + 10 * static_cast<Eigen::Index>(i));
        EXPECT_TRUE(std::isfinite(res.metrics[i].igd_model));
        EXPECT_GT(res.metrics[i].wall_ms_model, 0.0);
    }
    EXPECT_TRUE(std::isnan(res.metrics[0].igd_model));
    EXPECT_TRUE(res.final_model.has_value());
}

TEST(MoboRunner, ZeroIterationsEvaluatesOnlyInitialDesign) {
    MoboRunner runner(tiny_config(ProblemId::DTLZ5, 0), truth_of(ProblemId::DTLZ5));
    const auto res = runner.run();
    EXPECT_EQ(res.archive.size(), 20);
    EXPECT_EQ(res.metrics.size(), 1u);
    EXPECT_FALSE(res.final_model.has_value());
}

TEST(MoboRunner, ResumeMatchesUninterruptedRun) {
    for (bool warm : {false, true}) {
        auto cfg = tiny_config(ProblemId::ZDT3, 3);
        cfg.warm_start = warm;
        MoboRunner straight(cfg, truth_of(ProblemId::ZDT3));
        const auto full = straight.run();

        MoboRunner first(cfg, truth_of(ProblemId::ZDT3));
        first.initialize();
        first.step();
        const auto stored = nlohmann::json::parse(nlohmann::json(to_json(first.snapshot().archive)).dump());
        IterationSnapshot snap = first.snapshot();
        snap.archive = archive_from_json(stored, first.problem().n, first.problem().m);
        snap.model = set_model_from_json(nlohmann::json::parse(to_json(*first.snapshot().model).dump()));
        MoboRunner resumed(cfg, truth_of(ProblemId::ZDT3), snap);
        const auto rest = resumed.run();
        EXPECT_EQ(rest.archive.designs(), full.archive.designs()) << "warm " << warm;
    }
}

TEST(MoboRunner, SeedsDiffer) {
    auto a = tiny_config(ProblemId::ZDT3, 0), b = a;
    b.seed = 1;
    EXPECT_NE(MoboRunner(a, truth_of(ProblemId::ZDT3)).run().archive.designs(),
              MoboRunner(b, truth_of(ProblemId::ZDT3)).run().archive.designs());
}

TEST(Json, RunConfigRoundTrip) {
    RunConfig c = fast_preset(tiny_config(ProblemId::RE5, 7));
    c.seed = 42;
    c.warm_start = true;
    c.ideal_margin = 0.1;
    c.train.ref_axes = {1};
    c.train.random_preferences = true;
    c.train.scalarization = ScalarizationConfig::defaults(ScalarizationKind::AugTchebycheff);
    c.train.scalarization.pbi_signed = true;
    c.gp.lcb_kappa = 0.5;
    const auto back = run_config_from_json(nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(back.problem, ProblemId::RE5);
    EXPECT_EQ(back.train.ref_axes, std::vector<int>{1});
}

TEST(Json, MetricsNanBecomesNull) {
    IterationMetrics m;
    m.iteration = 0;
    const auto j = to_json(m);
    EXPECT_TRUE(j["igd_model"].is_null());
    EXPECT_TRUE(std::isnan(metrics_from_json(j).igd_model));
    m.igd_model = 0.25;
    EXPECT_DOUBLE_EQ(metrics_from_json(to_json(m)).igd_model, 0.25);
}

TEST(Json, RunResultRoundTrip) {
    MoboRunner runner(tiny_config(ProblemId::ZDT3, 1), truth_of(ProblemId::ZDT3));
    const auto res = runner.run();
    const auto back = run_result_from_json(nlohmann::json::parse(to_json(res).dump()));
    EXPECT_EQ(back.archive.designs(), res.archive.designs());
    EXPECT_EQ(back.metrics.size(), res.metrics.size());
    EXPECT_EQ(back.final_model->params(), res.final_model->params());
}
