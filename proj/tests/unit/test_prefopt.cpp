#include "paretoset/prefopt.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace paretoset;

TEST(ToSimplex, Values) {
    EXPECT_TRUE(to_simplex(Vector::Zero(2)).isApprox(Vector::Constant(2, 0.5)));
    for (double t : {-50.0, 0.0, 3.0, 700.0})
        EXPECT_TRUE(to_simplex(Vector::Constant(3, t)).isApprox(Vector::Constant(3, 1.0 / 3.0), 1e-15));
    const Vector w = to_simplex((Vector(2) << 10.0, 0.0).finished());
    EXPECT_NEAR(w[0], 0.9999546021312976, 1e-15);
    EXPECT_NEAR(w[1], 4.5397868702434395e-05, 1e-17);
    EXPECT_TRUE(on_simplex(to_simplex((Vector(3) << 1000.0, -1000.0, 0.0).finished())));
}

TEST(ValidatePreference, Rules) {
    EXPECT_NO_THROW(validate_preference((Vector(2) << 0.5, 0.5).finished(), 2));
    EXPECT_THROW(validate_preference((Vector(2) << 0.6, 0.5).finished(), 2), DomainError);
    EXPECT_THROW(validate_preference((Vector(2) << 1.5, -0.5).finished(), 2), DomainError);
    EXPECT_THROW(validate_preference((Vector(3) << 0.5, 0.5, 0.0).finished(), 2), DomainError);
    EXPECT_THROW(validate_preference((Vector(2) << std::nan(""), 1.0).finished(), 2), DomainError);
    const Vector fixed = validate_preference((Vector(2) << 1.0 + 5e-7, -1e-7).finished(), 2);
    EXPECT_TRUE(on_simplex(fixed));
}

TEST(Cem, ConvergesOnQuadratic) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_LT(oracle::cem_quadratic_error(seed), 0.02) << seed;
}

TEST(Cem, ConstantScoreStaysNearUniform) {
    CemConfig cfg;
    cfg.iterations = 10;
    std::mt19937_64 rng(3);
    const auto res = cem_optimize([](const Matrix& ws) { return Vector::Zero(ws.cols()).eval(); }, 3, cfg,
                                  CemState::initial(3), rng);
    EXPECT_LT((res.w_star - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Cem, DeterministicGivenSeed) {
    CemConfig cfg;
    auto score = batched([](const Vector& w) { return std::pow(w[0] - 0.2, 2); });
    std::mt19937_64 a(11), b(11);
    const auto ra = cem_optimize(score, 2, cfg, CemState::initial(2), a);
    const auto rb = cem_optimize(score, 2, cfg, CemState::initial(2), b);
    EXPECT_EQ(ra.w_star, rb.w_star);
    EXPECT_EQ(ra.elites, rb.elites);
}

TEST(Cem, ElitesSortedAndOnSimplex) {
    CemConfig cfg;
    cfg.samples = 200;
    cfg.elites = 20;
    std::mt19937_64 rng(1);
    const auto res = cem_optimize(batched([](const Vector& w) { return w[1]; }), 3, cfg, CemState::initial(3), rng);
    ASSERT_EQ(res.elites.cols(), 20);
    for (int j = 0; j < 20; ++j) {
        EXPECT_TRUE(on_simplex(res.elites.col(j), 1e-12));
        if (j > 0) EXPECT_LE(res.elite_scores[j - 1], res.elite_scores[j]);
    }
    EXPECT_EQ(res.mean_elite_score.size(), static_cast<std::size_t>(cfg.iterations));
}

TEST(Cem, NonFiniteScoresNeverElite) {
    CemConfig cfg;
    cfg.samples = 100;
    cfg.elites = 10;
    std::mt19937_64 rng(2);
    const auto res = cem_optimize(batched([](const Vector& w) { return w[0] > 0.5 ? std::nan("") : w[0]; }), 2, cfg,
                                  CemState::initial(2), rng);
    EXPECT_TRUE(res.elite_scores.allFinite());
}

TEST(Cem, ConfigValidation) {
    CemConfig cfg;
    cfg.elites = cfg.samples + 1;
    std::mt19937_64 rng(0);
    EXPECT_THROW(cem_optimize(batched([](const Vector&) { return 0.0; }), 2, cfg, CemState::initial(2), rng), DomainError);
}

TEST(ImplicitGradient, QuadraticToyMatchesClosedForm) {
    auto omega = [](const Vector& w, const Vector& t) { return std::pow(w[0] - t[0], 2); };
    auto psi = [](const Vector& w) { return w[0] * w[0]; };
    for (double theta : {-1.5, 0.3, 2.0}) {
        const Vector t = Vector::Constant(1, theta);
        EXPECT_NEAR(implicit_gradient(omega, psi, t, t)[0], 2 * theta, 1e-8);
    }
}

TEST(ImplicitGradient, ChainRuleToy) {
    auto omega = [](const Vector& w, const Vector& t) { return std::pow(w[0] - 2 * t[0], 2); };
    auto psi = [](const Vector& w) { return w[0]; };
    const Vector t = Vector::Constant(1, 0.7);
    EXPECT_NEAR(implicit_gradient(omega, psi, t, 2 * t)[0], 2.0, 1e-8);
}

TEST(ImplicitGradient, MatchesResolvedArgmin) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_LT(oracle::implicit_gradient_vs_resolve(seed), 1e-4) << seed;
}

TEST(ImplicitGradient, Errors) {
    auto omega = [](const Vector& w, const Vector& t) { return std::pow(w[0] - t[0], 2); };
    auto psi = [](const Vector& w) { return w[0]; };
    const Vector t = Vector::Constant(1, 1.0);
    EXPECT_THROW(implicit_gradient(omega, psi, t, Vector::Constant(1, 3.0)), DomainError);
    auto flat = [](const Vector&, const Vector&) { return 0.0; };
    EXPECT_THROW(implicit_gradient(flat, psi, t, t), NumericError);
}
