#pragma once

#include "paretoset/common.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace paretoset {

// Softmax onto the probability simplex.
inline Vector to_simplex(const Eigen::Ref<const Vector>& v) {
    const double mx = v.maxCoeff();
    Vector e = (v.array() - mx).exp();
    return e / e.sum();
}

inline bool on_simplex(const Eigen::Ref<const Vector>& w, double tol = 1e-12) {
    return w.size() > 0 && (w.array() >= 0.0).all() && std::abs(w.sum() - 1.0) <= tol;
}

// Simplex check with tolerance, then clip-and-renormalize. Throws DomainError on failure.
inline Vector validate_preference(const Eigen::Ref<const Vector>& w, int m, double tol = 1e-6) {
    if (w.size() != m)
        throw DomainError("preference vector has " + std::to_string(w.size()) + " entries, expected " + std::to_string(m));
    if (!w.allFinite()) throw DomainError("preference vector has non-finite entries");
    if ((w.array() < -tol).any()) throw DomainError("preference vector has negative entries");
    if (std::abs(w.sum() - 1.0) > tol) {
        std::ostringstream msg;
        msg << "preference vector sums to " << w.sum() << ", not 1";
        throw DomainError(msg.str());
    }
    Vector out = w.cwiseMax(0.0);
    return out / out.sum();
}

struct CemConfig {
    int samples = 1000;
    int elites = 100;
    int iterations = 5;
    double smoothing = 0.7;   // weight kept on the previous mean/std at each refit
    double init_std = 1.0;
    double min_std = 1e-8;

    void validate() const {
        if (samples < 1 || elites < 1 || elites > samples) throw DomainError("CEM needs 1 <= elites <= samples");
        if (iterations < 1) throw DomainError("CEM needs at least one iteration");
        if (!(smoothing >= 0.0 && smoothing < 1.0)) throw DomainError("CEM smoothing must lie in [0, 1)");
    }
};

// Gaussian sampling distribution in pre-simplex (logit) space.
struct CemState {
    Vector mean;
    Vector std;
    int iteration = 0;

    static CemState initial(int m, double init_std = 1.0) {
        return {Vector::Zero(m), Vector::Constant(m, init_std), 0};
    }
};

struct CemResult {
    Vector w_star;                   // to_simplex(final mean)
    Matrix elites;                   // m x k preference vectors of the last iteration
    Vector elite_scores;             // ascending
    std::vector<double> mean_elite_score;  // one entry per iteration
    CemState state;
    int std_clamps = 0;
};

// Cross-entropy search for argmin_w score(w) over the simplex.
// `score_batch` maps an m x N matrix of preference vectors to N scores.
template <class ScoreBatch>
CemResult cem_optimize(ScoreBatch&& score_batch, int m, const CemConfig& cfg, CemState state, std::mt19937_64& rng) {
    cfg.validate();
    if (state.mean.size() != m || state.std.size() != m) throw DomainError("CEM state dimension mismatch");
    std::normal_distribution<double> normal(0.0, 1.0);
    CemResult res;
    Matrix logits(m, cfg.samples);
    Matrix ws(m, cfg.samples);
    std::vector<int> order(static_cast<std::size_t>(cfg.samples));
    const auto k = static_cast<std::size_t>(cfg.elites);

    for (int it = 0; it < cfg.iterations; ++it) {
        for (int j = 0; j < cfg.samples; ++j) {
            for (int i = 0; i < m; ++i) logits(i, j) = state.mean[i] + state.std[i] * normal(rng);
            ws.col(j) = to_simplex(logits.col(j));
        }
        Vector scores = score_batch(static_cast<const Matrix&>(ws));
        for (Eigen::Index j = 0; j < scores.size(); ++j)
            if (!std::isfinite(scores[j])) scores[j] = std::numeric_limits<double>::infinity();

        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), [&](int a, int b) {
            return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
        });

        Matrix elite_logits(m, cfg.elites);
        res.elites.resize(m, cfg.elites);
        res.elite_scores.resize(cfg.elites);
        for (std::size_t e = 0; e < k; ++e) {
            const auto idx = static_cast<Eigen::Index>(order[e]);
            elite_logits.col(static_cast<Eigen::Index>(e)) = logits.col(idx);
            res.elites.col(static_cast<Eigen::Index>(e)) = ws.col(idx);
            res.elite_scores[static_cast<Eigen::Index>(e)] = scores[idx];
        }
        res.mean_elite_score.push_back(res.elite_scores.mean());

        const Vector fit_mean = elite_logits.rowwise().mean();
        const Vector fit_std = ((elite_logits.colwise() - fit_mean).array().square().rowwise().mean()).sqrt();
        state.mean = cfg.smoothing * state.mean + (1.0 - cfg.smoothing) * fit_mean;
        state.std = cfg.smoothing * state.std + (1.0 - cfg.smoothing) * fit_std;
        for (int i = 0; i < m; ++i) {
            if (state.std[i] < cfg.min_std) {
                state.std[i] = cfg.min_std;
                ++res.std_clamps;
            }
        }
        ++state.iteration;
    }
    res.w_star = to_simplex(state.mean);
    res.state = std::move(state);
    return res;
}

// Adapts a single-vector score to the batched interface.
template <class Score>
auto batched(Score&& score) {
    return [score = std::forward<Score>(score)](const Matrix& ws) {
        Vector out(ws.cols());
        for (Eigen::Index j = 0; j < ws.cols(); ++j) out[j] = score(Vector(ws.col(j)));
        return out;
    };
}

struct ImplicitGradientOptions {
    double fd_step = 1e-3;
    double stationarity_tol = 1e-6;
    bool check_stationarity = true;
    double max_condition = 1e12;
};

// -(d2 Omega / d theta d w^T) (d2 Omega / d w d w^T)^{-1} (d Psi / d w), from precomputed parts.
// cross is dim(theta) x dim(w), hess_ww is dim(w) x dim(w).
inline Vector implicit_gradient_from_parts(const Matrix& cross, const Matrix& hess_ww, const Vector& dpsi,
                                           double max_condition = 1e12) {
    Eigen::JacobiSVD<Matrix> svd(hess_ww);
    const auto& sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    if (!(cond <= max_condition)) {
        std::ostringstream msg;
        msg << "implicit gradient: Hessian w.r.t. w is singular (condition estimate " << cond << ")";
        throw NumericError(msg.str());
    }
    return -cross * Eigen::FullPivLU<Matrix>(hess_ww).solve(dpsi);
}

// Implicit-function-theorem gradient of Psi(w*(theta)) with all derivatives taken
// by central finite differences. Intended for verification on small problems.
inline Vector implicit_gradient(const std::function<double(const Vector&, const Vector&)>& omega,
                                const std::function<double(const Vector&)>& psi, const Vector& theta,
                                const Vector& w_star, const ImplicitGradientOptions& opt = {}) {
    const double h = opt.fd_step;
    const auto dw = w_star.size();
    const auto dt = theta.size();
    auto unit = [](Eigen::Index size, Eigen::Index i) { Vector e = Vector::Zero(size); e[i] = 1.0; return e; };

    if (opt.check_stationarity) {
        Vector g(dw);
        for (Eigen::Index i = 0; i < dw; ++i) {
            const Vector e = unit(dw, i) * h;
            g[i] = (omega(w_star + e, theta) - omega(w_star - e, theta)) / (2 * h);
        }
        if (!(g.norm() < opt.stationarity_tol)) {
            std::ostringstream msg;
            msg << "implicit gradient: w* is not stationary (|dOmega/dw| = " << g.norm() << ")";
            throw DomainError(msg.str());
        }
    }

    Matrix hww(dw, dw);
    for (Eigen::Index i = 0; i < dw; ++i)
        for (Eigen::Index j = 0; j < dw; ++j) {
            const Vector ei = unit(dw, i) * h, ej = unit(dw, j) * h;
            hww(i, j) = (omega(w_star + ei + ej, theta) - omega(w_star + ei - ej, theta) -
                         omega(w_star - ei + ej, theta) + omega(w_star - ei - ej, theta)) / (4 * h * h);
        }
    Matrix cross(dt, dw);
    for (Eigen::Index a = 0; a < dt; ++a)
        for (Eigen::Index j = 0; j < dw; ++j) {
            const Vector ta = unit(dt, a) * h, ej = unit(dw, j) * h;
            cross(a, j) = (omega(w_star + ej, theta + ta) - omega(w_star - ej, theta + ta) -
                           omega(w_star + ej, theta - ta) + omega(w_star - ej, theta - ta)) / (4 * h * h);
        }
    Vector dpsi(dw);
    for (Eigen::Index i = 0; i < dw; ++i) {
        const Vector e = unit(dw, i) * h;
        dpsi[i] = (psi(w_star + e) - psi(w_star - e)) / (2 * h);
    }
    return implicit_gradient_from_parts(cross, hww, dpsi, opt.max_condition);
}

} // namespace paretoset
