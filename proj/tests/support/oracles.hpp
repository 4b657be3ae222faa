#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include "paretoset/metrics.hpp"
#include "paretoset/prefopt.hpp"
#include "paretoset/scalarize.hpp"
#include "paretoset/set_model.hpp"

#include <algorithm>
#include <random>

namespace paretoset::oracle {

// Norm-wise relative error ||a - b|| / max(||b||, 1e-8).
inline double relative_error(const Vector& analytic, const Vector& reference) {
    return (analytic - reference).norm() / std::max(reference.norm(), 1e-8);
}

// Backward pass of a randomly shaped set model against central differences of
// sum_b upstream(:,b)^T forward(ws(:,b)); checks both parameter and input gradients.
inline double set_model_gradient_error(std::uint64_t seed, double h = 1e-5) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> m_d(2, 3), n_d(1, 6), width_d(3, 12), layers_d(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int m = m_d(rng), n = n_d(rng);
    Vector lower(n), upper(n);
    for (int i = 0; i < n; ++i) {
        lower[i] = u(rng);
        upper[i] = lower[i] + 0.5 + std::abs(u(rng));
    }
    SetModel model = SetModel::init(rng(), m, n, lower, upper, width_d(rng), layers_d(rng));
    for (Eigen::Index i = 0; i < model.params().size(); ++i) model.params()[i] += 0.3 * u(rng);

    const int batch = 3;
    Matrix ws(m, batch), up(n, batch);
    for (int b = 0; b < batch; ++b) {
        Vector v(m);
        for (int i = 0; i < m; ++i) v[i] = 2 * u(rng);
        ws.col(b) = to_simplex(v);
        for (int i = 0; i < n; ++i) up(i, b) = u(rng);
    }
    auto loss = [&](const SetModel& mdl, const Matrix& inputs) {
        return (up.array() * mdl.forward_batch(inputs).array()).sum();
    };
    const auto g = model.backward_batch(ws, up);

    Vector fd_params(model.params().size());
    for (Eigen::Index i = 0; i < fd_params.size(); ++i) {
        SetModel a = model, b = model;
        a.params()[i] += h;
        b.params()[i] -= h;
        fd_params[i] = (loss(a, ws) - loss(b, ws)) / (2 * h);
    }
    Matrix fd_inputs(m, batch);
    for (int b = 0; b < batch; ++b)
        for (int i = 0; i < m; ++i) {
            Matrix p = ws, q = ws;
            p(i, b) += h;
            q(i, b) -= h;
            fd_inputs(i, b) = (loss(model, p) - loss(model, q)) / (2 * h);
        }
    const Vector gi = g.inputs.reshaped();
    const Vector fi = fd_inputs.reshaped();
    return std::max(relative_error(g.params, fd_params), relative_error(gi, fi));
}

struct GradFCheck {
    int checked = 0;
    double worst = 0.0;
};

// grad_f against central differences at `count` random points at least 1e-3 away
// from the kinks of |.| and max.
inline GradFCheck grad_f_error(ScalarizationKind kind, int count, std::uint64_t seed, double h = 1e-6) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    GradFCheck out;
    for (int t = 0; out.checked < count && t < 100 * count; ++t) {
        ScalarizationConfig cfg = ScalarizationConfig::defaults(kind);
        cfg.pbi_signed = t % 3 == 0;
        cfg.pbi_normalized_direction = t % 2 == 0;
        const int m = 2 + t % 2;
        Vector w(m), f(m), z(m);
        for (int i = 0; i < m; ++i) {
            w[i] = u(rng);
            f[i] = 2 * u(rng) - 0.5;
            z[i] = 0.5 * u(rng) - 0.25;
        }
        w /= w.sum();
        const Vector d = f - z;
        std::vector<double> terms(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) terms[static_cast<std::size_t>(i)] = w[i] * std::abs(d[i]);
        std::sort(terms.rbegin(), terms.rend());
        if (terms[0] - terms[1] < 1e-3 || d.cwiseAbs().minCoeff() < 1e-3 || std::abs(d.dot(w)) < 1e-3) continue;
        const Vector g = grad_f(cfg, f, w, z);
        Vector fd(m);
        for (int i = 0; i < m; ++i) {
            Vector p = f, q = f;
            p[i] += h;
            q[i] -= h;
            fd[i] = (scalarize(cfg, p, w, z) - scalarize(cfg, q, w, z)) / (2 * h);
        }
        out.worst = std::max(out.worst, relative_error(g, fd));
        ++out.checked;
    }
    return out;
}

// Random 2-D quadratic lower level: Omega(w, theta) = 1/2 w^T A w - w^T (B theta + c)
// with A symmetric positive definite, and a nonlinear upper level Psi. Returns the
// max abs difference between implicit_gradient and finite differences of Psi(w*(theta))
// with w* re-solved in closed form.
inline double implicit_gradient_vs_resolve(std::uint64_t seed, double h = 1e-5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix r(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            r(i, j) = u(rng);
            b(i, j) = u(rng);
        }
    const Matrix a = r * r.transpose() + Matrix::Identity(2, 2);
    const Vector c = (Vector(2) << u(rng), u(rng)).finished();
    const Vector theta = (Vector(2) << u(rng), u(rng)).finished();
    auto solve = [&](const Vector& t) -> Vector { return a.ldlt().solve(b * t + c); };
    auto omega = [&](const Vector& w, const Vector& t) { return 0.5 * w.dot(a * w) - w.dot(b * t + c); };
    auto psi = [](const Vector& w) { return std::sin(w[0]) + w[0] * w[1] + 0.5 * w[1] * w[1]; };
    const Vector ig = implicit_gradient(omega, psi, theta, solve(theta));
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
        Vector tp = theta, tm = theta;
        tp[k] += h;
        tm[k] -= h;
        const double fd = (psi(solve(tp)) - psi(solve(tm))) / (2 * h);
        worst = std::max(worst, std::abs(fd - ig[k]));
    }
    return worst;
}

// L-infinity error of CEM on ||w - target||^2 over the 2-simplex.
inline double cem_quadratic_error(std::uint64_t seed, int iterations = 10) {
    const Vector target = (Vector(2) << 0.7, 0.3).finished();
    CemConfig cfg;
    cfg.samples = 1000;
    cfg.elites = 100;
    cfg.iterations = iterations;
    std::mt19937_64 rng(seed);
    const auto res = cem_optimize(batched([&](const Vector& w) { return (w - target).squaredNorm(); }), 2, cfg,
                                  CemState::initial(2, cfg.init_std), rng);
    return (res.w_star - target).cwiseAbs().maxCoeff();
}

// Random point set for hypervolume checks: m in {2,3}, points inside [0,1]^m, ref (1.1,...).
inline Matrix random_point_set(int m, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix pts(m, count);
    for (int j = 0; j < count; ++j)
        for (int i = 0; i < m; ++i) pts(i, j) = u(rng);
    return pts;
}

} // namespace paretoset::oracle
