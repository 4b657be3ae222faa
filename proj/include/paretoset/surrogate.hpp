#pragma once

#include "paretoset/common.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>
#include <optional>
#include <random>

namespace paretoset {

struct GpConfig {
    double noise_floor = 1e-6;       // fixed noise variance in standardized target units
    int hyperopt_restarts = 3;
    int hyperopt_iterations = 200;
    double hyperopt_learning_rate = 0.05;
    double lcb_kappa = 0.0;
    bool standardize_targets = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(noise_floor > 0.0)) throw DomainError("GP noise_floor must be > 0");
        if (hyperopt_restarts < 1) throw DomainError("GP hyperopt_restarts must be >= 1");
        if (hyperopt_iterations < 0) throw DomainError("GP hyperopt_iterations must be >= 0");
        if (!(lcb_kappa >= 0.0)) throw DomainError("lcb_kappa must be >= 0");
    }
};

// Log-space ARD RBF hyperparameters of one GP.
struct GpHyper {
    Vector log_lengthscales;
    double log_signal_var = 0.0;
};

// Zero-mean GP with an ARD RBF kernel on inputs already scaled to [0,1]^n.
class GaussianProcess {
public:
    static constexpr double kMaxJitter = 1e-4;

    // Builds the posterior for fixed hyperparameters. Targets are used as given.
    static GaussianProcess condition(const Matrix& inputs, const Vector& targets, const GpHyper& hyper,
                                     double noise_var) {
        GaussianProcess gp;
        gp.inputs_ = inputs;
        gp.targets_ = targets;
        gp.hyper_ = hyper;
        gp.noise_var_ = noise_var;
        gp.factorize();
        return gp;
    }

    // Log marginal likelihood and its gradient w.r.t. (log lengthscales..., log signal variance).
    static double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const GpHyper& hyper,
                                          double noise_var, Vector* grad) {
        const auto n = inputs.rows();
        const auto count = inputs.cols();
        const Vector ls = hyper.log_lengthscales.array().exp();
        const double sf2 = std::exp(hyper.log_signal_var);
        const Matrix scaled = inputs.array().colwise() / ls.array();
        const Matrix expo = kernel_exponent(scaled, scaled);
        const Matrix base = (-0.5 * expo.array()).exp();
        Matrix k = sf2 * base;
        k.diagonal().array() += noise_var;
        Eigen::LLT<Matrix> llt(k);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        const Vector alpha = llt.solve(targets);
        const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        const double lml = -0.5 * targets.dot(alpha) - 0.5 * logdet -
                           0.5 * static_cast<double>(count) * std::log(2.0 * 3.14159265358979323846);
        if (grad) {
            const Matrix kinv = llt.solve(Matrix::Identity(count, count));
            const Matrix w = alpha * alpha.transpose() - kinv;
            const Matrix kb = sf2 * base;
            grad->resize(n + 1);
            for (Eigen::Index d = 0; d < n; ++d) {
                const Eigen::RowVectorXd row = scaled.row(d);
                double acc = 0.0;
                for (Eigen::Index j = 0; j < count; ++j)
                    for (Eigen::Index i = 0; i < count; ++i) {
                        const double diff = row[i] - row[j];
                        acc += w(i, j) * kb(i, j) * diff * diff;
                    }
                (*grad)[d] = 0.5 * acc;
            }
            (*grad)[n] = 0.5 * (w.array() * kb.array()).sum();
        }
        return lml;
    }

    // Posterior mean and latent variance (standardized units) at a batch of inputs (n x B).
    Vector mean(const Matrix& u) const { return cross_kernel(u).transpose() * alpha_; }

    Vector variance(const Matrix& u) const {
        const Matrix ks = cross_kernel(u);
        const Matrix v = llt_.matrixL().solve(ks);
        const double sf2 = std::exp(hyper_.log_signal_var);
        return (sf2 - v.colwise().squaredNorm().transpose().array()).max(0.0);
    }

    // Gradients w.r.t. u of the mean (n x B) and, if requested, of the variance.
    void mean_var_gradients(const Matrix& u, Vector& mean_out, Matrix& dmean, Vector* var_out,
                            Matrix* dvar) const {
        const Matrix ks = cross_kernel(u);  // N x B
        const Vector ls2 = (2.0 * hyper_.log_lengthscales.array()).exp();
        mean_out = ks.transpose() * alpha_;
        dmean = weighted_kernel_gradient(u, ks.array().colwise() * alpha_.array(), ls2);
        if (var_out && dvar) {
            const Matrix kinv_ks = llt_.solve(ks);
            const double sf2 = std::exp(hyper_.log_signal_var);
            *var_out = (sf2 - (ks.array() * kinv_ks.array()).colwise().sum().transpose()).max(0.0);
            *dvar = -2.0 * weighted_kernel_gradient(u, ks.array() * kinv_ks.array(), ls2);
        }
    }

    const Matrix& inputs() const { return inputs_; }
    const Vector& targets() const { return targets_; }
    const GpHyper& hyper() const { return hyper_; }
    double noise_var() const { return noise_var_; }
    double signal_var() const { return std::exp(hyper_.log_signal_var); }

private:
    static Matrix kernel_exponent(const Matrix& a, const Matrix& b) {
        const Vector na = a.colwise().squaredNorm().transpose();
        const Eigen::RowVectorXd nb = b.colwise().squaredNorm();
        Matrix d = (-2.0 * a.transpose() * b).colwise() + na;
        d.rowwise() += nb;
        return d.cwiseMax(0.0);
    }

    Matrix cross_kernel(const Matrix& u) const {
        const Vector ls = hyper_.log_lengthscales.array().exp();
        const Matrix us = u.array().colwise() / ls.array();
        return std::exp(hyper_.log_signal_var) * (-0.5 * kernel_exponent(scaled_inputs_, us).array()).exp();
    }

    // sum_i weights(i,b) * dk(x_i, u_b)/du_b, with dk/du = -k (u - x) / l^2 folded into weights.
    Matrix weighted_kernel_gradient(const Matrix& u, const Matrix& weights, const Vector& ls2) const {
        const Eigen::RowVectorXd colsum = weights.colwise().sum();
        Matrix g = inputs_ * weights;  // n x B : sum_i x_id w_ib
        for (Eigen::Index d = 0; d < u.rows(); ++d)
            g.row(d) = -(u.row(d).array() * colsum.array() - g.row(d).array()) / ls2[d];
        return g;
    }

    void factorize() {
        const Vector ls = hyper_.log_lengthscales.array().exp();
        scaled_inputs_ = inputs_.array().colwise() / ls.array();
        Matrix k = std::exp(hyper_.log_signal_var) * (-0.5 * kernel_exponent(scaled_inputs_, scaled_inputs_).array()).exp();
        double jitter = 0.0;
        for (;;) {
            Matrix kn = k;
            kn.diagonal().array() += noise_var_ + jitter;
            llt_.compute(kn);
            if (llt_.info() == Eigen::Success) break;
            jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
            if (jitter > kMaxJitter) throw FitError("kernel matrix not positive definite even with jitter 1e-4");
        }
        noise_var_ += jitter;
        alpha_ = llt_.solve(targets_);
    }

    Matrix inputs_;
    Matrix scaled_inputs_;
    Vector targets_;
    GpHyper hyper_;
    double noise_var_ = 0.0;
    Eigen::LLT<Matrix> llt_;
    Vector alpha_;
};

struct GpPrediction {
    Vector mean;
    Vector std;
    bool clipped = false;  // input was outside the box and got clipped
};

// One independent GP per objective over min-max normalized inputs.
class GpSurrogate {
public:
    GpSurrogate() = default;

    // Fits hyperparameters by multi-start gradient ascent on the log marginal likelihood.
    // `warm` optionally seeds the first restart (one entry per objective).
    static GpSurrogate fit(const Matrix& xs, const Matrix& ys, const Vector& lower, const Vector& upper,
                           const GpConfig& cfg, const std::vector<GpHyper>* warm = nullptr) {
        cfg.validate();
        if (xs.cols() != ys.cols()) throw DomainError("GP fit: |X| != |Y|");
        if (xs.cols() < 2) throw DomainError("GP fit needs at least 2 points");
        GpSurrogate s = prepare(xs, ys, lower, upper, cfg);
        std::mt19937_64 rng(cfg.seed);
        for (Eigen::Index j = 0; j < ys.rows(); ++j) {
            const GpHyper* start = (warm && static_cast<std::size_t>(j) < warm->size()) ? &(*warm)[static_cast<std::size_t>(j)] : nullptr;
            const GpHyper best = optimize(s.unit_inputs_, s.std_targets_.row(j).transpose(), cfg, start, rng);
            s.gps_.push_back(GaussianProcess::condition(s.unit_inputs_, s.std_targets_.row(j).transpose(), best, cfg.noise_floor));
        }
        return s;
    }

    // Rebuilds a surrogate from stored hyperparameters without optimization.
    static GpSurrogate from_hyper(const Matrix& xs, const Matrix& ys, const Vector& lower, const Vector& upper,
                                  const GpConfig& cfg, const std::vector<GpHyper>& hyper) {
        if (hyper.size() != static_cast<std::size_t>(ys.rows())) throw DomainError("GP: one hyperparameter set per objective required");
        GpSurrogate s = prepare(xs, ys, lower, upper, cfg);
        for (Eigen::Index j = 0; j < ys.rows(); ++j)
            s.gps_.push_back(GaussianProcess::condition(s.unit_inputs_, s.std_targets_.row(j).transpose(),
                                                        hyper[static_cast<std::size_t>(j)], cfg.noise_floor));
        return s;
    }

    int num_objectives() const { return static_cast<int>(gps_.size()); }
    int num_inputs() const { return static_cast<int>(lower_.size()); }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const std::vector<GaussianProcess>& gps() const { return gps_; }
    const Vector& target_mean() const { return y_mean_; }
    const Vector& target_scale() const { return y_scale_; }
    std::vector<GpHyper> hyperparameters() const {
        std::vector<GpHyper> out;
        for (const auto& gp : gps_) out.push_back(gp.hyper());
        return out;
    }

    GpPrediction predict(const Eigen::Ref<const Vector>& x) const {
        GpPrediction p;
        Vector xc = x.cwiseMax(lower_).cwiseMin(upper_);
        p.clipped = (xc.array() != x.array()).any();
        const Matrix u = to_unit(xc);
        p.mean.resize(num_objectives());
        p.std.resize(num_objectives());
        for (int j = 0; j < num_objectives(); ++j) {
            p.mean[j] = y_mean_[j] + y_scale_[j] * gps_[static_cast<std::size_t>(j)].mean(u)[0];
            p.std[j] = y_scale_[j] * std::sqrt(gps_[static_cast<std::size_t>(j)].variance(u)[0]);
        }
        return p;
    }

    // Posterior means for a batch of decision vectors (n x B) -> (m x B).
    Matrix mean_batch(const Matrix& xs) const {
        const Matrix u = to_unit(xs.cwiseMax(lower_.replicate(1, xs.cols())).cwiseMin(upper_.replicate(1, xs.cols())));
        Matrix out(num_objectives(), xs.cols());
        for (int j = 0; j < num_objectives(); ++j)
            out.row(j) = (y_mean_[j] + y_scale_[j] * gps_[static_cast<std::size_t>(j)].mean(u).array()).transpose();
        return out;
    }

    Matrix std_batch(const Matrix& xs) const {
        const Matrix u = to_unit(xs.cwiseMax(lower_.replicate(1, xs.cols())).cwiseMin(upper_.replicate(1, xs.cols())));
        Matrix out(num_objectives(), xs.cols());
        for (int j = 0; j < num_objectives(); ++j)
            out.row(j) = (y_scale_[j] * gps_[static_cast<std::size_t>(j)].variance(u).array().sqrt()).transpose();
        return out;
    }

    // Lower confidence bound mu - kappa * sigma and its Jacobian w.r.t. x.
    // jac is (m*n) x B with entry (j*n + d, b) = d f_j / d x_d at column b.
    void lcb_with_jacobian(const Matrix& xs, double kappa, Matrix& values, Matrix& jac) const {
        const auto n = xs.rows();
        const auto count = xs.cols();
        const Matrix u = to_unit(xs.cwiseMax(lower_.replicate(1, count)).cwiseMin(upper_.replicate(1, count)));
        const Vector inv_range = (upper_ - lower_).cwiseInverse();
        values.resize(num_objectives(), count);
        jac.resize(num_objectives() * n, count);
        for (int j = 0; j < num_objectives(); ++j) {
            const auto& gp = gps_[static_cast<std::size_t>(j)];
            Vector mean, var;
            Matrix dmean, dvar;
            gp.mean_var_gradients(u, mean, dmean, kappa > 0.0 ? &var : nullptr, kappa > 0.0 ? &dvar : nullptr);
            Vector val = y_mean_[j] + y_scale_[j] * mean.array();
            Matrix dval = y_scale_[j] * dmean;
            if (kappa > 0.0) {
                const Vector sd = var.array().sqrt().max(1e-12);
                val -= kappa * y_scale_[j] * sd;
                dval -= kappa * y_scale_[j] * (dvar.array().rowwise() / (2.0 * sd.transpose().array())).matrix();
            }
            values.row(j) = val.transpose();
            jac.middleRows(j * n, n) = dval.array().colwise() * inv_range.array();
        }
    }

    Matrix to_unit(const Matrix& xs) const {
        return (xs.colwise() - lower_).array().colwise() / (upper_ - lower_).array();
    }

private:
    static GpSurrogate prepare(const Matrix& xs, const Matrix& ys, const Vector& lower, const Vector& upper,
                               const GpConfig& cfg) {
        GpSurrogate s;
        s.lower_ = lower;
        s.upper_ = upper;
        s.unit_inputs_ = s.to_unit(xs);
        const auto m = ys.rows();
        s.y_mean_ = Vector::Zero(m);
        s.y_scale_ = Vector::Ones(m);
        if (cfg.standardize_targets) {
            s.y_mean_ = ys.rowwise().mean();
            for (Eigen::Index j = 0; j < m; ++j) {
                const double sd = std::sqrt((ys.row(j).array() - s.y_mean_[j]).square().mean());
                s.y_scale_[j] = sd > 1e-12 ? sd : 1.0;
            }
        }
        s.std_targets_ = (ys.colwise() - s.y_mean_).array().colwise() / s.y_scale_.array();
        return s;
    }

    static GpHyper optimize(const Matrix& u, const Vector& y, const GpConfig& cfg, const GpHyper* warm,
                            std::mt19937_64& rng) {
        const auto n = u.rows();
        constexpr double kMinLogLs = -4.6, kMaxLogLs = 4.6;    // lengthscale in [0.01, 100]
        constexpr double kMinLogSf = -6.9, kMaxLogSf = 6.9;    // signal variance in [1e-3, 1e3]
        std::uniform_real_distribution<double> ls_init(std::log(0.1), std::log(2.0));
        std::uniform_real_distribution<double> sf_init(std::log(0.3), std::log(3.0));

        GpHyper best;
        double best_lml = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < cfg.hyperopt_restarts; ++r) {
            GpHyper h;
            if (r == 0 && warm && warm->log_lengthscales.size() == n) {
                h = *warm;
            } else if (r == 0) {
                h.log_lengthscales = Vector::Constant(n, std::log(0.5));
                h.log_signal_var = 0.0;
            } else {
                h.log_lengthscales.resize(n);
                for (Eigen::Index d = 0; d < n; ++d) h.log_lengthscales[d] = ls_init(rng);
                h.log_signal_var = sf_init(rng);
            }
            // Adam ascent in log space.
            Vector p(n + 1), m1 = Vector::Zero(n + 1), m2 = Vector::Zero(n + 1), g;
            p << h.log_lengthscales, h.log_signal_var;
            GpHyper cand = h;
            double lml = GaussianProcess::log_marginal_likelihood(u, y, cand, cfg.noise_floor, &g);
            GpHyper run_best = cand;
            double run_best_lml = lml;
            for (int it = 0; it < cfg.hyperopt_iterations && std::isfinite(lml); ++it) {
                m1 = 0.9 * m1 + 0.1 * g;
                m2 = 0.999 * m2 + 0.001 * g.cwiseProduct(g);
                const double c1 = 1.0 - std::pow(0.9, it + 1), c2 = 1.0 - std::pow(0.999, it + 1);
                p += cfg.hyperopt_learning_rate * ((m1 / c1).array() / ((m2 / c2).array().sqrt() + 1e-8)).matrix();
                p.head(n) = p.head(n).cwiseMax(kMinLogLs).cwiseMin(kMaxLogLs);
                p[n] = std::clamp(p[n], kMinLogSf, kMaxLogSf);
                cand.log_lengthscales = p.head(n);
                cand.log_signal_var = p[n];
                lml = GaussianProcess::log_marginal_likelihood(u, y, cand, cfg.noise_floor, &g);
                if (lml > run_best_lml) {
                    run_best_lml = lml;
                    run_best = cand;
                }
            }
            if (run_best_lml > best_lml) {
                best_lml = run_best_lml;
                best = run_best;
            }
        }
        if (!std::isfinite(best_lml)) {
            // Every candidate failed the Cholesky; fall back to the default and let jitter escalation decide.
            best.log_lengthscales = Vector::Constant(n, std::log(0.5));
            best.log_signal_var = 0.0;
        }
        return best;
    }

    Vector lower_, upper_;
    Matrix unit_inputs_;
    Matrix std_targets_;
    Vector y_mean_, y_scale_;
    std::vector<GaussianProcess> gps_;
};

// Objective model backed by the surrogate: f(x) = mu(x) - kappa * sigma(x).
class SurrogateObjective {
public:
    SurrogateObjective(const GpSurrogate& gp, double kappa) : gp_(&gp), kappa_(kappa) {
        if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
    }
    int num_objectives() const { return gp_->num_objectives(); }
    Matrix values(const Matrix& xs) const {
        if (kappa_ == 0.0) return gp_->mean_batch(xs);
        return gp_->mean_batch(xs) - kappa_ * gp_->std_batch(xs);
    }
    void values_and_jacobians(const Matrix& xs, Matrix& values, Matrix& jac) const {
        gp_->lcb_with_jacobian(xs, kappa_, values, jac);
    }

private:
    const GpSurrogate* gp_;
    double kappa_;
};

inline Vector surrogate_objective(const GpSurrogate& gp, const Eigen::Ref<const Vector>& x, double kappa) {
    if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
    const auto p = gp.predict(x);
    return p.mean - kappa * p.std;
}

inline nlohmann::json to_json(const GpHyper& h) {
    return {{"log_lengthscales", to_std(h.log_lengthscales)}, {"log_signal_var", h.log_signal_var}};
}

inline GpHyper gp_hyper_from_json(const nlohmann::json& j) {
    GpHyper h;
    h.log_lengthscales = from_std(j.at("log_lengthscales").get<std::vector<double>>());
    h.log_signal_var = j.at("log_signal_var").get<double>();
    return h;
}

} // namespace paretoset
