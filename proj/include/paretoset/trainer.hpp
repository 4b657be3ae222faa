#pragma once

#include "paretoset/common.hpp"
#include "paretoset/prefopt.hpp"
#include "paretoset/scalarize.hpp"
#include "paretoset/set_model.hpp"
#include "paretoset/surrogate.hpp"

#include <fstream>
#include <optional>
#include <random>

namespace paretoset {

// Anchor on one objective axis in normalized objective space.
struct ReferencePoint {
    Vector z;
    int axis = 0;
};

// Per-objective ideal/nadir estimates used to map objectives into [0, 1].
struct NormalizationState {
    Vector lower;
    Vector upper;

    static NormalizationState from_points(const Matrix& f) {
        if (f.cols() == 0) throw DomainError("normalization needs at least one point");
        NormalizationState s{f.rowwise().minCoeff(), f.rowwise().maxCoeff()};
        for (Eigen::Index i = 0; i < s.lower.size(); ++i)
            if (!(s.upper[i] > s.lower[i])) s.upper[i] = s.lower[i] + 1e-9;
        return s;
    }
    // Ideal and nadir estimates from the nondominated subset of an evaluated archive.
    static NormalizationState from_archive(const Matrix& f) { return from_points(nondominated_filter(f)); }

    Vector range() const { return upper - lower; }
    Matrix normalize(const Matrix& f) const {
        return (f.colwise() - lower).array().colwise() / range().array();
    }
};

// Stratified uniform coordinates along each selected axis, other coordinates zero.
// `axes` empty means every objective axis.
inline std::vector<ReferencePoint> sample_reference_points(int m, int per_obj, std::mt19937_64& rng,
                                                           const std::vector<int>& axes = {}) {
    if (per_obj < 1) throw DomainError("reference points per objective must be >= 1");
    std::vector<int> use = axes;
    if (use.empty())
        for (int i = 0; i < m; ++i) use.push_back(i);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ReferencePoint> out;
    for (int axis : use) {
        if (axis < 0 || axis >= m) throw DomainError("reference axis out of range");
        for (int s = 0; s < per_obj; ++s) {
            ReferencePoint r{Vector::Zero(m), axis};
            const double c = (s + unit(rng)) / per_obj;
            r.z[axis] = std::min(c, std::nextafter(1.0, 0.0));
            out.push_back(std::move(r));
        }
    }
    return out;
}

// Uniform draws on the simplex via normalized exponentials (symmetric Dirichlet(1)).
inline Matrix sample_simplex(int m, int count, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    Matrix w(m, count);
    for (int j = 0; j < count; ++j) {
        for (int i = 0; i < m; ++i) w(i, j) = expo(rng);
        w.col(j) /= w.col(j).sum();
    }
    return w;
}

struct TrainConfig {
    int iterations = 250;
    int ref_per_objective = 8;
    std::vector<int> ref_axes;   // empty: all axes
    CemConfig cem;
    ScalarizationConfig scalarization;
    double learning_rate = 1e-3;
    int hidden_width = 256;
    int hidden_layers = 3;
    bool random_preferences = false;   // ablation: w* replaced by a uniform simplex draw
    bool implicit_correction = false;  // add the implicit-function gradient term through w*
    std::uint64_t seed = 0;

    void validate() const {
        if (iterations < 0) throw DomainError("training iterations must be >= 0");
        if (ref_per_objective < 1) throw DomainError("ref_per_objective must be >= 1");
        cem.validate();
        scalarization.validate();
    }
};

struct TrainLogRow {
    int iteration = 0;
    double mean_q = 0.0;
    std::vector<double> axis_q;       // mean Q over the reference points of each axis
    double inside_cone_fraction = 0.0;
};

struct TrainLog {
    std::vector<TrainLogRow> rows;
    int degenerate_penalties = 0;
    int learning_rate_halvings = 0;
    int implicit_skipped = 0;

    void append_csv(const std::string& path, int outer_iteration) const {
        const bool fresh = !std::ifstream(path).good();
        std::ofstream out(path, std::ios::app);
        if (!out) throw LoadError("cannot append training log " + path);
        if (fresh && !rows.empty()) {
            out << "mobo_iter,iter,mean_q";
            for (std::size_t a = 0; a < rows.front().axis_q.size(); ++a) out << ",axis" << a << "_q";
            out << ",inside_cone\n";
        }
        out.precision(10);
        for (const auto& r : rows) {
            out << outer_iteration << ',' << r.iteration << ',' << r.mean_q;
            for (double q : r.axis_q) out << ',' << q;
            out << ',' << r.inside_cone_fraction << '\n';
        }
    }
};

// Objective models provide values(X) -> F (m x B) and values_and_jacobians(X, F, J) with
// J laid out as (m*n) x B, row j*n + d holding dF_j/dx_d.
template <class T>
concept ObjectiveModel = requires(const T& t, const Matrix& x, Matrix& f, Matrix& j) {
    { t.num_objectives() } -> std::convertible_to<int>;
    { t.values(x) } -> std::convertible_to<Matrix>;
    t.values_and_jacobians(x, f, j);
};

namespace detail {

// Score used by the inner search: scalarization of the normalized model prediction.
template <ObjectiveModel Obj>
Vector score_preferences(const SetModel& model, const Obj& obj, const NormalizationState& norm,
                         const ScalarizationConfig& sc, const Vector& z, const Matrix& ws) {
    const Matrix fn = norm.normalize(obj.values(model.forward_batch(ws)));
    Vector out(ws.cols());
    for (Eigen::Index j = 0; j < ws.cols(); ++j) out[j] = scalarize(sc, fn.col(j), ws.col(j), z);
    return out;
}

// Chain dLoss/dF (m x B) through the objective Jacobians to dLoss/dX (n x B).
inline Matrix pull_back(const Matrix& upstream_f, const Matrix& jac, int n) {
    Matrix out = Matrix::Zero(n, upstream_f.cols());
    for (Eigen::Index b = 0; b < upstream_f.cols(); ++b)
        for (Eigen::Index j = 0; j < upstream_f.rows(); ++j)
            out.col(b) += upstream_f(j, b) * jac.col(b).segment(j * n, n);
    return out;
}

struct PenalizedTerms {
    double q = 0.0;
    double inside = 0.0;   // fraction of neighbors inside the cone
    int degenerate = 0;
};

// Q = Omega(f(w*)) + lambda * mean_e zeta(f(e), f(w*)); writes dQ/dF for column `star`
// and the neighbor columns [first, first + count).
inline PenalizedTerms penalized_terms(const ScalarizationConfig& sc, const Matrix& fn, const Vector& w_star,
                                      const Vector& z, Eigen::Index star, Eigen::Index first, Eigen::Index count,
                                      Matrix* upstream, double weight) {
    PenalizedTerms t;
    const Vector f_star = fn.col(star);
    t.q = scalarize(sc, f_star, w_star, z);
    if (upstream) upstream->col(star) += weight * grad_f(sc, f_star, w_star, z);
    if (sc.lambda > 0.0 && count > 0) {
        const double cos_apex = std::cos(sc.half_apex);
        double total = 0.0;
        for (Eigen::Index e = 0; e < count; ++e) {
            const auto cp = cone_penalty(fn.col(first + e), f_star, z, sc.half_apex);
            total += cp.value;
            if (cp.degenerate) ++t.degenerate;
            else if (cp.cos_alpha >= cos_apex) t.inside += 1.0;
            if (upstream && !cp.degenerate) {
                const double s = weight * sc.lambda / static_cast<double>(count);
                upstream->col(first + e) += s * cp.grad_f_w;
                upstream->col(star) += s * cp.grad_f_wstar;
            }
        }
        t.q += sc.lambda * total / static_cast<double>(count);
        t.inside /= static_cast<double>(count);
    }
    return t;
}

inline Vector logit_of(const Vector& w) {
    const auto m = w.size();
    return (w.head(m - 1).array() / w[m - 1]).log();
}

inline Vector simplex_of_logit(const Vector& v) {
    Vector full(v.size() + 1);
    full << v, 0.0;
    return to_simplex(full);
}

// Implicit-function correction through w*(theta) for one reference point, in the
// (m-1)-dimensional logit chart w = softmax([v, 0]).
template <ObjectiveModel Obj>
Vector implicit_correction(const SetModel& model, const Obj& obj, const NormalizationState& norm,
                           const ScalarizationConfig& sc, const Vector& z, const Vector& w_star,
                           const Matrix& elites) {
    const int n = model.output_dim();
    const Vector v_star = logit_of(w_star);
    const auto dv = v_star.size();
    const double h = 1e-3;
    const Vector inv_range = norm.range().cwiseInverse();

    auto inner = [&](const Vector& v) {
        const Vector w = simplex_of_logit(v);
        return score_preferences(model, obj, norm, sc, z, Matrix(w))[0];
    };
    auto inner_theta_grad = [&](const Vector& v) {
        const Vector w = simplex_of_logit(v);
        Matrix f, jac;
        obj.values_and_jacobians(model.forward_batch(Matrix(w)), f, jac);
        const Vector fn = norm.normalize(f).col(0);
        Matrix up = grad_f(sc, fn, w, z).cwiseProduct(inv_range);
        return Vector(model.backward_batch(Matrix(w), pull_back(up, jac, n)).params);
    };
    const Matrix elite_f = norm.normalize(obj.values(model.forward_batch(elites)));
    auto outer = [&](const Vector& v) {
        const Vector w = simplex_of_logit(v);
        Matrix fn(elite_f.rows(), elite_f.cols() + 1);
        fn << norm.normalize(obj.values(model.forward_batch(Matrix(w)))), elite_f;
        return penalized_terms(sc, fn, w, z, 0, 1, elites.cols(), nullptr, 1.0).q;
    };

    Matrix cross(model.param_count(), dv);
    Matrix hess(dv, dv);
    Vector dpsi(dv);
    for (Eigen::Index j = 0; j < dv; ++j) {
        Vector e = Vector::Zero(dv);
        e[j] = h;
        cross.col(j) = (inner_theta_grad(v_star + e) - inner_theta_grad(v_star - e)) / (2 * h);
        dpsi[j] = (outer(v_star + e) - outer(v_star - e)) / (2 * h);
        for (Eigen::Index i = 0; i < dv; ++i) {
            Vector ei = Vector::Zero(dv);
            ei[i] = h;
            hess(i, j) = (inner(v_star + ei + e) - inner(v_star + ei - e) - inner(v_star - ei + e) +
                          inner(v_star - ei - e)) / (4 * h * h);
        }
    }
    return implicit_gradient_from_parts(cross, hess, dpsi, 1e10);
}

} // namespace detail

// Bilevel Pareto set learning: for every reference point the inner cross-entropy
// search picks w*(z); the outer step descends the mean penalized loss at fixed w*.
template <ObjectiveModel Obj>
SetModel train(SetModel model, const Obj& obj, const TrainConfig& cfg, const NormalizationState& norm,
               TrainLog* log = nullptr) {
    cfg.validate();
    const int m = model.input_dim();
    const int n = model.output_dim();
    if (obj.num_objectives() != m) throw DomainError("train: model input dimension must equal objective count");
    const auto& sc = cfg.scalarization;
    const Vector inv_range = norm.range().cwiseInverse();
    AdamState opt = AdamState::for_params(model.param_count(), cfg.learning_rate);
    TrainLog local;
    TrainLog& lg = log ? *log : local;

    for (int t = 0; t < cfg.iterations; ++t) {
        bool retried = false;
        for (;;) {
            std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(t)));
            const auto refs = sample_reference_points(m, cfg.ref_per_objective, rng, cfg.ref_axes);
            const auto r_count = static_cast<Eigen::Index>(refs.size());
            const Eigen::Index k = sc.lambda > 0.0 ? cfg.cem.elites : 0;

            // Columns per reference point: [w*, neighbors...]
            Matrix ws(m, r_count * (k + 1));
            std::vector<Vector> stars;
            std::vector<Matrix> hoods;
            for (Eigen::Index r = 0; r < r_count; ++r) {
                const Vector& z = refs[static_cast<std::size_t>(r)].z;
                Vector w_star;
                Matrix hood;
                if (cfg.random_preferences) {
                    w_star = sample_simplex(m, 1, rng).col(0);
                    hood = sample_simplex(m, cfg.cem.elites, rng);
                } else {
                    auto score = [&](const Matrix& cand) { return detail::score_preferences(model, obj, norm, sc, z, cand); };
                    auto res = cem_optimize(score, m, cfg.cem, CemState::initial(m, cfg.cem.init_std), rng);
                    w_star = std::move(res.w_star);
                    hood = std::move(res.elites);
                }
                ws.col(r * (k + 1)) = w_star;
                if (k > 0) ws.middleCols(r * (k + 1) + 1, k) = hood;
                stars.push_back(w_star);
                hoods.push_back(std::move(hood));
            }

            Matrix f, jac;
            obj.values_and_jacobians(model.forward_batch(ws), f, jac);
            const Matrix fn = norm.normalize(f);
            Matrix up_f = Matrix::Zero(m, ws.cols());
            TrainLogRow row;
            row.iteration = t;
            row.axis_q.assign(static_cast<std::size_t>(m), 0.0);
            std::vector<int> axis_count(static_cast<std::size_t>(m), 0);
            double total_q = 0.0, inside = 0.0;
            int degenerate = 0;
            const double weight = 1.0 / static_cast<double>(r_count);
            for (Eigen::Index r = 0; r < r_count; ++r) {
                const auto& ref = refs[static_cast<std::size_t>(r)];
                const auto terms = detail::penalized_terms(sc, fn, stars[static_cast<std::size_t>(r)], ref.z,
                                                           r * (k + 1), r * (k + 1) + 1, k, &up_f, weight);
                total_q += terms.q;
                inside += terms.inside;
                degenerate += terms.degenerate;
                row.axis_q[static_cast<std::size_t>(ref.axis)] += terms.q;
                ++axis_count[static_cast<std::size_t>(ref.axis)];
            }
            row.mean_q = total_q * weight;
            row.inside_cone_fraction = inside * weight;
            for (int a = 0; a < m; ++a)
                if (axis_count[static_cast<std::size_t>(a)] > 0) row.axis_q[static_cast<std::size_t>(a)] /= axis_count[static_cast<std::size_t>(a)];

            up_f = up_f.array().colwise() * inv_range.array();
            Vector grad;
            bool finite = std::isfinite(row.mean_q) && up_f.allFinite();
            if (finite) {
                grad = model.backward_batch(ws, detail::pull_back(up_f, jac, n)).params;
                if (cfg.implicit_correction && !cfg.random_preferences) {
                    for (Eigen::Index r = 0; r < r_count; ++r) {
                        try {
                            grad += weight * detail::implicit_correction(model, obj, norm, sc, refs[static_cast<std::size_t>(r)].z,
                                                                         stars[static_cast<std::size_t>(r)],
                                                                         hoods[static_cast<std::size_t>(r)]);
                        } catch (const NumericError&) {
                            ++lg.implicit_skipped;
                        }
                    }
                }
                finite = grad.allFinite();
            }
            if (!finite) {
                if (retried) throw TrainingError("non-finite loss at training iteration " + std::to_string(t) + " after halving the learning rate");
                retried = true;
                opt.learning_rate *= 0.5;
                ++lg.learning_rate_halvings;
                continue;
            }
            adam_step(model.params(), grad, opt);
            lg.degenerate_penalties += degenerate;
            lg.rows.push_back(std::move(row));
            break;
        }
    }
    return model;
}

struct FrontSample {
    Matrix preferences;   // m x count
    Matrix designs;       // n x count
    Matrix predicted;     // surrogate mean, m x count
    std::optional<Matrix> true_objectives;
};

// Maps `count` uniform simplex draws through the model and the surrogate.
inline FrontSample predict_front(const SetModel& model, const GpSurrogate& gp, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FrontSample s;
    s.preferences = sample_simplex(model.input_dim(), count, rng);
    s.designs = model.forward_batch(s.preferences);
    s.predicted = gp.mean_batch(s.designs);
    return s;
}

} // namespace paretoset
