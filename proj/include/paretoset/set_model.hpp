#pragma once

#include "paretoset/common.hpp"

#include <nlohmann/json.hpp>

#include <random>

namespace paretoset {

// Pareto set model: preference vector (m) -> decision vector (n).
// Hidden layers use ELU; the output passes through a logistic and an affine
// map onto [lower, upper], so every output is feasible by construction.
//
// All weights and biases live in one flat vector. Layer l occupies
// W_l (out x in, column-major) followed by b_l (out).
class SetModel {
public:
    SetModel() = default;

    static SetModel init(std::uint64_t seed, int m, int n, const Vector& lower, const Vector& upper,
                         int hidden_width = 256, int hidden_layers = 3) {
        if (m < 1 || n < 1) throw DomainError("set model needs m >= 1 and n >= 1");
        if (lower.size() != n || upper.size() != n) throw DomainError("set model bounds must have n entries");
        if (!((upper - lower).array() > 0.0).all()) throw DomainError("set model bounds need lower < upper");
        SetModel model;
        model.dims_.push_back(m);
        for (int i = 0; i < hidden_layers; ++i) model.dims_.push_back(hidden_width);
        model.dims_.push_back(n);
        model.lower_ = lower;
        model.upper_ = upper;
        model.params_ = Vector::Zero(model.param_count());
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < model.dims_.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(model.dims_[l]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            auto w = model.weight(l);
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
        }
        return model;
    }

    static SetModel from_parts(std::vector<int> dims, Vector lower, Vector upper, Vector params) {
        SetModel model;
        model.dims_ = std::move(dims);
        model.lower_ = std::move(lower);
        model.upper_ = std::move(upper);
        if (model.dims_.size() < 2) throw LoadError("set model needs at least an input and an output layer");
        if (params.size() != model.param_count()) throw LoadError("set model parameter count does not match shapes");
        if (model.lower_.size() != model.output_dim() || model.upper_.size() != model.output_dim())
            throw LoadError("set model bounds do not match output dimension");
        model.params_ = std::move(params);
        return model;
    }

    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    const std::vector<int>& dims() const { return dims_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const Vector& params() const { return params_; }
    Vector& params() { return params_; }

    Eigen::Index param_count() const {
        Eigen::Index total = 0;
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) total += static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
        return total;
    }

    Vector forward(const Eigen::Ref<const Vector>& w) const { return forward_batch(w).col(0); }

    // Inputs are columns (m x B); outputs are columns (n x B).
    Matrix forward_batch(const Matrix& ws) const {
        Matrix a = ws;
        const std::size_t layers = dims_.size() - 1;
        for (std::size_t l = 0; l < layers; ++l) {
            Matrix z = (weight(l) * a).colwise() + bias(l);
            if (l + 1 < layers) a = elu(z);
            else a = squash(z);
        }
        return a;
    }

    struct Gradients {
        Vector params;  // summed over the batch
        Matrix inputs;  // m x B
    };

    // Reverse-mode gradients of sum_b upstream(:,b)^T h(ws(:,b)).
    Gradients backward_batch(const Matrix& ws, const Matrix& upstream) const {
        if (!upstream.allFinite()) throw NumericError("set model backward: non-finite upstream gradient");
        const std::size_t layers = dims_.size() - 1;
        std::vector<Matrix> acts{ws};
        std::vector<Matrix> pre;
        for (std::size_t l = 0; l < layers; ++l) {
            pre.push_back((weight(l) * acts.back()).colwise() + bias(l));
            acts.push_back(l + 1 < layers ? elu(pre.back()) : squash(pre.back()));
        }
        Gradients g;
        g.params = Vector::Zero(param_count());
        const Vector range = upper_ - lower_;
        // d out / d pre at the output: range * s (1 - s)
        const Matrix s = logistic(pre.back());
        Matrix delta = (upstream.array().colwise() * range.array()) * s.array() * (1.0 - s.array());
        for (std::size_t l = layers; l-- > 0;) {
            weight_view(g.params, l) = delta * acts[l].transpose();
            bias_view(g.params, l) = delta.rowwise().sum();
            Matrix back = weight(l).transpose() * delta;
            if (l > 0) {
                const auto& z = pre[l - 1];
                back.array() *= (z.array() > 0.0).select(Matrix::Ones(z.rows(), z.cols()).array(), z.array().exp());
            }
            delta = std::move(back);
        }
        g.inputs = std::move(delta);
        return g;
    }

    Gradients backward(const Eigen::Ref<const Vector>& w, const Eigen::Ref<const Vector>& upstream) const {
        return backward_batch(Matrix(w), Matrix(upstream));
    }

    Eigen::Map<const Matrix> weight(std::size_t l) const {
        return {params_.data() + offset(l), dims_[l + 1], dims_[l]};
    }
    Eigen::Map<Matrix> weight(std::size_t l) { return {params_.data() + offset(l), dims_[l + 1], dims_[l]}; }
    Eigen::Map<const Vector> bias(std::size_t l) const {
        return {params_.data() + offset(l) + static_cast<Eigen::Index>(dims_[l + 1]) * dims_[l], dims_[l + 1]};
    }

private:
    Eigen::Index offset(std::size_t l) const {
        Eigen::Index off = 0;
        for (std::size_t k = 0; k < l; ++k) off += static_cast<Eigen::Index>(dims_[k + 1]) * (dims_[k] + 1);
        return off;
    }
    Eigen::Map<Matrix> weight_view(Vector& flat, std::size_t l) const {
        return {flat.data() + offset(l), dims_[l + 1], dims_[l]};
    }
    Eigen::Map<Vector> bias_view(Vector& flat, std::size_t l) const {
        return {flat.data() + offset(l) + static_cast<Eigen::Index>(dims_[l + 1]) * dims_[l], dims_[l + 1]};
    }

    static Matrix elu(const Matrix& z) { return (z.array() > 0.0).select(z.array(), z.array().exp() - 1.0); }
    static Matrix logistic(const Matrix& z) { return (1.0 + (-z.array()).exp()).inverse(); }
    Matrix squash(const Matrix& z) const {
        return (logistic(z).array().colwise() * (upper_ - lower_).array()).colwise() + lower_.array();
    }

    std::vector<int> dims_;
    Vector lower_, upper_;
    Vector params_;
};

// Adaptive-moment optimizer state with bias correction.
struct AdamState {
    Vector first;
    Vector second;
    long step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(Eigen::Index count, double learning_rate = 1e-3) {
        AdamState s;
        s.first = Vector::Zero(count);
        s.second = Vector::Zero(count);
        s.learning_rate = learning_rate;
        return s;
    }
};

inline void adam_step(Vector& params, const Vector& grad, AdamState& state) {
    if (grad.size() != params.size() || state.first.size() != params.size())
        throw DomainError("adam_step: shape mismatch");
    ++state.step;
    state.first = state.beta1 * state.first + (1.0 - state.beta1) * grad;
    state.second = state.beta2 * state.second + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    params.array() -= state.learning_rate * (state.first.array() / c1) / ((state.second.array() / c2).sqrt() + state.eps);
}

inline void step(SetModel& model, const Vector& grad, AdamState& state) { adam_step(model.params(), grad, state); }

inline nlohmann::json to_json(const SetModel& model) {
    return {{"dims", model.dims()},
            {"activation", "elu"},
            {"output", "logistic-affine"},
            {"lower", to_std(model.lower())},
            {"upper", to_std(model.upper())},
            {"params", to_std(model.params())}};
}

inline SetModel set_model_from_json(const nlohmann::json& j) {
    try {
        return SetModel::from_parts(j.at("dims").get<std::vector<int>>(),
                                    from_std(j.at("lower").get<std::vector<double>>()),
                                    from_std(j.at("upper").get<std::vector<double>>()),
                                    from_std(j.at("params").get<std::vector<double>>()));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("malformed set model snapshot: ") + e.what());
    }
}

} // namespace paretoset
