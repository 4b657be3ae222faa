#pragma once

#include "paretoset/common.hpp"

#include <numbers>
#include <string>
#include <string_view>

namespace paretoset {

enum class ScalarizationKind { WeightedSum, Tchebycheff, AugTchebycheff, PBI };

inline std::string to_string(ScalarizationKind k) {
    switch (k) {
    case ScalarizationKind::WeightedSum: return "ws";
    case ScalarizationKind::Tchebycheff: return "tch";
    case ScalarizationKind::AugTchebycheff: return "augtch";
    case ScalarizationKind::PBI: return "pbi";
    }
    return "unknown";
}

inline ScalarizationKind parse_scalarization(std::string_view s) {
    if (s == "ws") return ScalarizationKind::WeightedSum;
    if (s == "tch") return ScalarizationKind::Tchebycheff;
    if (s == "augtch") return ScalarizationKind::AugTchebycheff;
    if (s == "pbi") return ScalarizationKind::PBI;
    throw DomainError("unknown scalarization '" + std::string(s) + "' (expected pbi, tch, augtch or ws)");
}

struct ScalarizationConfig {
    ScalarizationKind kind = ScalarizationKind::PBI;
    double rho = 5.0;                          // PBI balance or augmentation weight
    double lambda = 0.01;                      // cone-penalty weight
    double half_apex = std::numbers::pi / 4;   // cone half-apex angle
    bool pbi_normalized_direction = true;      // false: d2 measured against z + d1 * w (unnormalized w)
    bool pbi_signed = false;                   // true: d1 keeps the sign of the projection

    static ScalarizationConfig defaults(ScalarizationKind kind) {
        ScalarizationConfig c;
        c.kind = kind;
        c.rho = kind == ScalarizationKind::AugTchebycheff ? 0.1 : 5.0;
        return c;
    }

    void validate() const {
        if (!(rho > 0.0)) throw DomainError("scalarization rho must be > 0");
        if (!(lambda >= 0.0)) throw DomainError("penalty lambda must be >= 0");
        if (!(half_apex > 0.0 && half_apex < std::numbers::pi / 2))
            throw DomainError("cone half-apex must lie in (0, pi/2)");
    }
};

using VecRef = Eigen::Ref<const Vector>;

inline double weighted_sum(const VecRef& f, const VecRef& w) { return w.dot(f); }

inline double tchebycheff(const VecRef& f, const VecRef& w, const VecRef& z) {
    return (w.array() * (f - z).array().abs()).maxCoeff();
}

inline double aug_tchebycheff(const VecRef& f, const VecRef& w, const VecRef& z, double rho) {
    return tchebycheff(f, w, z) + rho * w.dot(f);
}

namespace detail {

struct PbiParts {
    double signed_proj;  // (f - z)^T w / |w|
    double d1;
    double d2;
    Vector residual;     // f - (z + d1 * dir)
    Vector unit_w;
    Vector dir;          // unit_w or w depending on the flag
};

inline PbiParts pbi_parts(const VecRef& f, const VecRef& w, const VecRef& z, bool normalized, bool signed_d1) {
    const double norm_w = w.norm();
    if (!(norm_w > 0.0)) throw DomainError("pbi: preference vector has zero norm");
    PbiParts p;
    p.unit_w = w / norm_w;
    p.signed_proj = (f - z).dot(p.unit_w);
    p.d1 = signed_d1 ? p.signed_proj : std::abs(p.signed_proj);
    p.dir = normalized ? p.unit_w : Vector(w);
    p.residual = f - (z + p.d1 * p.dir);
    p.d2 = p.residual.norm();
    return p;
}

} // namespace detail

inline double pbi(const VecRef& f, const VecRef& w, const VecRef& z, double rho, bool normalized_direction = true,
                  bool signed_d1 = false) {
    const auto p = detail::pbi_parts(f, w, z, normalized_direction, signed_d1);
    return p.d1 + rho * p.d2;
}

inline double scalarize(const ScalarizationConfig& cfg, const VecRef& f, const VecRef& w, const VecRef& z) {
    switch (cfg.kind) {
    case ScalarizationKind::WeightedSum: return weighted_sum(f, w);
    case ScalarizationKind::Tchebycheff: return tchebycheff(f, w, z);
    case ScalarizationKind::AugTchebycheff: return aug_tchebycheff(f, w, z, cfg.rho);
    case ScalarizationKind::PBI: return pbi(f, w, z, cfg.rho, cfg.pbi_normalized_direction, cfg.pbi_signed);
    }
    return 0.0;
}

namespace detail {

inline Vector tchebycheff_grad(const VecRef& f, const VecRef& w, const VecRef& z) {
    Vector g = Vector::Zero(f.size());
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double v = w[i] * std::abs(f[i] - z[i]);
        if (v > best) {  // strict: ties go to the lowest index
            best = v;
            arg = i;
        }
    }
    const double d = f[arg] - z[arg];
    g[arg] = w[arg] * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
    return g;
}

} // namespace detail

// Gradient of the scalarization with respect to the objective vector f.
inline Vector grad_f(const ScalarizationConfig& cfg, const VecRef& f, const VecRef& w, const VecRef& z) {
    switch (cfg.kind) {
    case ScalarizationKind::WeightedSum: return w;
    case ScalarizationKind::Tchebycheff: return detail::tchebycheff_grad(f, w, z);
    case ScalarizationKind::AugTchebycheff: return detail::tchebycheff_grad(f, w, z) + cfg.rho * w;
    case ScalarizationKind::PBI: {
        const auto p = detail::pbi_parts(f, w, z, cfg.pbi_normalized_direction, cfg.pbi_signed);
        const double sgn = cfg.pbi_signed ? 1.0 : (p.signed_proj > 0.0 ? 1.0 : (p.signed_proj < 0.0 ? -1.0 : 0.0));
        Vector g = sgn * p.unit_w;
        if (p.d2 > 0.0) g += cfg.rho * (p.residual - sgn * p.dir.dot(p.residual) * p.unit_w) / p.d2;
        return g;
    }
    }
    return Vector::Zero(f.size());
}

// Diversity penalty over a cone with vertex f(w*) opening towards z.
// zeta = exp(-c1 c2), c1 = cos(half_apex) - cos a, c2 = cos a - 1.
inline double cone_penalty_from_cos(double cos_alpha, double half_apex) {
    const double c1 = std::cos(half_apex) - cos_alpha;
    const double c2 = cos_alpha - 1.0;
    return std::exp(-c1 * c2);
}

struct ConePenalty {
    double value = 1.0;
    double cos_alpha = 1.0;
    bool degenerate = false;   // zero-length direction; neutral value, no gradient
    Vector grad_f_w;           // d zeta / d f(w)
    Vector grad_f_wstar;       // d zeta / d f(w*)
};

inline ConePenalty cone_penalty(const VecRef& f_w, const VecRef& f_wstar, const VecRef& z, double half_apex) {
    ConePenalty out;
    out.grad_f_w = Vector::Zero(f_w.size());
    out.grad_f_wstar = Vector::Zero(f_w.size());
    const Vector u = f_w - f_wstar;
    const Vector v = z - f_wstar;
    const double nu = u.norm();
    const double nv = v.norm();
    if (!(nu > 0.0) || !(nv > 0.0)) {
        out.degenerate = true;
        return out;
    }
    const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    out.cos_alpha = c;
    out.value = cone_penalty_from_cos(c, half_apex);
    const double c1 = std::cos(half_apex) - c;
    const double c2 = c - 1.0;
    const double dzeta_dc = out.value * (c2 - c1);
    const Vector dc_du = v / (nu * nv) - c * u / (nu * nu);
    const Vector dc_dv = u / (nu * nv) - c * v / (nv * nv);
    out.grad_f_w = dzeta_dc * dc_du;
    out.grad_f_wstar = -dzeta_dc * (dc_du + dc_dv);
    return out;
}

// Cosine similarity between preference and objective vector; an alternative penalty.
inline double cosine_penalty(const VecRef& f, const VecRef& w) {
    const double denom = w.norm() * f.norm();
    if (!(denom > 0.0)) return 0.0;
    return w.dot(f) / denom;
}

inline double penalized_loss(double omega, double penalty_mean, double lambda) { return omega + lambda * penalty_mean; }

} // namespace paretoset
