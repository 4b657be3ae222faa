#include "paretoset/metrics.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace paretoset {


namespace {

double hv2d_sorted(std::vector<std::pair<double, double>>& pts, double r1, double r2) {
    std::sort(pts.begin(), pts.end());
    double hv = 0.0;
    double floor = r2;
    for (const auto& [a, b] : pts) {
        if (b < floor) {
            hv += (r1 - a) * (floor - b);
            floor = b;
        }
    }
    return hv;
}

Matrix strictly_inside(const Matrix& points, const Vector& ref) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < points.cols(); ++j)
        if ((points.col(j).array() < ref.array()).all()) keep.push_back(j);
    Matrix out(points.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = points.col(keep[k]);
    return out;
}

} // namespace

double hypervolume(const Matrix& points, const Vector& ref) {
    const auto m = ref.size();
    if (m > 3) throw UnsupportedError("exact hypervolume supports at most 3 objectives, got " + std::to_string(m));
    if (points.cols() == 0) return 0.0;
    if (points.rows() != m) throw DomainError("hypervolume: point/reference dimension mismatch");
    const Matrix inside = strictly_inside(points, ref);
    if (inside.cols() == 0) return 0.0;

    if (m == 1) return ref[0] - inside.row(0).minCoeff();
    if (m == 2) {
        std::vector<std::pair<double, double>> pts;
        for (Eigen::Index j = 0; j < inside.cols(); ++j) pts.emplace_back(inside(0, j), inside(1, j));
        return hv2d_sorted(pts, ref[0], ref[1]);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(inside.cols()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return inside(2, a) < inside(2, b); });

    double hv = 0.0;
    std::vector<std::pair<double, double>> slab;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto j = order[i];
        slab.emplace_back(inside(0, j), inside(1, j));
        const double top = (i + 1 < order.size()) ? inside(2, order[i + 1]) : ref[2];
        const double height = top - inside(2, j);
        if (height <= 0.0) continue;
        auto work = slab;
        hv += hv2d_sorted(work, ref[0], ref[1]) * height;
    }
    return hv;
}

McEstimate mc_hypervolume_estimate(const Matrix& points, const Vector& ref, const Vector& ideal,
                                   std::size_t n_samples, std::uint64_t seed) {
    const auto m = ref.size();
    const double box = (ref - ideal).prod();
    if (points.cols() == 0 || n_samples == 0) return {0.0, 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector s(m);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        for (Eigen::Index i = 0; i < m; ++i) s[i] = ideal[i] + unit(rng) * (ref[i] - ideal[i]);
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            if ((points.col(j).array() <= s.array()).all()) {
                ++hits;
                break;
            }
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

double mc_hypervolume(const Matrix& points, const Vector& ref, const Vector& ideal, std::size_t n_samples,
                      std::uint64_t seed) {
    return mc_hypervolume_estimate(points, ref, ideal, n_samples, seed).value;
}

double hvd(const Matrix& front, const Matrix& truth, const Vector& ref) {
    return hypervolume(truth, ref) - hypervolume(front, ref);
}

double igd(const Matrix& front, const Matrix& truth) {
    if (truth.cols() == 0) return 0.0;
    if (front.cols() == 0) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (Eigen::Index j = 0; j < truth.cols(); ++j)
        total += std::sqrt((front.colwise() - truth.col(j)).colwise().squaredNorm().minCoeff());
    return total / static_cast<double>(truth.cols());
}

Vector hv_reference(const Matrix& truth) {
    const Vector nadir = truth.rowwise().maxCoeff();
    const Vector ideal = truth.rowwise().minCoeff();
    Vector ref(nadir.size());
    for (Eigen::Index i = 0; i < nadir.size(); ++i)
        ref[i] = nadir[i] > 0.0 ? 1.1 * nadir[i] : nadir[i] + 0.1 * std::max(nadir[i] - ideal[i], 1e-12);
    return ref;
}

} // namespace paretoset
