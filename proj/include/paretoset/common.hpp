#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace paretoset {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown for inputs outside a function's domain (out-of-bounds x, bad simplex).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Missing or malformed data files and snapshots.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline bool all_finite(const Eigen::Ref<const Matrix>& a) { return a.allFinite(); }

// Pareto dominance under minimization: a is no worse everywhere and better somewhere.
template <class A, class B>
bool dominates(const A& a, const B& b) {
    bool strictly = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

// Mask of points (columns) not dominated by any other column.
inline std::vector<bool> nondominated_mask(const Matrix& points) {
    const auto count = points.cols();
    std::vector<bool> mask(static_cast<std::size_t>(count), true);
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < count; ++j) {
            if (i != j && dominates(points.col(j), points.col(i))) {
                mask[static_cast<std::size_t>(i)] = false;
                break;
            }
        }
    }
    return mask;
}

inline Matrix nondominated_filter(const Matrix& points) {
    const auto mask = nondominated_mask(points);
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) keep.push_back(static_cast<Eigen::Index>(i));
    Matrix out(points.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = points.col(keep[k]);
    return out;
}

inline std::vector<double> to_std(const Eigen::Ref<const Vector>& v) {
    return {v.data(), v.data() + v.size()};
}

inline Vector from_std(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// SplitMix64 step; used to derive independent sub-seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace paretoset
