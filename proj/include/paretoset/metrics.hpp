#pragma once

#include "paretoset/common.hpp"

#include <cstddef>
#include <cstdint>

namespace paretoset {

// Points are stored column-wise (m x count) under the minimization convention.

// Exact hypervolume dominated by `points` and bounded by `ref`, for m <= 3.
// m = 2 is a sort-and-sweep; m = 3 sweeps slabs along the last objective.
double hypervolume(const Matrix& points, const Vector& ref);

struct McEstimate {
    double value;
    double standard_error;
};

// Monte Carlo hypervolume over the box [ideal, ref]; a testing oracle for `hypervolume`.
McEstimate mc_hypervolume_estimate(const Matrix& points, const Vector& ref, const Vector& ideal,
                                   std::size_t n_samples, std::uint64_t seed);
double mc_hypervolume(const Matrix& points, const Vector& ref, const Vector& ideal, std::size_t n_samples,
                      std::uint64_t seed);

double hvd(const Matrix& front, const Matrix& truth, const Vector& ref);

// Mean Euclidean distance from each truth point to its nearest front point.
double igd(const Matrix& front, const Matrix& truth);

// Reference point used for HV/HVD: 1.1 x nadir of the ground truth.
// For nadir coordinates <= 0 the 10% margin is applied to the front's range instead.
Vector hv_reference(const Matrix& truth);

} // namespace paretoset
