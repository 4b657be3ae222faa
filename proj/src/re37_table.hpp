#pragma once

#include <array>

// Rocket injector response surfaces (3 objectives, 4 variables on the unit box).
// Coefficients copied term by term from the reference implementation of the
// RE problem suite (Tanabe & Ishibuchi, "An easy-to-use real-world
// multi-objective optimization problem suite", Applied Soft Computing 89, 2020),
// problem RE37, as shipped in jMetalPy 1.8.0 jmetal/problem/multiobjective/re.py.
// Variable order: (alpha, HA, OA, OPTT). Each term is coef * prod x_i^exp_i.

namespace paretoset::detail {

struct PolyTerm {
    double coef;
    std::array<int, 4> exp;
};

inline constexpr std::array<PolyTerm, 15> kRocketF1{{
    {0.692, {0, 0, 0, 0}},   {0.477, {1, 0, 0, 0}},    {-0.687, {0, 1, 0, 0}},
    {-0.080, {0, 0, 1, 0}},  {-0.0650, {0, 0, 0, 1}},  {-0.167, {2, 0, 0, 0}},
    {-0.0129, {1, 1, 0, 0}}, {0.0796, {0, 2, 0, 0}},   {-0.0634, {1, 0, 1, 0}},
    {-0.0257, {0, 1, 1, 0}}, {0.0877, {0, 0, 2, 0}},   {-0.0521, {1, 0, 0, 1}},
    {0.00156, {0, 1, 0, 1}}, {0.00198, {0, 0, 1, 1}},  {0.0184, {0, 0, 0, 2}},
}};

inline constexpr std::array<PolyTerm, 15> kRocketF2{{
    {0.153, {0, 0, 0, 0}},   {-0.322, {1, 0, 0, 0}},   {0.396, {0, 1, 0, 0}},
    {0.424, {0, 0, 1, 0}},   {0.0226, {0, 0, 0, 1}},   {0.175, {2, 0, 0, 0}},
    {0.0185, {1, 1, 0, 0}},  {-0.0701, {0, 2, 0, 0}},  {-0.251, {1, 0, 1, 0}},
    {0.179, {0, 1, 1, 0}},   {0.0150, {0, 0, 2, 0}},   {0.0134, {1, 0, 0, 1}},
    {0.0296, {0, 1, 0, 1}},  {0.0752, {0, 0, 1, 1}},   {0.0192, {0, 0, 0, 2}},
}};

inline constexpr std::array<PolyTerm, 21> kRocketF3{{
    {0.370, {0, 0, 0, 0}},   {-0.205, {1, 0, 0, 0}},   {0.0307, {0, 1, 0, 0}},
    {0.108, {0, 0, 1, 0}},   {1.019, {0, 0, 0, 1}},    {-0.135, {2, 0, 0, 0}},
    {0.0141, {1, 1, 0, 0}},  {0.0998, {0, 2, 0, 0}},   {0.208, {1, 0, 1, 0}},
    {-0.0301, {0, 1, 1, 0}}, {-0.226, {0, 0, 2, 0}},   {0.353, {1, 0, 0, 1}},
    {-0.0497, {0, 0, 1, 1}}, {-0.423, {0, 0, 0, 2}},   {0.202, {2, 1, 0, 0}},
    {-0.281, {2, 0, 1, 0}},  {-0.342, {1, 2, 0, 0}},   {-0.245, {0, 2, 1, 0}},
    {0.281, {0, 1, 2, 0}},   {-0.184, {1, 0, 0, 2}},   {-0.281, {1, 1, 1, 0}},
}};

} // namespace paretoset::detail
