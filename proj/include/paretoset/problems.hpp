#pragma once

#include "paretoset/common.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace paretoset {

enum class ProblemId { ZDT3, DTLZ5, RE5 };

struct ProblemSpec {
    ProblemId id;
    int n;  // decision dimension
    int m;  // objective dimension
    Vector lower;
    Vector upper;
};

std::string to_string(ProblemId id);
ProblemId parse_problem_id(std::string_view name);
ProblemSpec make_problem(ProblemId id);

// Throws DomainError on a wrong size or a coordinate outside the box.
void check_bounds(const ProblemSpec& spec, const Eigen::Ref<const Vector>& x);

Vector evaluate(const ProblemSpec& spec, const Eigen::Ref<const Vector>& x);

// Column-wise evaluation of a batch of decision vectors (n x B).
Matrix evaluate_batch(const ProblemSpec& spec, const Matrix& xs);

struct GroundTruthFront {
    Matrix points;  // m x count
    std::string source;
};

// $PARETOSET_DATA_DIR when set, else the data/fronts directory of the source tree.
std::filesystem::path default_data_dir();

// CSV with header f1,...,fm and one objective vector per row.
void write_front_csv(const std::filesystem::path& path, const Matrix& points);
Matrix read_front_csv(const std::filesystem::path& path, int m);

GroundTruthFront ground_truth(const ProblemSpec& spec, const std::filesystem::path& data_dir = default_data_dir());

} // namespace paretoset
