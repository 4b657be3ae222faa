#include "paretoset/problems.hpp"

#include "re37_table.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#ifndef PARETOSET_DATA_DIR
#define PARETOSET_DATA_DIR "data/fronts"
#endif

namespace paretoset {


std::string to_string(ProblemId id) {
    switch (id) {
    case ProblemId::ZDT3: return "zdt3";
    case ProblemId::DTLZ5: return "dtlz5";
    case ProblemId::RE5: return "re5";
    }
    return "unknown";
}

ProblemId parse_problem_id(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "zdt3") return ProblemId::ZDT3;
    if (lower == "dtlz5") return ProblemId::DTLZ5;
    if (lower == "re5" || lower == "re37") return ProblemId::RE5;
    throw DomainError("unknown problem '" + std::string(name) + "' (expected zdt3, dtlz5 or re5)");
}

ProblemSpec make_problem(ProblemId id) {
    switch (id) {
    case ProblemId::ZDT3: return {id, 6, 2, Vector::Zero(6), Vector::Ones(6)};
    case ProblemId::DTLZ5: return {id, 6, 3, Vector::Zero(6), Vector::Ones(6)};
    case ProblemId::RE5: return {id, 4, 3, Vector::Zero(4), Vector::Ones(4)};
    }
    throw DomainError("unknown problem id");
}

void check_bounds(const ProblemSpec& spec, const Eigen::Ref<const Vector>& x) {
    if (x.size() != spec.n)
        throw DomainError("decision vector has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(spec.n));
    for (int i = 0; i < spec.n; ++i) {
        if (!(x[i] >= spec.lower[i] && x[i] <= spec.upper[i])) {
            std::ostringstream msg;
            msg << "x[" << i << "] = " << x[i] << " outside [" << spec.lower[i] << ", " << spec.upper[i] << "]";
            throw DomainError(msg.str());
        }
    }
}

namespace {

double zdt3_f2(double f1, double g) {
    const double h = 1.0 - std::sqrt(f1 / g) - (f1 / g) * std::sin(10.0 * std::numbers::pi * f1);
    return g * h;
}

template <std::size_t N>
double eval_poly(const std::array<detail::PolyTerm, N>& terms, const Eigen::Ref<const Vector>& x) {
    double acc = 0.0;
    for (const auto& t : terms) {
        double v = t.coef;
        for (int i = 0; i < 4; ++i)
            for (int e = 0; e < t.exp[static_cast<std::size_t>(i)]; ++e) v *= x[i];
        acc += v;
    }
    return acc;
}

} // namespace

Vector evaluate(const ProblemSpec& spec, const Eigen::Ref<const Vector>& x) {
    check_bounds(spec, x);
    Vector f(spec.m);
    switch (spec.id) {
    case ProblemId::ZDT3: {
        const double f1 = x[0];
        const double g = 1.0 + 9.0 / (spec.n - 1) * x.tail(spec.n - 1).sum();
        f << f1, zdt3_f2(f1, g);
        break;
    }
    case ProblemId::DTLZ5: {
        double g = 0.0;
        for (int i = spec.m - 1; i < spec.n; ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
        const double t1 = std::numbers::pi / 2.0 * x[0];
        const double t2 = std::numbers::pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[1]);
        f << (1 + g) * std::cos(t1) * std::cos(t2), (1 + g) * std::cos(t1) * std::sin(t2), (1 + g) * std::sin(t1);
        break;
    }
    case ProblemId::RE5:
        f << eval_poly(detail::kRocketF1, x), eval_poly(detail::kRocketF2, x),
            eval_poly(detail::kRocketF3, x);
        break;
    }
    return f;
}

Matrix evaluate_batch(const ProblemSpec& spec, const Matrix& xs) {
    Matrix out(spec.m, xs.cols());
    for (Eigen::Index j = 0; j < xs.cols(); ++j) out.col(j) = evaluate(spec, xs.col(j));
    return out;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("PARETOSET_DATA_DIR")) return env;
    return PARETOSET_DATA_DIR;
}

void write_front_csv(const std::filesystem::path& path, const Matrix& points) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out.precision(17);
    for (Eigen::Index i = 0; i < points.rows(); ++i) out << (i ? "," : "") << "f" << (i + 1);
    out << "\n";
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        for (Eigen::Index i = 0; i < points.rows(); ++i) out << (i ? "," : "") << points(i, j);
        out << "\n";
    }
}

Matrix read_front_csv(const std::filesystem::path& path, int m) {
    std::ifstream in(path);
    if (!in) throw LoadError("front file not found: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty front file: " + path.string());
    std::ostringstream expected;
    for (int i = 0; i < m; ++i) expected << (i ? "," : "") << "f" << (i + 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected.str()) throw LoadError("bad header in " + path.string() + ": '" + line + "'");
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::stringstream row(line);
        std::string cell;
        int cols = 0;
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || !std::isfinite(v))
                throw LoadError("bad value '" + cell + "' at row " + std::to_string(rows + 2) + " of " +
                                path.string());
            values.push_back(v);
            ++cols;
        }
        if (cols != m)
            throw LoadError("row " + std::to_string(rows + 2) + " of " + path.string() + " has " +
                            std::to_string(cols) + " columns");
        ++rows;
    }
    return Eigen::Map<const Matrix>(values.data(), m, static_cast<Eigen::Index>(rows));
}

GroundTruthFront ground_truth(const ProblemSpec& spec, const std::filesystem::path& data_dir) {
    const auto path = data_dir / (to_string(spec.id) + ".csv");
    return {read_front_csv(path, spec.m), path.string()};
}

} // namespace paretoset
