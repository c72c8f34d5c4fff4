#include "crawlq/phase_type.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

PhaseType::PhaseType(RowVector init, Matrix subgen)
    : init_(std::move(init)), subgen_(std::move(subgen)) {
    exit_ = -subgen_.rowwise().sum();
}

PhaseType PhaseType::validate(RowVector init, Matrix subgen, double tol) {
    std::vector<std::string> issues;
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(10);
        os << x;
        return os.str();
    };

    if (subgen.rows() != subgen.cols()) {
        throw ValidationError({"subgen is not square"});
    }
    if (init.size() != subgen.rows()) {
        throw ValidationError({"init has length " + std::to_string(init.size()) + " but subgen is " +
                               std::to_string(subgen.rows()) + "x" + std::to_string(subgen.cols())});
    }
    if (init.size() == 0) throw ValidationError({"empty phase-type representation"});
    if (!init.allFinite() || !subgen.allFinite()) throw ValidationError({"non-finite entries"});

    for (Eigen::Index i = 0; i < init.size(); ++i) {
        if (init(i) < 0.0) issues.push_back("init[" + std::to_string(i) + "] = " + fmt(init(i)) + " is negative");
    }
    if (std::abs(init.sum() - 1.0) > tol) {
        issues.push_back("init sums to " + fmt(init.sum()) + ", expected 1");
    }
    const Eigen::Index n = subgen.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(subgen(i, i) < 0.0)) {
            issues.push_back("subgen[" + std::to_string(i) + "][" + std::to_string(i) + "] = " + fmt(subgen(i, i)) +
                             ": positive diagonal (must be < 0)");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && subgen(i, j) < 0.0) {
                issues.push_back("subgen[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                 fmt(subgen(i, j)) + ": negative off-diagonal");
            }
        }
    }
    const Vector exit = -subgen.rowwise().sum();
    bool any_exit = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (exit(i) < -tol) {
            issues.push_back("exit[" + std::to_string(i) + "] = " + fmt(exit(i)) + " is negative (row sum > 0)");
        }
        if (exit(i) > tol) any_exit = true;
    }
    if (!any_exit) issues.push_back("exit vector has no positive component");

    if (issues.empty()) {
        try {
            linalg::Factorization f(subgen);
        } catch (const SingularMatrixError&) {
            issues.push_back("subgen is singular (some phase never absorbs)");
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Tiny negative exits from rounding are clamped by rebuilding the diagonal.
    for (Eigen::Index i = 0; i < n; ++i) {
        if (exit(i) < 0.0) subgen(i, i) += exit(i);
    }
    return PhaseType(std::move(init), std::move(subgen));
}

PhaseType PhaseType::exponential(double rate) {
    return validate(RowVector::Ones(1), Matrix::Constant(1, 1, -rate));
}

double PhaseType::mean() const {
    const Vector tau = linalg::solve_linear(-subgen_, Vector::Ones(size()));
    return init_.dot(tau);
}

double PhaseType::variance() const {
    const Vector tau = linalg::solve_linear(-subgen_, Vector::Ones(size()));
    const Vector tau2 = linalg::solve_linear(-subgen_, tau);
    const double m = init_.dot(tau);
    return 2.0 * init_.dot(tau2) - m * m;
}

PhaseType PhaseType::scaled(double s) const {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw ValidationError({"scale factor must be positive, got " + std::to_string(s)});
    }
    return PhaseType(init_, s * subgen_);
}

}  // namespace crawlq
