#pragma once

#include <string>
#include <vector>

#include "crawlq/generator.hpp"
#include "crawlq/linalg.hpp"

namespace crawlq {

enum class SolverMethod { General, Qbd, Dense };

std::string to_string(SolverMethod m);

struct StationarySolution {
    std::vector<linalg::RowVector> p;  ///< p_i, one row vector per level
    double residual = 0.0;             ///< ‖pQ‖∞ evaluated blockwise
    SolverMethod method = SolverMethod::General;

    int capacity() const { return static_cast<int>(p.size()) - 1; }
    /// p_i·e
    double level_probability(int i) const { return p.at(static_cast<size_t>(i)).sum(); }
    linalg::RowVector flatten() const;
};

/// Backward-recursion solver for the upper-Hessenberg block generator:
/// G_i and Q̄_{i,l} backward, F_l forward, p₀ from the boundary system, p_i = p₀F_i.
StationarySolution solve_general(const BlockGenerator& bg);

/// Specialisation for block-tridiagonal generators (ordinary arrivals).
/// Throws WrongSolverError when batch blocks are present.
StationarySolution solve_qbd(const BlockGenerator& bg);

/// ‖pQ‖∞ without assembling Q.
double stationary_residual(const BlockGenerator& bg, const std::vector<linalg::RowVector>& p);

}  // namespace crawlq
