#include "crawlq/stationary.hpp"

#include <memory>
#include <optional>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Factorization;
using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

namespace {

constexpr double kNegativeTolerance = -1e-14;

Matrix zero_block(const BlockGenerator& bg, int i, int j) { return Matrix::Zero(bg.level_dim(i), bg.level_dim(j)); }

Matrix block_or_zero(const BlockGenerator& bg, int i, int j) {
    const Matrix* b = bg.block(i, j);
    return b ? *b : zero_block(bg, i, j);
}

std::unique_ptr<Factorization> factor_negated(const Matrix& m, int level) {
    try {
        return std::make_unique<Factorization>(-m);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError("structural model error: reduced diagonal block of level " + std::to_string(level) +
                                      " is singular",
                                  e.rcond());
    }
}

// p₀·M = 0 with one equation replaced by p₀·norm = 1.
RowVector boundary_solve(const Matrix& reduced, const Vector& norm) {
    const Index n = reduced.rows();
    Matrix sys = reduced.transpose();
    sys.row(n - 1) = norm.transpose();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::PartialPivLU<Matrix> lu(sys);
    if (!(lu.rcond() > 1e-14)) {
        throw DegenerateChainError("normalisation failure: boundary system is singular (rcond " +
                                   std::to_string(lu.rcond()) + ")");
    }
    return lu.solve(rhs).transpose();
}

StationarySolution finish(const BlockGenerator& bg, const RowVector& p0, const std::vector<Matrix>& f,
                          SolverMethod method) {
    StationarySolution sol;
    sol.method = method;
    double total = 0.0;
    for (const auto& fl : f) {
        RowVector pi = p0 * fl;
        for (Index k = 0; k < pi.size(); ++k) {
            if (pi(k) < 0.0) {
                if (pi(k) < kNegativeTolerance) {
                    throw DegenerateChainError("stationary probability " + std::to_string(pi(k)) +
                                               " is negative beyond round-off");
                }
                pi(k) = 0.0;
            }
        }
        total += pi.sum();
        sol.p.push_back(std::move(pi));
    }
    if (!(total > 0.0)) throw DegenerateChainError("normalisation failure: total probability is zero");
    for (auto& pi : sol.p) pi /= total;
    sol.residual = stationary_residual(bg, sol.p);
    return sol;
}

}  // namespace

std::string to_string(SolverMethod m) {
    switch (m) {
        case SolverMethod::General: return "general";
        case SolverMethod::Qbd: return "qbd";
        case SolverMethod::Dense: return "dense";
    }
    return "unknown";
}

RowVector StationarySolution::flatten() const {
    Index n = 0;
    for (const auto& pi : p) n += pi.size();
    RowVector out(n);
    Index off = 0;
    for (const auto& pi : p) {
        out.segment(off, pi.size()) = pi;
        off += pi.size();
    }
    return out;
}

double stationary_residual(const BlockGenerator& bg, const std::vector<RowVector>& p) {
    const int k_cap = bg.capacity();
    std::vector<RowVector> acc;
    for (int j = 0; j <= k_cap; ++j) acc.push_back(RowVector::Zero(bg.level_dim(j)));
    for (const auto& [key, blk] : bg.blocks()) acc[static_cast<size_t>(key.second)] += p[static_cast<size_t>(key.first)] * blk;
    double r = 0.0;
    for (const auto& a : acc) r = std::max(r, a.cwiseAbs().maxCoeff());
    return r;
}

StationarySolution solve_general(const BlockGenerator& bg) {
    const int k_cap = bg.capacity();
    const auto K = static_cast<size_t>(k_cap);

    // qbar[i][l - i] holds Q̄_{i,l} for l = i..K. Rows are filled from the bottom:
    // Q̄_{i,K} = Q_{i,K}, Q̄_{i,l} = Q_{i,l} + Q̄_{i,l+1}·G_l, and
    // G_{i-1} = (−Q̄_{i,i})⁻¹·Q_{i,i−1}. Q̄_{i,i} is exactly the bracket
    // −Q_{i,i} − Σ_l Q_{i,i+l}·G_{i+l−1}⋯G_i of the G recursion.
    std::vector<std::vector<Matrix>> qbar(K + 1);
    std::vector<Matrix> g(K);
    std::vector<std::unique_ptr<Factorization>> diag_lu(K + 1);

    for (int i = k_cap; i >= 0; --i) {
        auto& row = qbar[static_cast<size_t>(i)];
        row.resize(K - static_cast<size_t>(i) + 1);
        row.back() = block_or_zero(bg, i, k_cap);
        for (int l = k_cap - 1; l >= i; --l) {
            Matrix acc = block_or_zero(bg, i, l);
            acc.noalias() += row[static_cast<size_t>(l + 1 - i)] * g[static_cast<size_t>(l)];
            row[static_cast<size_t>(l - i)] = std::move(acc);
        }
        if (i >= 1) {
            diag_lu[static_cast<size_t>(i)] = factor_negated(row.front(), i);
            g[static_cast<size_t>(i - 1)] = diag_lu[static_cast<size_t>(i)]->solve(block_or_zero(bg, i, i - 1));
        }
    }

    // F_0 = I, F_l = Σ_{i<l} F_i·Q̄_{i,l}·(−Q̄_{l,l})⁻¹.
    std::vector<Matrix> f(K + 1);
    f[0] = Matrix::Identity(bg.level_dim(0), bg.level_dim(0));
    for (int l = 1; l <= k_cap; ++l) {
        Matrix acc = Matrix::Zero(bg.level_dim(0), bg.level_dim(l));
        for (int i = 0; i < l; ++i) {
            acc.noalias() += f[static_cast<size_t>(i)] * qbar[static_cast<size_t>(i)][static_cast<size_t>(l - i)];
        }
        f[static_cast<size_t>(l)] = diag_lu[static_cast<size_t>(l)]->solve_right(acc);
    }

    Vector norm = Vector::Zero(bg.level_dim(0));
    for (const auto& fl : f) norm += fl.rowwise().sum();
    const RowVector p0 = boundary_solve(qbar[0][0], norm);
    return finish(bg, p0, f, SolverMethod::General);
}

StationarySolution solve_qbd(const BlockGenerator& bg) {
    if (!bg.tridiagonal()) {
        throw WrongSolverError("solve_qbd: generator has batch blocks beyond the first superdiagonal; use solve_general");
    }
    const int k_cap = bg.capacity();
    const auto K = static_cast<size_t>(k_cap);

    // G_{K−1} = (−Q_{K,K})⁻¹Q_{K,K−1}; G_i = [−(Q_{i+1,i+1} + Q_{i+1,i+2}G_{i+1})]⁻¹Q_{i+1,i}.
    std::vector<Matrix> g(K);
    std::vector<std::unique_ptr<Factorization>> lu(K + 1);
    for (int i = k_cap - 1; i >= 0; --i) {
        Matrix reduced = block_or_zero(bg, i + 1, i + 1);
        if (i + 1 < k_cap) reduced.noalias() += block_or_zero(bg, i + 1, i + 2) * g[static_cast<size_t>(i + 1)];
        lu[static_cast<size_t>(i + 1)] = factor_negated(reduced, i + 1);
        g[static_cast<size_t>(i)] = lu[static_cast<size_t>(i + 1)]->solve(block_or_zero(bg, i + 1, i));
    }

    // F_i = F_{i−1}·Q_{i−1,i}·[−(Q_{i,i} + Q_{i,i+1}G_i)]⁻¹; the reduced block is the one factored above.
    std::vector<Matrix> f(K + 1);
    f[0] = Matrix::Identity(bg.level_dim(0), bg.level_dim(0));
    for (int i = 1; i <= k_cap; ++i) {
        f[static_cast<size_t>(i)] =
            lu[static_cast<size_t>(i)]->solve_right(f[static_cast<size_t>(i - 1)] * block_or_zero(bg, i - 1, i));
    }

    Matrix boundary = block_or_zero(bg, 0, 0);
    if (k_cap >= 1) boundary.noalias() += block_or_zero(bg, 0, 1) * g[0];
    Vector norm = Vector::Zero(bg.level_dim(0));
    for (const auto& fl : f) norm += fl.rowwise().sum();
    const RowVector p0 = boundary_solve(boundary, norm);
    return finish(bg, p0, f, SolverMethod::Qbd);
}

}  // namespace crawlq
