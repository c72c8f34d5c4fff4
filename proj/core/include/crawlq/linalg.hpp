#pragma once

// Dense matrix algebra shared by every module: Kronecker products and sums,
// their repeated powers, and the two linear solves the recursions rely on.
// Nothing here forms an explicit inverse.

#include <Eigen/Dense>

namespace crawlq::linalg {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

Matrix identity(Index n);

/// Entry ((i,p),(j,q)) = a(i,j) * b(p,q).
Matrix kron(const Matrix& a, const Matrix& b);

/// a ⊗ I + I ⊗ b. Both operands must be square.
Matrix kron_sum(const Matrix& a, const Matrix& b);

/// v ⊗ v ⊗ ... ⊗ v (l factors); l = 0 gives the 1×1 matrix (1).
RowVector kron_power(const RowVector& v, int l);

/// m ⊕ m ⊕ ... ⊕ m (l terms); l = 0 gives the 1×1 zero.
Matrix kron_sum_power(const Matrix& m, int l);

/// Σ_{j=1..l} I_{R^{j-1}} ⊗ c ⊗ I_{R^{l-j}} for a column c of length R.
/// Shape R^l × R^{l-1}: row state lists l clocks, the column drops the one that fired.
Matrix kron_col_power(const Vector& c, int l);

/// Integer power n^k for dimension bookkeeping.
Index ipow(Index n, int k);

bool all_finite(const Matrix& m);

double max_abs(const Matrix& m);

/// Stationary row vector of an irreducible generator: θQ = 0, θe = 1, θ ≥ 0.
/// One equation of Qᵀθᵀ = 0 is replaced by the normalisation row.
RowVector solve_left_null(const Matrix& q);

/// X with AX = B. Throws SingularMatrixError when A is numerically singular or the
/// residual ‖AX−B‖∞ exceeds 1e-10·‖B‖∞ after iterative refinement.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// LU factorisation reused for several right-hand sides, on either side.
class Factorization {
public:
    explicit Factorization(const Matrix& a);

    Index size() const { return lu_.rows(); }
    double rcond() const { return rcond_; }

    /// A⁻¹B
    Matrix solve(const Matrix& b) const;
    /// B·A⁻¹
    Matrix solve_right(const Matrix& b) const;

private:
    Eigen::PartialPivLU<Matrix> lu_;
    double rcond_ = 0.0;
};

}  // namespace crawlq::linalg
