#include "crawlq/linalg.hpp"

#include <cmath>
#include <string>

#include "crawlq/error.hpp"

namespace crawlq::linalg {

namespace {

constexpr double kSingularRcond = 1e-14;
constexpr double kResidualTol = 1e-10;

double inf_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron_sum(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw DimensionError("kron_sum needs square operands, got " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
    return kron(a, identity(b.rows())) + kron(identity(a.rows()), b);
}

RowVector kron_power(const RowVector& v, int l) {
    if (l < 0) throw DimensionError("kron_power needs l >= 0");
    Matrix out = Matrix::Ones(1, 1);
    for (int k = 0; k < l; ++k) out = kron(out, v);
    return out;
}

Matrix kron_sum_power(const Matrix& m, int l) {
    if (l < 0) throw DimensionError("kron_sum_power needs l >= 0");
    if (m.rows() != m.cols()) throw DimensionError("kron_sum_power needs a square matrix");
    if (l == 0) return Matrix::Zero(1, 1);
    Matrix out = m;
    for (int k = 1; k < l; ++k) out = kron_sum(out, m);
    return out;
}

Matrix kron_col_power(const Vector& c, int l) {
    if (l < 1) throw DimensionError("kron_col_power needs l >= 1");
    const Index r = c.size();
    Matrix out = Matrix::Zero(ipow(r, l), ipow(r, l - 1));
    for (int j = 1; j <= l; ++j) {
        out += kron(kron(identity(ipow(r, j - 1)), c), identity(ipow(r, l - j)));
    }
    return out;
}

Index ipow(Index n, int k) {
    Index out = 1;
    for (int i = 0; i < k; ++i) out *= n;
    return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

RowVector solve_left_null(const Matrix& q) {
    if (q.rows() != q.cols()) throw DimensionError("solve_left_null needs a square generator");
    const Index n = q.rows();
    if (n == 0) throw DimensionError("solve_left_null on an empty matrix");
    const double scale = std::max(1.0, max_abs(q));
    if (q.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw DegenerateChainError("solve_left_null: matrix rows do not sum to zero");
    }

    Matrix system = q.transpose();
    system.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;

    Eigen::PartialPivLU<Matrix> lu(system);
    const double rc = lu.rcond();
    if (!(rc > kSingularRcond)) {
        throw DegenerateChainError("solve_left_null: generator has more than one recurrent class (rcond " +
                                   std::to_string(rc) + ")");
    }
    Vector theta = lu.solve(rhs);
    for (Index i = 0; i < n; ++i) {
        if (theta(i) < 0.0) {
            if (theta(i) < -1e-12) {
                throw DegenerateChainError("solve_left_null: negative stationary component " +
                                           std::to_string(theta(i)));
            }
            theta(i) = 0.0;
        }
    }
    theta /= theta.sum();
    return theta.transpose();
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) throw DimensionError("solve_linear needs a square matrix");
    if (a.rows() != b.rows()) throw DimensionError("solve_linear: right-hand side has wrong row count");
    Factorization f(a);
    Matrix x = f.solve(b);
    const double bnorm = inf_norm(b);
    for (int step = 0; step < 3; ++step) {
        const Matrix r = b - a * x;
        if (inf_norm(r) <= kResidualTol * bnorm) return x;
        x += f.solve(r);
    }
    if (inf_norm(b - a * x) <= kResidualTol * bnorm) return x;
    throw SingularMatrixError("solve_linear: residual check failed", f.rcond());
}

Factorization::Factorization(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("Factorization needs a square matrix");
    lu_.compute(a);
    rcond_ = a.size() == 0 ? 1.0 : lu_.rcond();
    if (!(rcond_ > kSingularRcond)) {
        throw SingularMatrixError("matrix is numerically singular", rcond_);
    }
}

Matrix Factorization::solve(const Matrix& b) const {
    if (b.rows() != lu_.rows()) throw DimensionError("Factorization::solve: row mismatch");
    return lu_.solve(b);
}

Matrix Factorization::solve_right(const Matrix& b) const {
    if (b.cols() != lu_.rows()) throw DimensionError("Factorization::solve_right: column mismatch");
    // A = P⁻¹LU, so B·A⁻¹ = B·U⁻¹·L⁻¹·P.
    Matrix y = b;
    lu_.matrixLU().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(y);
    lu_.matrixLU().triangularView<Eigen::UnitLower>().solveInPlace<Eigen::OnTheRight>(y);
    return y * lu_.permutationP();
}

}  // namespace crawlq::linalg
