#pragma once

// Batch Markovian arrival processes (D_0, D_1, ..., D_Kmax) and the families of
// such processes indexed by the number of active robots.

#include <string>
#include <vector>

#include "crawlq/linalg.hpp"

namespace crawlq {

enum class ValidationMode { Strict, Repair };

/// One correction applied by repair-mode validation.
struct Repair {
    int matrix = 0;  ///< k of D_k
    linalg::Index row = 0;
    linalg::Index col = 0;
    double before = 0.0;
    double after = 0.0;
    std::string reason;

    std::string describe() const;
};

/// Finite-batch BMAP over a modulating chain of dimension dim().
class BatchProcess {
public:
    /// Strict validation; throws ValidationError.
    static BatchProcess create(std::vector<linalg::Matrix> d, double tol = 1e-9);

    static BatchProcess poisson(double rate);

    linalg::Index dim() const { return d_.front().rows(); }
    int max_batch() const { return static_cast<int>(d_.size()) - 1; }

    /// D_k, or a zero matrix when k > max_batch().
    const linalg::Matrix& d(int k) const;
    const std::vector<linalg::Matrix>& matrices() const { return d_; }

    /// D(1) = Σ_k D_k
    const linalg::Matrix& generator() const { return generator_; }
    /// D'(1) = Σ_k k·D_k
    linalg::Matrix rate_matrix() const;

private:
    explicit BatchProcess(std::vector<linalg::Matrix> d);

    std::vector<linalg::Matrix> d_;
    linalg::Matrix generator_;
    linalg::Matrix zero_;
};

struct ValidatedProcess {
    BatchProcess process;
    std::vector<Repair> repairs;
};

/// Strict: every invariant must hold within tol. Repair: a positive D_0 diagonal is
/// flipped in sign, negative off-diagonal/batch entries no larger than repair_cap in
/// magnitude are clamped to zero, then each D_0 diagonal is reset so D(1)·e = 0.
/// Rows whose remaining defect exceeds repair_cap are irreparable.
/// Throws ValidationError; `label` prefixes each issue.
ValidatedProcess validate_bmap(std::vector<linalg::Matrix> d, ValidationMode mode, double repair_cap = 0.1,
                               const std::string& label = "D", double tol = 1e-9);

struct ArrivalStats {
    linalg::RowVector theta;  ///< stationary vector of D(1)
    double lambda = 0.0;      ///< fundamental rate θ·D'(1)·e
    double lambda_g = 0.0;    ///< batch rate θ·(−D_0)·e
    double var_g = 0.0;       ///< variance of inter-batch intervals
    double c_cor = 0.0;       ///< lag-1 correlation of inter-batch intervals
};

/// The correlation's denominator uses the inter-batch variance var_g of the same process.
ArrivalStats arrival_stats(const BatchProcess& bp);

/// Family of BMAPs over a shared modulating space; mode l (1-based) is "l robots active".
class ModedArrival {
public:
    explicit ModedArrival(std::vector<BatchProcess> modes);

    int count() const { return static_cast<int>(modes_.size()); }
    linalg::Index dim() const { return modes_.front().dim(); }
    int max_batch() const;
    const BatchProcess& mode(int l) const;
    const std::vector<BatchProcess>& modes() const { return modes_; }

private:
    std::vector<BatchProcess> modes_;
};

/// Independent robots: 𝒟_0^(l) = D_0^(1)⊕…⊕D_0^(l)⊕D^(l+1)(1)⊕…⊕D^(N)(1),
/// 𝒟_k^(l) = (D_k^(1)⊕…⊕D_k^(l))⊗I for k ≥ 1.
ModedArrival compose_independent(const std::vector<BatchProcess>& processes);

/// Thinning one BMAP: 𝒟_0^(l) = q_l·D_0 + (1−q_l)·D(1), 𝒟_k^(l) = q_l·D_k.
/// Requires 0 < q_1 < … < q_N = 1.
ModedArrival compose_thinned(const BatchProcess& bp, const std::vector<double>& q);

/// Marked process with per-robot batch matrices robots[m−1][k−1] = D_k^(m):
/// 𝒟_0^(l) = D_0 + Σ_{j≥1} Σ_{m>l} D_j^(m), 𝒟_k^(l) = Σ_{m≤l} D_k^(m).
ModedArrival compose_bmmap(const linalg::Matrix& d0, const std::vector<std::vector<linalg::Matrix>>& robots);

/// Explicit per-mode matrices; checks the shared dimension.
ModedArrival compose_direct(std::vector<BatchProcess> modes);

}  // namespace crawlq
