#pragma once

// Level-structured generator of the chain (i, ν, m, r_1, ..., r_{i−1}):
// i pages in the system, modulating state ν, service phase m, and the obsolescence
// phases of the i−1 buffered pages in arrival order. States are lexicographic
// within a level, so level i has dimension W̄·M^{min(i,1)}·R^{max(i−1,0)}.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "crawlq/arrivals.hpp"
#include "crawlq/linalg.hpp"
#include "crawlq/phase_type.hpp"
#include "crawlq/policy.hpp"

namespace crawlq {

inline constexpr linalg::Index kDefaultStateCap = 20000;

/// Arrival family, PH service, PH obsolescence, and capacity K (buffer K−1 plus server).
struct QueueModel {
    ModedArrival arrival;
    PhaseType service;
    PhaseType obsolescence;
    int capacity;

    /// Throws ValidationError when capacity < 1.
    QueueModel(ModedArrival arrival, PhaseType service, PhaseType obsolescence, int capacity);

    linalg::Index level_dim(int i) const;
    /// Phase dimension of level i without the modulating factor: M^{a_i}·R^{b_i}.
    linalg::Index phase_dim(int i) const;
    linalg::Index total_dim() const;
};

/// Service/obsolescence blocks shared by the generator and the sojourn recursions.
///   A_i = S ⊕ Γ^{⊕i}                       (M·R^i square)
///   B_i = S₀β ⊗ e_R ⊗ I_{R^{i−1}} + I_M ⊗ Γ₀^{⊕i}   (M·R^i × M·R^{i−1}), i ≥ 1; B_0 = S₀β
class PhaseBlocks {
public:
    PhaseBlocks(const PhaseType& service, const PhaseType& obsolescence, int max_level);

    const linalg::Matrix& a(int i) const { return a_.at(static_cast<size_t>(i)); }
    const linalg::Matrix& b(int i) const { return b_.at(static_cast<size_t>(i)); }
    int max_level() const { return static_cast<int>(a_.size()) - 1; }

private:
    std::vector<linalg::Matrix> a_;
    std::vector<linalg::Matrix> b_;
};

class BlockGenerator {
public:
    BlockGenerator(int capacity, std::vector<linalg::Index> level_dims);

    int capacity() const { return capacity_; }
    const std::vector<linalg::Index>& level_dims() const { return dims_; }
    linalg::Index level_dim(int i) const { return dims_.at(static_cast<size_t>(i)); }
    linalg::Index level_offset(int i) const { return offsets_.at(static_cast<size_t>(i)); }
    linalg::Index total_dim() const { return offsets_.back(); }

    /// Null when the block is structurally zero.
    const linalg::Matrix* block(int i, int j) const;
    void set_block(int i, int j, linalg::Matrix m);
    const std::map<std::pair<int, int>, linalg::Matrix>& blocks() const { return blocks_; }

    /// True when no block lies above the first superdiagonal.
    bool tridiagonal() const;

private:
    int capacity_;
    std::vector<linalg::Index> dims_;
    std::vector<linalg::Index> offsets_;
    std::map<std::pair<int, int>, linalg::Matrix> blocks_;
};

/// Assembles the generator under a threshold policy. Throws CapacityError when the
/// state space exceeds `state_cap`, ValidationError on a policy/model mismatch.
BlockGenerator build_generator(const QueueModel& model, const ThresholdPolicy& pol,
                               linalg::Index state_cap = kDefaultStateCap);

/// Dense Q, blocks placed at level offsets. Throws CapacityError above `state_cap`.
linalg::Matrix assemble_dense(const BlockGenerator& bg, linalg::Index state_cap = kDefaultStateCap);

}  // namespace crawlq
