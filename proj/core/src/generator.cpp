#include "crawlq/generator.hpp"

#include <string>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

QueueModel::QueueModel(ModedArrival arrival_, PhaseType service_, PhaseType obsolescence_, int capacity_)
    : arrival(std::move(arrival_)),
      service(std::move(service_)),
      obsolescence(std::move(obsolescence_)),
      capacity(capacity_) {
    if (capacity < 1) throw ValidationError({"capacity K must be at least 1, got " + std::to_string(capacity)});
}

Index QueueModel::phase_dim(int i) const {
    if (i == 0) return 1;
    return service.size() * linalg::ipow(obsolescence.size(), i - 1);
}

Index QueueModel::level_dim(int i) const { return arrival.dim() * phase_dim(i); }

Index QueueModel::total_dim() const {
    Index n = 0;
    for (int i = 0; i <= capacity; ++i) n += level_dim(i);
    return n;
}

PhaseBlocks::PhaseBlocks(const PhaseType& service, const PhaseType& obsolescence, int max_level) {
    const Matrix& s = service.subgen();
    const Matrix& g = obsolescence.subgen();
    const Index m = service.size();
    const Index r = obsolescence.size();
    const Matrix s0_beta = service.exit() * service.init();
    const Vector e_r = Vector::Ones(r);
    for (int i = 0; i <= max_level; ++i) {
        a_.push_back(i == 0 ? s : linalg::kron_sum(s, linalg::kron_sum_power(g, i)));
        if (i == 0) {
            b_.push_back(s0_beta);
        } else {
            // Service completion hands the head-of-line page to the server (its clock is
            // summed out); any buffered clock absorbing removes that page.
            b_.push_back(linalg::kron(linalg::kron(s0_beta, e_r), linalg::identity(linalg::ipow(r, i - 1))) +
                         linalg::kron(linalg::identity(m), linalg::kron_col_power(obsolescence.exit(), i)));
        }
    }
}

BlockGenerator::BlockGenerator(int capacity, std::vector<Index> level_dims)
    : capacity_(capacity), dims_(std::move(level_dims)) {
    if (static_cast<int>(dims_.size()) != capacity_ + 1) throw DimensionError("level_dims must have K+1 entries");
    offsets_.push_back(0);
    for (Index d : dims_) offsets_.push_back(offsets_.back() + d);
}

const Matrix* BlockGenerator::block(int i, int j) const {
    const auto it = blocks_.find({i, j});
    return it == blocks_.end() ? nullptr : &it->second;
}

void BlockGenerator::set_block(int i, int j, Matrix m) {
    if (i < 0 || j < 0 || i > capacity_ || j > capacity_) throw DimensionError("block index outside 0..K");
    if (m.rows() != level_dim(i) || m.cols() != level_dim(j)) {
        throw DimensionError("block (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                             std::to_string(level_dim(i)) + "x" + std::to_string(level_dim(j)));
    }
    if (j < i - 1) throw DimensionError("generator has no blocks below the first subdiagonal");
    blocks_[{i, j}] = std::move(m);
}

bool BlockGenerator::tridiagonal() const {
    for (const auto& [key, m] : blocks_) {
        if (key.second > key.first + 1) return false;
    }
    return true;
}

namespace {

// Σ_{r ≥ from} D_r, equal to D(1) − Σ_{r<from} D_r for a finite family.
Matrix batch_tail(const BatchProcess& bp, int from) {
    Matrix out = Matrix::Zero(bp.dim(), bp.dim());
    for (int r = from; r <= bp.max_batch(); ++r) out += bp.d(r);
    return out;
}

bool nonzero(const Matrix& m) { return m.size() > 0 && m.cwiseAbs().maxCoeff() > 0.0; }

}  // namespace

BlockGenerator build_generator(const QueueModel& model, const ThresholdPolicy& pol, Index state_cap) {
    const int k_cap = model.capacity;
    if (pol.capacity() != k_cap) {
        throw ValidationError({"policy capacity " + std::to_string(pol.capacity()) + " differs from model K = " +
                               std::to_string(k_cap)});
    }
    for (int m : pol.modes()) {
        if (m > model.arrival.count()) {
            throw ValidationError({"policy uses mode " + std::to_string(m) + " but the model defines " +
                                   std::to_string(model.arrival.count())});
        }
    }
    const Index total = model.total_dim();
    if (total > state_cap) {
        throw CapacityError("state space has " + std::to_string(total) + " states, above the cap of " +
                            std::to_string(state_cap) + "; reduce K or the obsolescence phase count R (level i has R^(i-1) clock states)");
    }

    std::vector<Index> dims;
    for (int i = 0; i <= k_cap; ++i) dims.push_back(model.level_dim(i));
    BlockGenerator bg(k_cap, std::move(dims));

    const PhaseBlocks pb(model.service, model.obsolescence, k_cap - 1);
    const Index w = model.arrival.dim();
    const Index m = model.service.size();
    const Index r = model.obsolescence.size();
    const RowVector& beta = model.service.init();
    const RowVector& gamma = model.obsolescence.init();

    {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(0));
        bg.set_block(0, 0, bp.d(0));
        for (int j = 1; j <= k_cap; ++j) {
            const Matrix dj = j < k_cap ? bp.d(j) : batch_tail(bp, k_cap);
            if (!nonzero(dj)) continue;
            bg.set_block(0, j, linalg::kron(linalg::kron(dj, beta), linalg::kron_power(gamma, j - 1)));
        }
    }

    for (int i = 1; i <= k_cap; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const Index buffered_phase = m * linalg::ipow(r, i - 1);

        if (i == 1) {
            bg.set_block(1, 0, linalg::kron(linalg::identity(w), model.service.exit()));
        } else {
            bg.set_block(i, i - 1, linalg::kron(linalg::identity(w), pb.b(i - 1)));
        }

        // Full system: every arrival is lost, so the whole D(1) acts on ν alone.
        const Matrix& local = i < k_cap ? bp.d(0) : bp.generator();
        bg.set_block(i, i, linalg::kron_sum(local, pb.a(i - 1)));

        for (int l = 1; l <= k_cap - i; ++l) {
            const Matrix dl = l < k_cap - i ? bp.d(l) : batch_tail(bp, k_cap - i);
            if (!nonzero(dl)) continue;
            bg.set_block(i, i + l,
                         linalg::kron(linalg::kron(dl, linalg::identity(buffered_phase)), linalg::kron_power(gamma, l)));
        }
    }
    return bg;
}

Matrix assemble_dense(const BlockGenerator& bg, Index state_cap) {
    if (bg.total_dim() > state_cap) {
        throw CapacityError("dense assembly of " + std::to_string(bg.total_dim()) + " states exceeds cap " +
                            std::to_string(state_cap));
    }
    Matrix q = Matrix::Zero(bg.total_dim(), bg.total_dim());
    for (const auto& [key, blk] : bg.blocks()) {
        q.block(bg.level_offset(key.first), bg.level_offset(key.second), blk.rows(), blk.cols()) = blk;
    }
    return q;
}

}  // namespace crawlq
