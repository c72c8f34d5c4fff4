#include "crawlq/sojourn.hpp"

#include <algorithm>
#include <string>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Factorization;
using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void expect_dim(const Vector& v, Index expected, const char* what, int i) {
    if (v.size() != expected) {
        throw DimensionError(std::string(what) + "_" + std::to_string(i) + " has length " + std::to_string(v.size()) +
                             ", expected " + std::to_string(expected));
    }
}

// B̂_{i−1}·x for x of length M·R^{i−1}. For i ≥ 2 this is (B_{i−1} ⊗ I_R)x: the
// tagged clock is carried along untouched. For i = 1 the tagged page enters service,
// so its clock is summed out: (S₀β ⊗ e_R)·x.
Vector apply_bhat(const QueueModel& model, const PhaseBlocks& pb, int i, const Vector& x) {
    const Index r = model.obsolescence.size();
    if (i == 1) {
        const Vector served = model.service.exit() * (model.service.init() * x).value();
        return linalg::kron(served, Vector::Ones(r));
    }
    const Matrix& b = pb.b(i - 1);
    Eigen::Map<const RowMajor> xv(x.data(), b.cols(), r);
    RowMajor out = b * xv;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

// (I_{M R^{i−1}} ⊗ Γ₀)e: rate at which the tagged clock itself absorbs.
Vector own_exit(const QueueModel& model, int i) {
    const Index ahead = model.service.size() * linalg::ipow(model.obsolescence.size(), i - 1);
    return linalg::kron(Vector::Ones(ahead), model.obsolescence.exit());
}

Matrix shifted(const Matrix& a, double u) { return Matrix::Identity(a.rows(), a.cols()) * u - a; }

// Σ_i Σ_{l=1}^{K−i} z_{i,l}·C_{i,l}·f_{i+l−1} with z_{i,l} = Σ_{k≥l} p_i(D_k e ⊗ I),
// i.e. batches of size k contribute 1/k per slot times the k pages of the batch.
// C_{0,l} = β ⊗ γ^{⊗(l−1)}; C_{i,l} = I ⊗ γ^{⊗l} for i ≥ 1.
double arrival_average(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                       const std::vector<Vector>& f) {
    const int k_cap = model.capacity;
    const Index w = model.arrival.dim();
    const RowVector& beta = model.service.init();
    const RowVector& gamma = model.obsolescence.init();
    double total = 0.0;
    for (int i = 0; i < k_cap; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const RowVector& pi = sol.p[static_cast<size_t>(i)];
        const Index phase = pi.size() / w;
        Eigen::Map<const RowMajor> pv(pi.data(), w, phase);
        const int kmax = bp.max_batch();
        RowVector z = RowVector::Zero(phase);
        for (int l = std::min(kmax, k_cap - i); l >= 1; --l) {
            // Accumulate from the top so z holds Σ_{k ≥ l}; slots above K−i are still counted in z.
            if (l == std::min(kmax, k_cap - i)) {
                for (int k = l; k <= kmax; ++k) z += bp.d(k).rowwise().sum().transpose() * pv;
            } else {
                z += bp.d(l).rowwise().sum().transpose() * pv;
            }
            const Vector& target = f[static_cast<size_t>(i + l - 1)];
            if (i == 0) {
                total += z(0) * (linalg::kron(beta, linalg::kron_power(gamma, l - 1)) * target).value();
            } else {
                const RowVector gl = linalg::kron_power(gamma, l);
                Eigen::Map<const RowMajor> tv(target.data(), phase, gl.size());
                total += (z * (tv * gl.transpose())).value();
            }
        }
    }
    return total;
}

SojournTransform assemble_transform(const PerformanceReport& rep, double u, double s1, double s2) {
    SojournTransform out;
    out.u = u;
    out.v = s1 + s2 + rep.p_loss;
    if (rep.p_success >= kConditioningFloor) out.v1 = s1 / rep.p_success;
    if (rep.p_obs >= kConditioningFloor) out.v2 = s2 / rep.p_obs;
    return out;
}

SojournMeans assemble_means(const PerformanceReport& rep, double s1, double s2) {
    SojournMeans out;
    out.v_bar = s1 + s2;
    if (rep.p_success >= kConditioningFloor) out.v1_bar = s1 / rep.p_success;
    if (rep.p_obs >= kConditioningFloor) out.v2_bar = s2 / rep.p_obs;
    return out;
}

void require_ordinary(const QueueModel& model, const ThresholdPolicy& pol) {
    for (int m : pol.modes()) {
        if (model.arrival.mode(m).max_batch() > 1) {
            throw WrongSolverError("ordinary-arrival sojourn formulas need batch sizes ≤ 1 in every policy mode");
        }
    }
}

// Single-arrival placement with C_{i,1} formed explicitly.
double ordinary_average(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                        const std::vector<Vector>& f) {
    double total = 0.0;
    for (int i = 0; i < model.capacity; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const Index phase = model.phase_dim(i);
        const Matrix c = i == 0 ? Matrix(model.service.init())
                                : linalg::kron(linalg::identity(phase), model.obsolescence.init());
        const Matrix weight = linalg::kron(Matrix(bp.d(1).rowwise().sum()), linalg::identity(phase));
        total += (sol.p[static_cast<size_t>(i)] * weight * c * f[static_cast<size_t>(i)]).value();
    }
    return total;
}

}  // namespace

LstVectors lst_vectors(const QueueModel& model, double u) {
    return lst_vectors(model, PhaseBlocks(model.service, model.obsolescence, std::max(model.capacity - 1, 0)), u);
}

LstVectors lst_vectors(const QueueModel& model, const PhaseBlocks& pb, double u) {
    if (!(u >= 0.0)) throw ValidationError({"transform argument u must be >= 0, got " + std::to_string(u)});
    const int k_cap = model.capacity;
    const Index m = model.service.size();
    const Index r = model.obsolescence.size();
    LstVectors out;
    out.u = u;
    {
        Factorization lu(shifted(model.service.subgen(), u));
        out.v1.push_back(lu.solve(model.service.exit()));
        out.v2.push_back(Vector::Zero(m));
    }
    for (int i = 1; i < k_cap; ++i) {
        const Index dim = m * linalg::ipow(r, i);
        Factorization lu(shifted(pb.a(i), u));
        Matrix rhs(dim, 2);
        rhs.col(0) = apply_bhat(model, pb, i, out.v1.back());
        rhs.col(1) = own_exit(model, i) + apply_bhat(model, pb, i, out.v2.back());
        const Matrix sol = lu.solve(rhs);
        out.v1.push_back(sol.col(0));
        out.v2.push_back(sol.col(1));
        expect_dim(out.v1.back(), dim, "v1", i);
        expect_dim(out.v2.back(), dim, "v2", i);
    }
    return out;
}

MeanVectors mean_vectors(const QueueModel& model) {
    return mean_vectors(model, PhaseBlocks(model.service, model.obsolescence, std::max(model.capacity - 1, 0)));
}

MeanVectors mean_vectors(const QueueModel& model, const PhaseBlocks& pb) {
    const int k_cap = model.capacity;
    const Index m = model.service.size();
    const Index r = model.obsolescence.size();
    MeanVectors out;
    Vector v1 = Vector::Ones(m);
    Vector v2 = Vector::Zero(m);
    {
        Factorization lu(-model.service.subgen());
        out.w1.push_back(lu.solve(Vector::Ones(m)));
        out.w2.push_back(Vector::Zero(m));
    }
    // v_i(0) = (−A_i)⁻¹[…] and w_i = (−A_i)⁻¹[v_i(0) + B̂_{i−1} w_{i−1}], one factorisation per level.
    for (int i = 1; i < k_cap; ++i) {
        const Index dim = m * linalg::ipow(r, i);
        Factorization lu(-pb.a(i));
        Matrix rhs(dim, 2);
        rhs.col(0) = apply_bhat(model, pb, i, v1);
        rhs.col(1) = own_exit(model, i) + apply_bhat(model, pb, i, v2);
        const Matrix v0 = lu.solve(rhs);
        v1 = v0.col(0);
        v2 = v0.col(1);
        rhs.col(0) = v1 + apply_bhat(model, pb, i, out.w1.back());
        rhs.col(1) = v2 + apply_bhat(model, pb, i, out.w2.back());
        const Matrix w = lu.solve(rhs);
        out.w1.push_back(w.col(0));
        out.w2.push_back(w.col(1));
        expect_dim(out.w1.back(), dim, "w1", i);
    }
    return out;
}

SojournTransform sojourn_lst(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                             const PerformanceReport& rep, double u) {
    const LstVectors lv = lst_vectors(model, u);
    const double s1 = arrival_average(model, pol, sol, lv.v1) / rep.lambda;
    const double s2 = arrival_average(model, pol, sol, lv.v2) / rep.lambda;
    return assemble_transform(rep, u, s1, s2);
}

SojournMeans mean_sojourns(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                           const PerformanceReport& rep) {
    const MeanVectors mv = mean_vectors(model);
    const double s1 = arrival_average(model, pol, sol, mv.w1) / rep.lambda;
    const double s2 = arrival_average(model, pol, sol, mv.w2) / rep.lambda;
    return assemble_means(rep, s1, s2);
}

SojournTransform sojourn_lst_ordinary(const QueueModel& model, const ThresholdPolicy& pol,
                                      const StationarySolution& sol, const PerformanceReport& rep, double u) {
    require_ordinary(model, pol);
    const LstVectors lv = lst_vectors(model, u);
    return assemble_transform(rep, u, ordinary_average(model, pol, sol, lv.v1) / rep.lambda,
                              ordinary_average(model, pol, sol, lv.v2) / rep.lambda);
}

SojournMeans mean_sojourns_ordinary(const QueueModel& model, const ThresholdPolicy& pol,
                                    const StationarySolution& sol, const PerformanceReport& rep) {
    require_ordinary(model, pol);
    const MeanVectors mv = mean_vectors(model);
    return assemble_means(rep, ordinary_average(model, pol, sol, mv.w1) / rep.lambda,
                          ordinary_average(model, pol, sol, mv.w2) / rep.lambda);
}

void fill_sojourn_means(PerformanceReport& rep, const QueueModel& model, const ThresholdPolicy& pol,
                        const StationarySolution& sol) {
    const SojournMeans sm = mean_sojourns(model, pol, sol, rep);
    rep.v_bar = sm.v_bar;
    rep.v1_bar = sm.v1_bar;
    rep.v2_bar = sm.v2_bar;
    rep.sojourn_filled = true;
}

}  // namespace crawlq
