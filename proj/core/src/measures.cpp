#include "crawlq/measures.hpp"

#include <algorithm>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

double starvation(const StationarySolution& sol) { return sol.level_probability(0); }

ActivityProfile active_robots(const StationarySolution& sol, const ThresholdPolicy& pol, int mode_count) {
    ActivityProfile out;
    out.phi.assign(static_cast<size_t>(mode_count), 0.0);
    for (int r = 0; r < pol.size(); ++r) {
        const int n = pol.modes()[static_cast<size_t>(r)];
        if (n < 1 || n > mode_count) throw DimensionError("policy mode outside 1..N");
        double mass = 0.0;
        for (int i = pol.range_begin(r); i <= pol.range_end(r); ++i) mass += sol.level_probability(i);
        out.phi[static_cast<size_t>(n - 1)] += mass;
    }
    for (int n = 1; n <= mode_count; ++n) out.n_act += n * out.phi[static_cast<size_t>(n - 1)];
    return out;
}

RowVector modulating_marginal(const StationarySolution& sol, int i, Index w) {
    const RowVector& pi = sol.p.at(static_cast<size_t>(i));
    if (pi.size() % w != 0) throw DimensionError("level dimension is not a multiple of the modulating dimension");
    const Index phase = pi.size() / w;
    // States (ν, phase) are row-major, so each row of this view is one ν.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(pi.data(), w, phase);
    return view.rowwise().sum().transpose();
}

double effective_rate(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol) {
    const Index w = model.arrival.dim();
    double lambda = 0.0;
    for (int i = 0; i <= model.capacity; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const RowVector marg = modulating_marginal(sol, i, w);
        for (int k = 1; k <= bp.max_batch(); ++k) lambda += k * (marg * bp.d(k).rowwise().sum())(0);
    }
    return lambda;
}

double loss_probability(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol,
                        double lambda) {
    const Index w = model.arrival.dim();
    const int k_cap = model.capacity;
    double admitted = 0.0;
    for (int i = 0; i <= k_cap; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const RowVector marg = modulating_marginal(sol, i, w);
        for (int k = 0; k <= k_cap - i; ++k) admitted += (k - k_cap + i) * (marg * bp.d(k).rowwise().sum())(0);
    }
    return 1.0 - admitted / lambda;
}

double loss_probability_decomposed(const StationarySolution& sol, const QueueModel& model,
                                   const ThresholdPolicy& pol) {
    const Index w = model.arrival.dim();
    const int k_cap = model.capacity;
    int kmax = 0;
    for (const auto& m : pol.modes()) kmax = std::max(kmax, model.arrival.mode(m).max_batch());

    // rate[i][k] = p_i (D_k ⊗ I) e: batches of size k arriving at level i.
    std::vector<std::vector<double>> rate(static_cast<size_t>(k_cap + 1), std::vector<double>(static_cast<size_t>(kmax + 1), 0.0));
    for (int i = 0; i <= k_cap; ++i) {
        const BatchProcess& bp = model.arrival.mode(pol.active_mode(i));
        const RowVector marg = modulating_marginal(sol, i, w);
        for (int k = 1; k <= bp.max_batch(); ++k) rate[static_cast<size_t>(i)][static_cast<size_t>(k)] = (marg * bp.d(k).rowwise().sum())(0);
    }
    std::vector<double> batch_rate(static_cast<size_t>(kmax + 1), 0.0);
    double page_rate = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        for (int i = 0; i <= k_cap; ++i) batch_rate[static_cast<size_t>(k)] += rate[static_cast<size_t>(i)][static_cast<size_t>(k)];
        page_rate += k * batch_rate[static_cast<size_t>(k)];
    }
    double accepted = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        if (batch_rate[static_cast<size_t>(k)] <= 0.0) continue;
        const double p_k = k * batch_rate[static_cast<size_t>(k)] / page_rate;
        for (int i = 0; i <= k_cap; ++i) {
            const double p_ik = rate[static_cast<size_t>(i)][static_cast<size_t>(k)] / batch_rate[static_cast<size_t>(k)];
            const double phi = k <= k_cap - i ? 1.0 : static_cast<double>(k_cap - i) / k;
            accepted += p_ik * p_k * phi;
        }
    }
    return 1.0 - accepted;
}

double loss_probability_ordinary(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol,
                                 double lambda) {
    const int k_cap = model.capacity;
    const BatchProcess& bp = model.arrival.mode(pol.active_mode(k_cap));
    if (bp.max_batch() > 1) throw WrongSolverError("loss_probability_ordinary: mode has batches larger than one");
    const RowVector marg = modulating_marginal(sol, k_cap, model.arrival.dim());
    return (marg * bp.d(1).rowwise().sum())(0) / lambda;
}

Outcomes obsolescence_and_success(const StationarySolution& sol, const QueueModel& model, double lambda) {
    const Index w = model.arrival.dim();
    const Index m = model.service.size();
    const Index r = model.obsolescence.size();
    const Vector& s0 = model.service.exit();
    const Vector& g0 = model.obsolescence.exit();

    double obs_rate = 0.0;
    double served_rate = 0.0;
    for (int i = 1; i <= model.capacity; ++i) {
        const RowVector& pi = sol.p[static_cast<size_t>(i)];
        const Index clocks = linalg::ipow(r, i - 1);
        // Row-major (ν·M + m, clock tuple) view of p_i.
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(pi.data(), w * m,
                                                                                                     clocks);
        const Vector service_marg = view.rowwise().sum();  // length W·M
        for (Index nu = 0; nu < w; ++nu) served_rate += service_marg.segment(nu * m, m).dot(s0);
        if (i >= 2) {
            // (Γ₀^{⊕(i−1)} e) at a clock tuple is the sum of the exit rates of its i−1 clocks.
            const Vector exits = linalg::kron_col_power(g0, i - 1).rowwise().sum();
            obs_rate += (view.colwise().sum() * exits).value();
        }
    }
    return {obs_rate / lambda, served_rate / lambda};
}

PerformanceReport compute_measures(const StationarySolution& sol, const QueueModel& model,
                                   const ThresholdPolicy& pol) {
    PerformanceReport rep;
    rep.p_star = starvation(sol);
    auto act = active_robots(sol, pol, model.arrival.count());
    rep.phi = std::move(act.phi);
    rep.n_act = act.n_act;
    rep.lambda = effective_rate(sol, model, pol);
    if (!(rep.lambda > 0.0)) throw DegenerateChainError("effective arrival rate is zero under this policy");
    rep.p_loss = loss_probability(sol, model, pol, rep.lambda);
    rep.p_loss_decomposed = loss_probability_decomposed(sol, model, pol);
    const Outcomes o = obsolescence_and_success(sol, model, rep.lambda);
    rep.p_obs = o.p_obs;
    rep.p_success = o.p_success;
    for (int i = 1; i <= model.capacity; ++i) rep.mean_in_system += i * sol.level_probability(i);
    return rep;
}

}  // namespace crawlq
