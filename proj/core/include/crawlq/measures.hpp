#pragma once

#include <optional>
#include <vector>

#include "crawlq/generator.hpp"
#include "crawlq/policy.hpp"
#include "crawlq/stationary.hpp"

namespace crawlq {

struct PerformanceReport {
    double p_star = 0.0;
    std::vector<double> phi;  ///< phi[n−1] = P(n robots active), n = 1..N
    double n_act = 0.0;
    double lambda = 0.0;
    double p_loss = 0.0;
    double p_loss_decomposed = 0.0;  ///< same quantity through batch-position probabilities
    double p_obs = 0.0;
    double p_success = 0.0;
    double mean_in_system = 0.0;  ///< Σ i·p_i·e

    // Filled by fill_sojourn_means().
    std::optional<double> v_bar;
    std::optional<double> v1_bar;  ///< undefined when P_success ≈ 0
    std::optional<double> v2_bar;  ///< undefined when P_obs ≈ 0
    bool sojourn_filled = false;
};

double starvation(const StationarySolution& sol);

struct ActivityProfile {
    std::vector<double> phi;
    double n_act = 0.0;
};
/// φ_n over the queue-length range of each policy mode; `mode_count` sizes phi.
ActivityProfile active_robots(const StationarySolution& sol, const ThresholdPolicy& pol, int mode_count);

/// ν-marginal of p_i: entry ν sums the level-i probabilities with modulating state ν.
linalg::RowVector modulating_marginal(const StationarySolution& sol, int i, linalg::Index w);

double effective_rate(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol);

/// 1 − (1/λ) Σ_i p_i Σ_{k=0}^{K−i} (k−K+i)(D_k ⊗ I)e.
double loss_probability(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol,
                        double lambda);

/// 1 − Σ_i Σ_k P_i^{(k)} P_k Φ^{(i,k)} with Φ = min(1, (K−i)/k). Independent oracle for loss_probability.
double loss_probability_decomposed(const StationarySolution& sol, const QueueModel& model,
                                   const ThresholdPolicy& pol);

/// Ordinary arrivals only: p_K (D_1 ⊗ I) e / λ.
double loss_probability_ordinary(const StationarySolution& sol, const QueueModel& model, const ThresholdPolicy& pol,
                                 double lambda);

struct Outcomes {
    double p_obs = 0.0;
    double p_success = 0.0;
};
/// Obsolescence and service-completion rates divided by λ.
Outcomes obsolescence_and_success(const StationarySolution& sol, const QueueModel& model, double lambda);

/// Every measure except the sojourn means.
PerformanceReport compute_measures(const StationarySolution& sol, const QueueModel& model,
                                   const ThresholdPolicy& pol);

}  // namespace crawlq
