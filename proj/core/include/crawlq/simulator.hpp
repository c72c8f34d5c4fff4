#pragma once

// Monte-Carlo run of the same controlled queue, used to cross-check the analytic
// measures. The whole state is Markov (modulating state, service phase, one
// obsolescence phase per buffered page), so each step draws the time to the next
// transition from the total outflow rate and picks the transition proportionally.
// A mode switch simply changes the rates in effect from the next step on.

#include <cstdint>
#include <functional>
#include <random>

#include "crawlq/generator.hpp"
#include "crawlq/phase_type.hpp"
#include "crawlq/policy.hpp"

namespace crawlq {

struct SimConfig {
    std::int64_t n_arrivals = 1'000'000;  ///< batch arrivals, warm-up included
    double warmup = 0.1;                  ///< fraction of arrivals discarded
    std::uint64_t seed = 42;
    int batches = 30;

    /// Throws ValidationError when n_arrivals < 10⁴, warmup ∉ [0,1) or batches < 2.
    void validate() const;
};

/// Point estimate and 99% batch-means half-width. A page fraction that saw no events
/// reports mean 0 with the exact binomial bound 1 − 0.01^{1/n} as half-width.
struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;
    bool contains(double x) const { return x >= mean - half_width && x <= mean + half_width; }
    bool operator==(const Estimate&) const = default;
};

struct SimReport {
    Estimate p_star, p_loss, p_obs, p_success, n_act, lambda, v1_bar, v2_bar, mean_queue;

    // Whole-run page counts, warm-up included.
    std::int64_t arrived = 0;
    std::int64_t admitted = 0;
    std::int64_t lost = 0;
    std::int64_t served = 0;
    std::int64_t obsolesced = 0;
    std::int64_t in_system_at_end = 0;
    double sim_time = 0.0;

    bool operator==(const SimReport&) const = default;
};

enum class SimEventKind { ModulatingMove, BatchArrival, ServicePhase, ServiceCompletion, ClockPhase, Obsolescence };

struct SimEvent {
    double time = 0.0;
    SimEventKind kind = SimEventKind::ModulatingMove;
    int queue_length = 0;  ///< after the event
    int mode = 0;          ///< mode in force after the event
};

using SimObserver = std::function<void(const SimEvent&)>;

SimReport simulate(const QueueModel& model, const ThresholdPolicy& pol, const SimConfig& cfg,
                   const SimObserver& observer = {});

/// One draw of the absorption time.
double sample_ph(const PhaseType& ph, std::mt19937_64& rng);

/// 0.995 quantile of Student's t with n−1 degrees of freedom.
double student_t_995(int dof);

}  // namespace crawlq
