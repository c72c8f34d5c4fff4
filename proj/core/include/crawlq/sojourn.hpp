#pragma once

// Sojourn time of a tagged page. v_i has dimension M·R^i: the service phase, the
// clocks of the i−1 pages buffered ahead of the tagged page in arrival order, and
// the tagged page's own clock as the trailing factor. i = 0 means it enters service.

#include <optional>
#include <vector>

#include "crawlq/generator.hpp"
#include "crawlq/measures.hpp"
#include "crawlq/stationary.hpp"

namespace crawlq {

struct LstVectors {
    double u = 0.0;
    std::vector<linalg::Vector> v1;  ///< served before obsolescence, i = 0..K−1
    std::vector<linalg::Vector> v2;  ///< removed by obsolescence, i = 0..K−1
};

struct MeanVectors {
    std::vector<linalg::Vector> w1;
    std::vector<linalg::Vector> w2;
};

/// Throws ValidationError for u < 0.
LstVectors lst_vectors(const QueueModel& model, double u);
LstVectors lst_vectors(const QueueModel& model, const PhaseBlocks& pb, double u);

/// w = −dv/du at 0.
MeanVectors mean_vectors(const QueueModel& model);
MeanVectors mean_vectors(const QueueModel& model, const PhaseBlocks& pb);

struct SojournTransform {
    double u = 0.0;
    double v = 0.0;
    std::optional<double> v1;  ///< conditional on successful service
    std::optional<double> v2;  ///< conditional on obsolescence
};

struct SojournMeans {
    double v_bar = 0.0;
    std::optional<double> v1_bar;
    std::optional<double> v2_bar;
};

/// Probabilities below this make the conditional quantity undefined.
inline constexpr double kConditioningFloor = 1e-14;

SojournTransform sojourn_lst(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                             const PerformanceReport& rep, double u);

SojournMeans mean_sojourns(const QueueModel& model, const ThresholdPolicy& pol, const StationarySolution& sol,
                           const PerformanceReport& rep);

/// Ordinary-arrival forms: only single arrivals, placement C_{i,1}. Throw WrongSolverError on batches.
SojournTransform sojourn_lst_ordinary(const QueueModel& model, const ThresholdPolicy& pol,
                                      const StationarySolution& sol, const PerformanceReport& rep, double u);
SojournMeans mean_sojourns_ordinary(const QueueModel& model, const ThresholdPolicy& pol,
                                    const StationarySolution& sol, const PerformanceReport& rep);

/// Writes V̄, V̄^{(1)}, V̄^{(2)} into the report.
void fill_sojourn_means(PerformanceReport& rep, const QueueModel& model, const ThresholdPolicy& pol,
                        const StationarySolution& sol);

}  // namespace crawlq
