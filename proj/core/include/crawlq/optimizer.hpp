#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crawlq/generator.hpp"
#include "crawlq/measures.hpp"
#include "crawlq/policy.hpp"
#include "crawlq/stationary.hpp"

namespace crawlq {

struct CostCoefficients {
    double c_loss = 0.0;
    double c_obs = 0.0;
    double a = 0.0;
    double c_rob = 0.0;
    double c_star = 0.0;

    /// Throws ValidationError on a negative or non-finite coefficient.
    void validate() const;
};

/// J = λ(c_loss·P_loss + c_obs·P_obs) + a·V̄^{(1)} + c_rob·N_act + c_star·P_star.
/// Throws IncompleteReportError when the sojourn means are missing. An undefined V̄^{(1)}
/// (no page is ever served) contributes nothing.
double cost(const PerformanceReport& rep, const CostCoefficients& coeff);

enum class SolverChoice { Auto, General, Qbd };

struct PolicyEvaluation {
    ThresholdPolicy policy;
    PerformanceReport report;
    double residual = 0.0;
    double j = 0.0;
};

PolicyEvaluation evaluate_policy(const QueueModel& model, const ThresholdPolicy& pol, const CostCoefficients& coeff,
                                 SolverChoice solver = SolverChoice::Auto,
                                 linalg::Index state_cap = kDefaultStateCap);

/// Solve with the requested method; Auto picks the QBD solver for tridiagonal generators.
StationarySolution solve(const BlockGenerator& bg, SolverChoice solver = SolverChoice::Auto);

struct SubsetRow {
    std::vector<int> subset;            ///< descending
    ThresholdPolicy best;               ///< canonical (strict) form
    std::vector<int> thresholds;        ///< best written against `subset`, may repeat
    double j = 0.0;
    /// Best policy that uses every mode of `subset` (strictly increasing thresholds).
    std::optional<ThresholdPolicy> strict_best;
    double strict_j = 0.0;
};

struct OptimizeOptions {
    /// Empty means every non-empty subset of 1..N.
    std::vector<std::vector<int>> subsets;
    bool keep_evaluations = false;
    int threads = 1;
    linalg::Index state_cap = kDefaultStateCap;
};

struct OptimizationResult {
    ThresholdPolicy best_policy;
    double best_j = 0.0;
    std::vector<SubsetRow> table;
    std::vector<double> fixed_costs;  ///< C_r, r = 1..N
    double relative_profit = 0.0;
    std::vector<std::string> skipped;
    std::vector<PolicyEvaluation> evaluations;  ///< canonical order, when requested
};

/// Exhaustive search. A row for subset S is the minimum over strict policies whose modes
/// lie in S and include both max(S) and min(S); its thresholds are written against S.
/// Throws CapacityError when nothing at all can be evaluated.
OptimizationResult optimize(const QueueModel& model, const CostCoefficients& coeff,
                            const OptimizeOptions& options = {});

/// (1 − C*/min C_r)·100. Throws ValidationError on an empty or non-positive sequence.
double relative_profit(double best_j, const std::vector<double>& fixed_costs);

/// Non-empty subsets of 1..N, each descending; sorted by size, then lexicographically.
std::vector<std::vector<int>> all_subsets(int mode_count);

}  // namespace crawlq
