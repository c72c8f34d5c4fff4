#pragma once

// Turning a timestamp log into batch statistics: first differences, removal of
// downtime gaps, and collapsing of near-simultaneous deliveries into batches.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace crawlq {

/// Throws ValidationError for fewer than two timestamps or a decreasing pair.
std::vector<double> interarrivals(const std::vector<double>& timestamps);

struct Censored {
    std::vector<double> kept;
    std::size_t removed = 0;
    std::vector<std::string> warnings;
};
/// Drops durations above `cutoff` (> 0).
Censored censor(const std::vector<double>& durations, double cutoff);

struct Batches {
    std::vector<double> gaps;  ///< times between batch arrivals
    std::vector<int> sizes;    ///< one entry per batch
};
/// A maximal run of r gaps below `epsilon` makes one batch of r+1 arrivals.
Batches batchify(const std::vector<double>& durations, double epsilon);

struct TraceStats {
    std::size_t n_batches = 0;
    double mean_interarrival = 0.0;
    double var_interarrival = 0.0;   ///< unbiased
    std::vector<double> lag_corr;    ///< lags 1..L; NaN when the variance is zero
    std::vector<double> batch_pmf;   ///< batch_pmf[k−1] = d_k
    double mean_batch = 0.0;
    std::vector<std::string> warnings;
};
/// Throws ValidationError with fewer than max_lag + 2 gaps.
TraceStats empirical_stats(const std::vector<double>& gaps, const std::vector<int>& sizes, int max_lag = 6);

/// One timestamp per line; blank lines and lines starting with '#' are skipped.
std::vector<double> read_timestamps(std::istream& in);

}  // namespace crawlq
