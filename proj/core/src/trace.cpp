#include "crawlq/trace.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>

#include "crawlq/error.hpp"

namespace crawlq {

std::vector<double> interarrivals(const std::vector<double>& timestamps) {
    if (timestamps.size() < 2) throw ValidationError({"need at least two timestamps"});
    std::vector<double> out;
    out.reserve(timestamps.size() - 1);
    for (size_t i = 1; i < timestamps.size(); ++i) {
        const double d = timestamps[i] - timestamps[i - 1];
        if (d < 0.0) {
            throw ValidationError({"timestamps decrease at line " + std::to_string(i + 1) + " (" +
                                   std::to_string(timestamps[i - 1]) + " then " + std::to_string(timestamps[i]) + ")"});
        }
        out.push_back(d);
    }
    return out;
}

Censored censor(const std::vector<double>& durations, double cutoff) {
    if (!(cutoff > 0.0)) throw ValidationError({"cutoff must be positive"});
    Censored c;
    for (double d : durations) {
        if (d <= cutoff) {
            c.kept.push_back(d);
        } else {
            ++c.removed;
        }
    }
    if (c.kept.empty() && !durations.empty()) c.warnings.push_back("every interval exceeds the cutoff");
    return c;
}

Batches batchify(const std::vector<double>& durations, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError({"epsilon must be positive"});
    Batches b;
    int current = 1;
    for (double d : durations) {
        if (d < epsilon) {
            ++current;
        } else {
            b.sizes.push_back(current);
            b.gaps.push_back(d);
            current = 1;
        }
    }
    b.sizes.push_back(current);
    return b;
}

TraceStats empirical_stats(const std::vector<double>& gaps, const std::vector<int>& sizes, int max_lag) {
    if (max_lag < 0) throw ValidationError({"max_lag must be >= 0"});
    if (gaps.size() < static_cast<size_t>(max_lag) + 2) {
        throw ValidationError({"need at least " + std::to_string(max_lag + 2) + " batch gaps, got " +
                               std::to_string(gaps.size())});
    }
    TraceStats ts;
    ts.n_batches = sizes.size();
    const auto n = static_cast<double>(gaps.size());
    ts.mean_interarrival = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
    double ss = 0.0;
    for (double g : gaps) ss += (g - ts.mean_interarrival) * (g - ts.mean_interarrival);
    ts.var_interarrival = ss / (n - 1.0);
    for (int lag = 1; lag <= max_lag; ++lag) {
        if (ss == 0.0) {
            ts.lag_corr.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double acc = 0.0;
        for (size_t i = 0; i + static_cast<size_t>(lag) < gaps.size(); ++i) {
            acc += (gaps[i] - ts.mean_interarrival) * (gaps[i + static_cast<size_t>(lag)] - ts.mean_interarrival);
        }
        ts.lag_corr.push_back(acc / ss);
    }
    if (ss == 0.0 && max_lag > 0) ts.warnings.push_back("inter-arrival variance is zero; correlations undefined");

    int kmax = 0;
    for (int s : sizes) {
        if (s < 1) throw ValidationError({"batch sizes must be positive"});
        kmax = std::max(kmax, s);
    }
    ts.batch_pmf.assign(static_cast<size_t>(kmax), 0.0);
    for (int s : sizes) ts.batch_pmf[static_cast<size_t>(s - 1)] += 1.0;
    for (size_t k = 0; k < ts.batch_pmf.size(); ++k) {
        ts.batch_pmf[k] /= static_cast<double>(sizes.size());
        ts.mean_batch += static_cast<double>(k + 1) * ts.batch_pmf[k];
    }
    return ts;
}

std::vector<double> read_timestamps(std::istream& in) {
    std::vector<double> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            size_t used = 0;
            out.push_back(std::stod(line.substr(first), &used));
        } catch (const std::exception&) {
            throw ValidationError({"line " + std::to_string(lineno) + ": not a number: " + line});
        }
    }
    return out;
}

}  // namespace crawlq
