#pragma once

#include <compare>
#include <string>
#include <vector>

namespace crawlq {

/// Monotone threshold control: mode m_r (number of active robots) is used while the
/// queue length i satisfies t_{r−1} < i ≤ t_r, with t_0 = −1 and t_s = K.
/// Stored in canonical form: modes strictly decreasing, thresholds strictly
/// increasing in [0, K−1], every mode owning a non-empty range.
class ThresholdPolicy {
public:
    /// Accepts non-decreasing thresholds in [−1, K]; modes whose range is empty are
    /// dropped. Throws ValidationError.
    static ThresholdPolicy create(int capacity, std::vector<int> modes, std::vector<int> thresholds);

    static ThresholdPolicy single(int capacity, int mode) { return create(capacity, {mode}, {}); }

    /// Parses "modes=4,1;thresholds=2" (thresholds may be omitted for one mode).
    static ThresholdPolicy parse(const std::string& text, int capacity);

    int capacity() const { return capacity_; }
    const std::vector<int>& modes() const { return modes_; }
    const std::vector<int>& thresholds() const { return thresholds_; }
    int size() const { return static_cast<int>(modes_.size()); }

    /// Mode active when i pages are in the system, 0 ≤ i ≤ K.
    int active_mode(int i) const;

    /// First and last queue length served by the r-th mode (0-based r).
    int range_begin(int r) const { return r == 0 ? 0 : thresholds_[static_cast<size_t>(r - 1)] + 1; }
    int range_end(int r) const { return r + 1 == size() ? capacity_ : thresholds_[static_cast<size_t>(r)]; }

    std::string to_string() const;
    std::string modes_string() const;
    std::string thresholds_string() const;

    /// Fewer modes first, then lexicographic on (modes, thresholds).
    std::strong_ordering operator<=>(const ThresholdPolicy& other) const;
    bool operator==(const ThresholdPolicy& other) const = default;

private:
    int capacity_ = 0;
    std::vector<int> modes_;
    std::vector<int> thresholds_;
};

/// Every policy that uses exactly the given modes (sorted descending) with strictly
/// increasing thresholds in {0..K−1}; C(K, s−1) policies in canonical order.
std::vector<ThresholdPolicy> enumerate_policies(std::vector<int> mode_subset, int capacity);

/// Thresholds of `pol` written against a superset of its modes: t_r = max{i : active_mode(i) ≥ subset[r]}.
/// Modes of the subset that `pol` skips get coincident thresholds ("2,2,2").
std::vector<int> thresholds_over(const ThresholdPolicy& pol, const std::vector<int>& subset);

}  // namespace crawlq
