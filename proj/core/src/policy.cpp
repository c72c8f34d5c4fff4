#include "crawlq/policy.hpp"

#include <algorithm>
#include <sstream>

#include "crawlq/error.hpp"

namespace crawlq {

namespace {

std::string join(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError({"cannot parse " + what + " entry '" + tok + "'"});
        }
    }
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

ThresholdPolicy ThresholdPolicy::create(int capacity, std::vector<int> modes, std::vector<int> thresholds) {
    std::vector<std::string> issues;
    if (capacity < 1) issues.push_back("capacity must be at least 1");
    if (modes.empty()) issues.push_back("policy needs at least one mode");
    if (!modes.empty() && thresholds.size() + 1 != modes.size()) {
        issues.push_back(std::to_string(modes.size()) + " modes need " + std::to_string(modes.size() - 1) +
                         " thresholds, got " + std::to_string(thresholds.size()));
    }
    for (size_t r = 0; r < modes.size(); ++r) {
        if (modes[r] < 1) issues.push_back("mode " + std::to_string(modes[r]) + " must be >= 1");
        if (r > 0 && !(modes[r] < modes[r - 1])) issues.push_back("modes must be strictly decreasing");
    }
    for (size_t r = 0; r < thresholds.size(); ++r) {
        if (thresholds[r] < -1 || thresholds[r] > capacity) {
            issues.push_back("threshold " + std::to_string(thresholds[r]) + " outside [-1, " + std::to_string(capacity) + "]");
        }
        if (r > 0 && thresholds[r] < thresholds[r - 1]) issues.push_back("thresholds must be non-decreasing");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    ThresholdPolicy pol;
    pol.capacity_ = capacity;
    int prev = -1;
    for (size_t r = 0; r < modes.size(); ++r) {
        const int end = r < thresholds.size() ? thresholds[r] : capacity;
        if (end > prev) {
            pol.modes_.push_back(modes[r]);
            pol.thresholds_.push_back(end);
            prev = end;
        }
    }
    pol.thresholds_.pop_back();  // the last range always ends at K
    return pol;
}

ThresholdPolicy ThresholdPolicy::parse(const std::string& text, int capacity) {
    std::vector<int> modes;
    std::vector<int> thresholds;
    bool have_modes = false;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ValidationError({"policy part '" + part + "' lacks '='"});
        const std::string key = trim(part.substr(0, eq));
        const std::string value = trim(part.substr(eq + 1));
        if (key == "modes") {
            modes = parse_ints(value, "modes");
            have_modes = true;
        } else if (key == "thresholds") {
            thresholds = parse_ints(value, "thresholds");
        } else {
            throw ValidationError({"unknown policy key '" + key + "'"});
        }
    }
    if (!have_modes) throw ValidationError({"policy '" + text + "' has no modes="});
    return create(capacity, std::move(modes), std::move(thresholds));
}

int ThresholdPolicy::active_mode(int i) const {
    if (i < 0 || i > capacity_) {
        throw DimensionError("queue length " + std::to_string(i) + " outside 0.." + std::to_string(capacity_));
    }
    const auto it = std::lower_bound(thresholds_.begin(), thresholds_.end(), i);
    return modes_[static_cast<size_t>(it - thresholds_.begin())];
}

std::string ThresholdPolicy::modes_string() const { return join(modes_); }
std::string ThresholdPolicy::thresholds_string() const { return join(thresholds_); }

std::string ThresholdPolicy::to_string() const {
    std::string out = "modes=" + modes_string();
    if (!thresholds_.empty()) out += ";thresholds=" + thresholds_string();
    return out;
}

std::strong_ordering ThresholdPolicy::operator<=>(const ThresholdPolicy& other) const {
    if (auto c = modes_.size() <=> other.modes_.size(); c != 0) return c;
    if (auto c = modes_ <=> other.modes_; c != 0) return c;
    if (auto c = thresholds_ <=> other.thresholds_; c != 0) return c;
    return capacity_ <=> other.capacity_;
}

std::vector<ThresholdPolicy> enumerate_policies(std::vector<int> mode_subset, int capacity) {
    std::sort(mode_subset.begin(), mode_subset.end(), std::greater<>());
    mode_subset.erase(std::unique(mode_subset.begin(), mode_subset.end()), mode_subset.end());
    if (mode_subset.empty()) throw ValidationError({"enumerate_policies: empty mode subset"});
    const int cuts = static_cast<int>(mode_subset.size()) - 1;
    std::vector<ThresholdPolicy> out;
    if (cuts > capacity) return out;

    // Lexicographic walk over strictly increasing tuples in {0..K-1}.
    std::vector<int> t(static_cast<size_t>(cuts));
    for (int r = 0; r < cuts; ++r) t[static_cast<size_t>(r)] = r;
    while (true) {
        out.push_back(ThresholdPolicy::create(capacity, mode_subset, t));
        int r = cuts - 1;
        while (r >= 0 && t[static_cast<size_t>(r)] == capacity - cuts + r) --r;
        if (r < 0) break;
        ++t[static_cast<size_t>(r)];
        for (int q = r + 1; q < cuts; ++q) t[static_cast<size_t>(q)] = t[static_cast<size_t>(q - 1)] + 1;
    }
    return out;
}

std::vector<int> thresholds_over(const ThresholdPolicy& pol, const std::vector<int>& subset) {
    std::vector<int> out;
    for (size_t r = 0; r + 1 < subset.size(); ++r) {
        int last = -1;
        for (int i = 0; i <= pol.capacity(); ++i) {
            if (pol.active_mode(i) >= subset[r]) last = i;
        }
        out.push_back(last);
    }
    return out;
}

}  // namespace crawlq
