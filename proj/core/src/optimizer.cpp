#include "crawlq/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "crawlq/error.hpp"
#include "crawlq/sojourn.hpp"

namespace crawlq {

void CostCoefficients::validate() const {
    std::vector<std::string> issues;
    const std::pair<const char*, double> named[] = {
        {"c_loss", c_loss}, {"c_obs", c_obs}, {"a", a}, {"c_rob", c_rob}, {"c_star", c_star}};
    for (const auto& [name, v] : named) {
        if (!std::isfinite(v) || v < 0.0) issues.push_back(std::string("cost coefficient ") + name + " must be >= 0");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

double cost(const PerformanceReport& rep, const CostCoefficients& coeff) {
    if (!rep.sojourn_filled) throw IncompleteReportError("cost needs the sojourn means; call fill_sojourn_means first");
    const double waiting = rep.v1_bar.value_or(0.0);
    return rep.lambda * (coeff.c_loss * rep.p_loss + coeff.c_obs * rep.p_obs) + coeff.a * waiting +
           coeff.c_rob * rep.n_act + coeff.c_star * rep.p_star;
}

StationarySolution solve(const BlockGenerator& bg, SolverChoice solver) {
    switch (solver) {
        case SolverChoice::General: return solve_general(bg);
        case SolverChoice::Qbd: return solve_qbd(bg);
        case SolverChoice::Auto: break;
    }
    return bg.tridiagonal() ? solve_qbd(bg) : solve_general(bg);
}

PolicyEvaluation evaluate_policy(const QueueModel& model, const ThresholdPolicy& pol, const CostCoefficients& coeff,
                                 SolverChoice solver, linalg::Index state_cap) {
    const BlockGenerator bg = build_generator(model, pol, state_cap);
    const StationarySolution sol = solve(bg, solver);
    PolicyEvaluation ev{pol, compute_measures(sol, model, pol), sol.residual, 0.0};
    fill_sojourn_means(ev.report, model, pol, sol);
    ev.j = cost(ev.report, coeff);
    return ev;
}

double relative_profit(double best_j, const std::vector<double>& fixed_costs) {
    if (fixed_costs.empty()) throw ValidationError({"relative profit needs at least one fixed-mode cost"});
    const double best_fixed = *std::min_element(fixed_costs.begin(), fixed_costs.end());
    if (!(best_fixed > 0.0)) throw ValidationError({"fixed-mode costs must be positive"});
    return (1.0 - best_j / best_fixed) * 100.0;
}

std::vector<std::vector<int>> all_subsets(int mode_count) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << mode_count); ++mask) {
        std::vector<int> s;
        for (int m = mode_count; m >= 1; --m) {
            if (mask & (1u << (m - 1))) s.push_back(m);
        }
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    return out;
}

namespace {

std::vector<int> normalise_subset(std::vector<int> s, int mode_count) {
    std::sort(s.begin(), s.end(), std::greater<>());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) throw ValidationError({"mode subset must not be empty"});
    for (int m : s) {
        if (m < 1 || m > mode_count) {
            throw ValidationError({"mode " + std::to_string(m) + " outside 1.." + std::to_string(mode_count)});
        }
    }
    return s;
}

// Sub-subsets of s (descending) that keep its first and last element.
std::vector<std::vector<int>> anchored(const std::vector<int>& s) {
    if (s.size() <= 2) return {s};
    const size_t inner = s.size() - 2;
    std::vector<std::vector<int>> out;
    for (unsigned mask = 0; mask < (1u << inner); ++mask) {
        std::vector<int> t{s.front()};
        for (size_t b = 0; b < inner; ++b) {
            if (mask & (1u << b)) t.push_back(s[b + 1]);
        }
        t.push_back(s.back());
        out.push_back(std::move(t));
    }
    return out;
}

std::string subset_string(const std::vector<int>& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out;
}

}  // namespace

OptimizationResult optimize(const QueueModel& model, const CostCoefficients& coeff, const OptimizeOptions& options) {
    coeff.validate();
    const int n_modes = model.arrival.count();
    const int k_cap = model.capacity;

    std::vector<std::vector<int>> subsets;
    if (options.subsets.empty()) {
        subsets = all_subsets(n_modes);
    } else {
        for (const auto& s : options.subsets) subsets.push_back(normalise_subset(s, n_modes));
        std::sort(subsets.begin(), subsets.end(), [](const auto& x, const auto& y) {
            if (x.size() != y.size()) return x.size() < y.size();
            return x < y;
        });
        subsets.erase(std::unique(subsets.begin(), subsets.end()), subsets.end());
    }

    std::set<ThresholdPolicy> needed;
    for (int r = 1; r <= n_modes; ++r) needed.insert(ThresholdPolicy::single(k_cap, r));
    for (const auto& s : subsets) {
        for (const auto& t : anchored(s)) {
            for (auto& p : enumerate_policies(t, k_cap)) needed.insert(std::move(p));
        }
    }
    const std::vector<ThresholdPolicy> policies(needed.begin(), needed.end());

    // Workers fill disjoint slots; the fold below runs in canonical order, so the
    // outcome does not depend on the thread count.
    std::vector<std::optional<PolicyEvaluation>> slots(policies.size());
    std::vector<std::string> errors(policies.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t idx = next++; idx < policies.size(); idx = next++) {
            try {
                slots[idx] = evaluate_policy(model, policies[idx], coeff, SolverChoice::Auto, options.state_cap);
            } catch (const Error& e) {
                errors[idx] = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(policies.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    OptimizationResult res;
    std::map<ThresholdPolicy, double> j_of;
    bool any = false;
    for (size_t idx = 0; idx < policies.size(); ++idx) {
        if (!slots[idx]) {
            res.skipped.push_back(policies[idx].to_string() + ": " + errors[idx]);
            continue;
        }
        j_of.emplace(policies[idx], slots[idx]->j);
        any = true;
        if (options.keep_evaluations) res.evaluations.push_back(std::move(*slots[idx]));
    }
    if (!any) {
        const std::string why = errors.empty() ? std::string("no policies") : errors.front();
        throw CapacityError("no policy could be evaluated: " + why);
    }

    res.fixed_costs.assign(static_cast<size_t>(n_modes), std::numeric_limits<double>::quiet_NaN());
    for (int r = 1; r <= n_modes; ++r) {
        const auto it = j_of.find(ThresholdPolicy::single(k_cap, r));
        if (it != j_of.end()) res.fixed_costs[static_cast<size_t>(r - 1)] = it->second;
    }

    for (const auto& s : subsets) {
        std::optional<SubsetRow> row;
        for (const auto& t : anchored(s)) {
            for (const auto& p : enumerate_policies(t, k_cap)) {
                const auto it = j_of.find(p);
                if (it == j_of.end()) continue;
                // Strict < over canonical order keeps the smallest policy on ties.
                if (!row || it->second < row->j || (it->second == row->j && p < row->best)) {
                    row = SubsetRow{s, p, thresholds_over(p, s), it->second, std::nullopt, 0.0};
                }
            }
        }
        if (row) {
            for (const auto& p : enumerate_policies(s, k_cap)) {
                const auto it = j_of.find(p);
                if (it == j_of.end()) continue;
                if (!row->strict_best || it->second < row->strict_j) {
                    row->strict_best = p;
                    row->strict_j = it->second;
                }
            }
            res.table.push_back(std::move(*row));
        } else {
            res.skipped.push_back("subset " + subset_string(s) + ": no evaluable policy");
        }
    }

    if (res.table.empty()) throw CapacityError("no requested subset could be evaluated");
    // Best over the requested subsets only; fixed modes outside them feed R alone.
    const SubsetRow* best = &res.table.front();
    for (const auto& row : res.table) {
        if (row.j < best->j || (row.j == best->j && row.best < best->best)) best = &row;
    }
    res.best_j = best->j;
    res.best_policy = best->best;

    std::vector<double> finite;
    for (double c : res.fixed_costs) {
        if (std::isfinite(c)) finite.push_back(c);
    }
    res.relative_profit = finite.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : relative_profit(res.best_j, finite);
    return res;
}

}  // namespace crawlq
