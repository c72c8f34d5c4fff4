#include <random>

#include "crawlq/error.hpp"
#include "crawlq/model_file.hpp"
#include "crawlq/optimizer.hpp"
#include "crawlq/sojourn.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crawlq;

namespace {

LoadedModel fixture(const char* name) { return load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/" + name); }

bool within(double x, double ref, double rel) { return std::abs(x - ref) <= rel * std::abs(ref); }

const SubsetRow& row_for(const OptimizationResult& res, const std::vector<int>& s) {
    for (const auto& row : res.table) {
        if (row.subset == s) return row;
    }
    throw std::runtime_error("missing subset row");
}

}  // namespace

TEST_CASE("cost terms") {
    PerformanceReport rep;
    rep.lambda = 2.0;
    rep.p_loss = 0.1;
    rep.p_obs = 0.2;
    rep.p_success = 0.7;
    rep.n_act = 1.5;
    rep.p_star = 0.3;
    rep.v1_bar = 4.0;
    CHECK_THROWS_AS(cost(rep, {}), IncompleteReportError);
    rep.sojourn_filled = true;
    CHECK(cost(rep, {}) == 0.0);
    CHECK(cost(rep, {1, 0, 0, 0, 0}) == doctest::Approx(0.2));
    CHECK(cost(rep, {0, 1, 0, 0, 0}) == doctest::Approx(0.4));
    CHECK(cost(rep, {0, 0, 1, 0, 0}) == doctest::Approx(4.0));
    CHECK(cost(rep, {0, 0, 0, 1, 0}) == doctest::Approx(1.5));
    CHECK(cost(rep, {0, 0, 0, 0, 1}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(CostCoefficients({-1, 0, 0, 0, 0}).validate(), ValidationError);
}

TEST_CASE("cost is affine in each coefficient") {
    std::mt19937_64 rng(111);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = testing::random_model(rng);
        const auto pol = testing::random_policy(rng, model);
        const CostCoefficients c{3.0, 2.0, 1.5, 4.0, 7.0};
        auto doubled = c;
        doubled.c_loss *= 2;
        const auto e1 = evaluate_policy(model, pol, c);
        const auto e2 = evaluate_policy(model, pol, doubled);
        CHECK(std::abs((e2.j - e1.j) - e1.report.lambda * c.c_loss * e1.report.p_loss) < 1e-12 * std::max(1.0, e1.j));
    }
}

TEST_CASE("relative profit") {
    CHECK(std::abs(relative_profit(63.54, {149.91, 110.0, 89.40, 130.31}) - 28.9) < 0.05);
    CHECK(relative_profit(89.40, {149.91, 110.0, 89.40, 130.31}) == 0.0);
    CHECK(std::abs(relative_profit(563.51, {666.28, 657.07, 639.03, 621.25}) - 9.29) < 0.01);
    CHECK(relative_profit(120.0, {100.0}) < 0.0);
    CHECK_THROWS_AS(relative_profit(1.0, {}), ValidationError);
}

TEST_CASE("subset listing") {
    const auto s = all_subsets(3);
    REQUIRE(s.size() == 7);
    CHECK(s.front() == std::vector<int>{1});
    CHECK(s[3] == std::vector<int>{2, 1});
    CHECK(s.back() == std::vector<int>{3, 2, 1});
    CHECK(all_subsets(4).size() == 15);
}

TEST_CASE("first example: fixed costs and the bold row") {
    const auto lm = fixture("example1.json");
    const auto res = optimize(lm.model, *lm.costs);
    CHECK(within(res.fixed_costs[2], 89.405, 0.01));
    const auto& row = row_for(res, {3, 1});
    CHECK(row.thresholds == std::vector<int>{2});
    CHECK(within(row.j, 63.54, 0.02));
    CHECK(res.best_policy == ThresholdPolicy::create(5, {3, 1}, {2}));
    CHECK(std::abs(res.relative_profit - 28.9) < 0.1);
    for (const auto& r : res.table) CHECK(res.best_j <= r.j);

    const auto single = optimize(lm.model, *lm.costs, {{{2}}, false, 1, kDefaultStateCap});
    REQUIRE(single.table.size() == 1);
    CHECK(single.table[0].j == res.fixed_costs[1]);
    CHECK(single.best_j == res.fixed_costs[1]);
}

TEST_CASE("trace-fitted model reproduces the subset table") {
    const auto lm = fixture("table5.json");
    const auto res = optimize(lm.model, *lm.costs);
    const double fixed[] = {666.28, 657.07, 639.03, 621.25};
    for (int r = 0; r < 4; ++r) CHECK(within(res.fixed_costs[static_cast<size_t>(r)], fixed[r], 0.005));
    CHECK(within(res.best_j, 563.51, 0.005));
    CHECK(res.best_policy == ThresholdPolicy::create(20, {4, 1}, {2}));
    CHECK(row_for(res, {4, 3, 2, 1}).thresholds == std::vector<int>{2, 2, 2});
    CHECK(row_for(res, {4, 1}).thresholds == std::vector<int>{2});
    CHECK(within(row_for(res, {4, 2}).j, 593.29, 0.005));
}

TEST_CASE("larger search sets never do worse") {
    std::mt19937_64 rng(222);
    const CostCoefficients c{5, 10, 2, 20, 300};
    for (int trial = 0; trial < 8; ++trial) {
        testing::RandomModelOptions opt;
        opt.max_modes = 3;
        opt.max_k = 4;
        const auto model = testing::random_model(rng, opt);
        const auto subsets = all_subsets(model.arrival.count());
        const auto& s = subsets[static_cast<size_t>(trial) % subsets.size()];
        const auto& s2 = subsets.back();
        OptimizeOptions one;
        one.subsets = {s};
        OptimizeOptions both;
        both.subsets = {s, s2};
        CHECK(optimize(model, c, both).best_j <= optimize(model, c, one).best_j);
    }
}

TEST_CASE("thread count does not change the result") {
    const auto lm = fixture("example1.json");
    OptimizeOptions seq;
    seq.keep_evaluations = true;
    OptimizeOptions par = seq;
    par.threads = 3;
    const auto a = optimize(lm.model, *lm.costs, seq);
    const auto b = optimize(lm.model, *lm.costs, par);
    CHECK(a.best_j == b.best_j);
    CHECK(a.best_policy == b.best_policy);
    REQUIRE(a.table.size() == b.table.size());
    for (size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].j == b.table[i].j);
        CHECK(a.table[i].best == b.table[i].best);
    }
    REQUIRE(a.evaluations.size() == b.evaluations.size());
    for (size_t i = 0; i < a.evaluations.size(); ++i) CHECK(a.evaluations[i].j == b.evaluations[i].j);
}

TEST_CASE("a tight state cap skips policies") {
    const auto lm = fixture("example1.json");
    OptimizeOptions o;
    o.state_cap = 10;
    CHECK_THROWS_AS(optimize(lm.model, *lm.costs, o), CapacityError);
}
