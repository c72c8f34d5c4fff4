#include <random>

#include "crawlq/error.hpp"
#include "crawlq/model_file.hpp"
#include "crawlq/stationary.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crawlq;

TEST_CASE("M/M/1/2 stationary vector") {
    const auto model = testing::mm1k(1.0, 1.0, 1.0, 2);
    const auto bg = build_generator(model, ThresholdPolicy::single(2, 1));
    const double expected[] = {0.4, 0.4, 0.2};
    for (const auto& sol : {solve_general(bg), solve_qbd(bg)}) {
        for (int i = 0; i <= 2; ++i) CHECK(sol.level_probability(i) == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(sol.residual < 1e-12);
    }
}

TEST_CASE("birth-death closed form for larger K") {
    for (int k : {1, 3, 10, 40}) {
        const auto model = testing::mm1k(0.8, 1.3, 0.2, k);
        const auto sol = solve_general(build_generator(model, ThresholdPolicy::single(k, 1)));
        const auto levels = testing::mm1k_levels(0.8, 1.3, 0.2, k);
        for (int i = 0; i <= k; ++i) CHECK(std::abs(sol.level_probability(i) - levels[static_cast<size_t>(i)]) < 1e-12);
    }
}

TEST_CASE("general solver matches the dense kernel on random models") {
    std::mt19937_64 rng(202);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto model = testing::random_model(rng);
        if (model.total_dim() >= 2000) continue;
        const auto pol = testing::random_policy(rng, model);
        const auto bg = build_generator(model, pol);
        const auto sol = solve_general(bg);
        INFO(testing::describe(model), " ", pol.to_string());
        CHECK(testing::max_abs_diff(sol.p, testing::dense_stationary(bg)) < 1e-10);
        CHECK(sol.residual < 1e-10);
        CHECK(std::abs(sol.flatten().sum() - 1.0) < 1e-12);
        CHECK(sol.flatten().minCoeff() >= 0.0);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("QBD solver agrees with general on tridiagonal models") {
    std::mt19937_64 rng(303);
    testing::RandomModelOptions opt;
    opt.max_batch = 1;
    for (int trial = 0; trial < 40; ++trial) {
        const auto model = testing::random_model(rng, opt);
        const auto bg = build_generator(model, testing::random_policy(rng, model));
        REQUIRE(bg.tridiagonal());
        const auto g = solve_general(bg);
        const auto q = solve_qbd(bg);
        CHECK(q.method == SolverMethod::Qbd);
        CHECK(testing::max_abs_diff(g.p, q.p) < 1e-10);
    }
}

TEST_CASE("QBD solver refuses batch generators") {
    const auto lm = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/example1.json");
    const auto bg = build_generator(lm.model, ThresholdPolicy::single(5, 4));
    CHECK_THROWS_AS(solve_qbd(bg), WrongSolverError);
    const auto sol = solve_general(bg);
    CHECK(sol.residual < 1e-10);
    CHECK(testing::max_abs_diff(sol.p, testing::dense_stationary(bg)) < 1e-10);
}

TEST_CASE("residual detects a wrong vector") {
    const auto model = testing::mm1k(1.0, 1.0, 1.0, 2);
    const auto bg = build_generator(model, ThresholdPolicy::single(2, 1));
    auto sol = solve_general(bg);
    sol.p[0](0) += 0.1;
    CHECK(stationary_residual(bg, sol.p) > 0.05);
}

TEST_CASE("trace-fitted model at K = 20 solves accurately") {
    const auto lm = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/table5.json");
    const auto bg = build_generator(lm.model, ThresholdPolicy::create(20, {4, 1}, {2}));
    const auto sol = solve_general(bg);
    CHECK(sol.residual < 1e-10);
    CHECK(std::abs(sol.flatten().sum() - 1.0) < 1e-12);
}
