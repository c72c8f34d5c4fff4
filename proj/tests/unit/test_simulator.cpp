#include <random>

#include "crawlq/error.hpp"
#include "crawlq/model_file.hpp"
#include "crawlq/simulator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crawlq;

namespace {

// |estimate − x| in units of the batch-means standard error.
double sigmas(const Estimate& e, double x, int batches = 30) {
    const double se = e.half_width / student_t_995(batches - 1);
    return std::abs(e.mean - x) / se;
}

}  // namespace

TEST_CASE("M/M/1/2 oracle") {
    const auto model = testing::mm1k(1.0, 1.0, 1.0, 2);
    const auto rep = simulate(model, ThresholdPolicy::single(2, 1), SimConfig{});
    CHECK(sigmas(rep.p_star, 0.4) < 3.0);
    CHECK(sigmas(rep.p_loss, 0.2) < 3.0);
    CHECK(sigmas(rep.p_obs, 0.2) < 3.0);
    CHECK(sigmas(rep.p_success, 0.6) < 3.0);
    CHECK(sigmas(rep.lambda, 1.0) < 3.0);
    CHECK(sigmas(rep.v2_bar, 0.5) < 3.0);
    CHECK(rep.n_act.mean == 1.0);
    CHECK(rep.p_star.half_width > 0.0);
}

TEST_CASE("same seed, same report") {
    const auto lm = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/example1.json");
    SimConfig cfg;
    cfg.n_arrivals = 20000;
    cfg.seed = 7;
    const auto pol = ThresholdPolicy::create(5, {4, 3, 1}, {0, 2});
    const auto a = simulate(lm.model, pol, cfg);
    const auto b = simulate(lm.model, pol, cfg);
    CHECK(a == b);
    cfg.seed = 8;
    CHECK(!(simulate(lm.model, pol, cfg) == a));
}

TEST_CASE("page counts are conserved and modes follow the policy") {
    std::mt19937_64 rng(333);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = testing::random_model(rng);
        const auto pol = testing::random_policy(rng, model);
        SimConfig cfg;
        cfg.n_arrivals = 10000;
        cfg.seed = 100 + static_cast<std::uint64_t>(trial);
        bool consistent = true;
        std::int64_t events = 0;
        const auto rep = simulate(model, pol, cfg, [&](const SimEvent& e) {
            ++events;
            if (e.mode != pol.active_mode(e.queue_length)) consistent = false;
        });
        CHECK(consistent);
        CHECK(events > 0);
        CHECK(rep.admitted == rep.served + rep.obsolesced + rep.in_system_at_end);
        CHECK(rep.admitted + rep.lost == rep.arrived);
        CHECK(rep.in_system_at_end <= model.capacity);
    }
}

TEST_CASE("unobserved losses get an exact binomial bound") {
    // Losses are astronomically rare with a deep buffer and strong reneging.
    const auto model = testing::mm1k(0.5, 1.0, 2.0, 12);
    SimConfig cfg;
    cfg.n_arrivals = 50000;
    const auto rep = simulate(model, ThresholdPolicy::single(12, 1), cfg);
    REQUIRE(rep.lost == 0);
    CHECK(rep.p_loss.mean == 0.0);
    const double pages = static_cast<double>(cfg.n_arrivals - cfg.n_arrivals / 10);
    CHECK(rep.p_loss.half_width == doctest::Approx(1.0 - std::pow(0.01, 1.0 / pages)).epsilon(1e-9));
    CHECK(rep.p_obs.half_width > 0.0);
}

TEST_CASE("configuration checks") {
    const auto model = testing::mm1k(1.0, 1.0, 1.0, 2);
    SimConfig cfg;
    cfg.n_arrivals = 100;
    CHECK_THROWS_AS(simulate(model, ThresholdPolicy::single(2, 1), cfg), ValidationError);
    cfg = SimConfig{};
    cfg.warmup = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("phase-type sampling") {
    std::mt19937_64 rng(444);
    const int n = 1'000'000;
    auto moments = [&](const PhaseType& ph) {
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sample_ph(ph, rng);
            REQUIRE(x > 0.0);
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        return std::pair{mean, s2 / n - mean * mean};
    };
    const auto ex = PhaseType::exponential(2.0);
    const auto [m_ex, v_ex] = moments(ex);
    CHECK(std::abs(m_ex - 0.5) < 3.0 * std::sqrt(0.25 / n));

    const auto lm = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/example1.json");
    const auto [m_ob, v_ob] = moments(lm.model.obsolescence);
    CHECK(std::abs(m_ob - 5.0) < 3.0 * std::sqrt(lm.model.obsolescence.variance() / n));

    const auto& sv = lm.model.service;
    const auto [m_sv, v_sv] = moments(sv);
    CHECK(std::abs(v_sv / (m_sv * m_sv) - sv.scv()) < 0.1 * sv.scv());
}

TEST_CASE("t quantile") {
    CHECK(student_t_995(29) == doctest::Approx(2.756).epsilon(1e-3));
    CHECK(student_t_995(1000000) == doctest::Approx(2.5758).epsilon(1e-3));
}
