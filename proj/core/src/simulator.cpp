#include "crawlq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Index;
using linalg::Matrix;

void SimConfig::validate() const {
    std::vector<std::string> issues;
    if (n_arrivals < 10'000) issues.push_back("n_arrivals must be at least 10000");
    if (!(warmup >= 0.0 && warmup < 1.0)) issues.push_back("warmup must lie in [0, 1)");
    if (batches < 2) issues.push_back("at least two batches are needed for a confidence interval");
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

double student_t_995(int dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.995);
}

namespace {

// Outflow of one phase of an absorbing chain: total rate plus cumulative weights over
// targets 0..n−1 and absorption at n.
struct PhaseRow {
    double rate = 0.0;
    std::vector<double> cumulative;
};

std::vector<PhaseRow> phase_rows(const PhaseType& ph) {
    std::vector<PhaseRow> rows;
    const Matrix& s = ph.subgen();
    for (Index i = 0; i < ph.size(); ++i) {
        PhaseRow row;
        double acc = 0.0;
        for (Index j = 0; j < ph.size(); ++j) {
            if (j != i) acc += s(i, j);
            row.cumulative.push_back(acc);
        }
        acc += ph.exit()(i);
        row.cumulative.push_back(acc);
        row.rate = acc;
        rows.push_back(std::move(row));
    }
    return rows;
}

// First slot whose cumulative weight exceeds u·total; zero-weight slots are never chosen.
int pick(const std::vector<double>& cumulative, double u) {
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) {
        // Round-off put the target on the total: take the last slot with positive weight.
        it = std::lower_bound(cumulative.begin(), cumulative.end(), cumulative.back());
    }
    return static_cast<int>(it - cumulative.begin());
}

int draw_initial(const linalg::RowVector& init, double u) {
    std::vector<double> cum;
    double acc = 0.0;
    for (Index i = 0; i < init.size(); ++i) cum.push_back(acc += init(i));
    return pick(cum, u);
}

// Transitions of the modulating chain from one state in one mode.
struct ArrivalRow {
    double rate = 0.0;
    std::vector<double> cumulative;
    std::vector<std::pair<int, int>> target;  // (batch size, next state)
};

std::vector<std::vector<ArrivalRow>> arrival_rows(const ModedArrival& arrival) {
    std::vector<std::vector<ArrivalRow>> out;
    for (const BatchProcess& bp : arrival.modes()) {
        std::vector<ArrivalRow> rows;
        for (Index v = 0; v < bp.dim(); ++v) {
            ArrivalRow row;
            double acc = 0.0;
            for (int k = 0; k <= bp.max_batch(); ++k) {
                for (Index j = 0; j < bp.dim(); ++j) {
                    const double r = bp.d(k)(v, j);
                    if ((k == 0 && j == v) || r <= 0.0) continue;
                    acc += r;
                    row.cumulative.push_back(acc);
                    row.target.emplace_back(k, static_cast<int>(j));
                }
            }
            row.rate = acc;
            rows.push_back(std::move(row));
        }
        out.push_back(std::move(rows));
    }
    return out;
}

struct Page {
    int phase;
    double arrival;
};

// Running sums for one batch of the batch-means estimator.
struct Bucket {
    double time = 0.0;
    double empty_time = 0.0;
    double robot_time = 0.0;
    double queue_time = 0.0;
    double arrived = 0.0;
    double lost = 0.0;
    double obs = 0.0;
    double served = 0.0;
    double served_sojourn = 0.0;
    double obs_sojourn = 0.0;
};

Estimate batch_estimate(const std::vector<double>& values, double t_quantile) {
    Estimate e;
    const auto n = static_cast<double>(values.size());
    for (double v : values) e.mean += v;
    e.mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.half_width = t_quantile * std::sqrt(ss / (n - 1.0) / n);
    return e;
}

// Page fraction with no events at all: batch means collapse to 0 ± 0, so report the
// exact one-sided 99% binomial bound 1 − 0.01^{1/n} instead.
Estimate fraction_estimate(const std::vector<double>& values, double t_quantile, double events, double trials) {
    if (events > 0.0 || trials <= 0.0) return batch_estimate(values, t_quantile);
    return Estimate{0.0, 1.0 - std::pow(0.01, 1.0 / trials)};
}

}  // namespace

double sample_ph(const PhaseType& ph, std::mt19937_64& rng) {
    const std::vector<PhaseRow> rows = phase_rows(ph);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int phase = draw_initial(ph.init(), unif(rng));
    const int absorbed = static_cast<int>(ph.size());
    double t = 0.0;
    while (phase != absorbed) {
        const PhaseRow& row = rows[static_cast<size_t>(phase)];
        t += std::exponential_distribution<double>(row.rate)(rng);
        phase = pick(row.cumulative, unif(rng));
    }
    return t;
}

SimReport simulate(const QueueModel& model, const ThresholdPolicy& pol, const SimConfig& cfg,
                   const SimObserver& observer) {
    cfg.validate();
    if (pol.capacity() != model.capacity) throw ValidationError({"policy capacity differs from model K"});

    const int k_cap = model.capacity;
    const auto arrivals = arrival_rows(model.arrival);
    const auto service = phase_rows(model.service);
    const auto clocks = phase_rows(model.obsolescence);
    const int m_abs = static_cast<int>(model.service.size());
    const int r_abs = static_cast<int>(model.obsolescence.size());

    // Independent streams: event timing, modulating chain, service, obsolescence.
    auto stream = [&](std::uint64_t id) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(id)};
        return std::mt19937_64(seq);
    };
    std::mt19937_64 rng_time = stream(1), rng_arr = stream(2), rng_srv = stream(3), rng_obs = stream(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const std::int64_t warm = static_cast<std::int64_t>(std::floor(cfg.warmup * static_cast<double>(cfg.n_arrivals)));
    const std::int64_t measured = cfg.n_arrivals - warm;
    std::vector<Bucket> buckets(static_cast<size_t>(cfg.batches));
    auto bucket_of = [&](std::int64_t batch_count) -> Bucket* {
        if (batch_count < warm) return nullptr;
        const std::int64_t b = (batch_count - warm) * cfg.batches / measured;
        return &buckets[static_cast<size_t>(std::min<std::int64_t>(b, cfg.batches - 1))];
    };

    // Start from the stationary modulating state of the initial mode, empty system.
    int nu = 0;
    {
        const linalg::RowVector theta = linalg::solve_left_null(model.arrival.mode(pol.active_mode(0)).generator());
        nu = draw_initial(theta, unif(rng_arr));
    }
    int srv_phase = -1;
    double srv_arrival = 0.0;
    std::deque<Page> buffer;
    int n = 0;
    int mode = pol.active_mode(0);
    double now = 0.0;
    std::int64_t batch_count = 0;
    SimReport rep;

    auto enter_service = [&](double arrival_time) {
        srv_phase = draw_initial(model.service.init(), unif(rng_srv));
        srv_arrival = arrival_time;
    };
    auto notify = [&](SimEventKind kind) {
        mode = pol.active_mode(n);
        if (observer) observer(SimEvent{now, kind, n, mode});
    };

    while (batch_count < cfg.n_arrivals) {
        const ArrivalRow& arow = arrivals[static_cast<size_t>(mode - 1)][static_cast<size_t>(nu)];
        const double srv_rate = srv_phase >= 0 ? service[static_cast<size_t>(srv_phase)].rate : 0.0;
        double clock_rate = 0.0;
        for (const Page& p : buffer) clock_rate += clocks[static_cast<size_t>(p.phase)].rate;
        const double total = arow.rate + srv_rate + clock_rate;

        const double dt = std::exponential_distribution<double>(total)(rng_time);
        if (Bucket* b = bucket_of(batch_count)) {
            b->time += dt;
            if (n == 0) b->empty_time += dt;
            b->robot_time += dt * mode;
            b->queue_time += dt * n;
        }
        now += dt;
        rep.sim_time = now;

        double x = unif(rng_time) * total;
        if (x < arow.rate) {
            const int idx = pick(arow.cumulative, unif(rng_arr));
            const auto [k, next] = arow.target[static_cast<size_t>(idx)];
            nu = next;
            if (k == 0) {
                notify(SimEventKind::ModulatingMove);
                continue;
            }
            Bucket* b = bucket_of(batch_count);
            const int admit = std::min(k, k_cap - n);
            rep.arrived += k;
            rep.admitted += admit;
            rep.lost += k - admit;
            if (b) {
                b->arrived += k;
                b->lost += k - admit;
            }
            for (int a = 0; a < admit; ++a) {
                if (n == 0) {
                    enter_service(now);
                } else {
                    buffer.push_back(Page{draw_initial(model.obsolescence.init(), unif(rng_obs)), now});
                }
                ++n;
            }
            ++batch_count;
            notify(SimEventKind::BatchArrival);
            continue;
        }
        x -= arow.rate;
        if (x < srv_rate) {
            const int next = pick(service[static_cast<size_t>(srv_phase)].cumulative, unif(rng_srv));
            if (next < m_abs) {
                srv_phase = next;
                notify(SimEventKind::ServicePhase);
                continue;
            }
            ++rep.served;
            if (Bucket* b = bucket_of(batch_count)) {
                b->served += 1;
                b->served_sojourn += now - srv_arrival;
            }
            --n;
            srv_phase = -1;
            if (!buffer.empty()) {
                // The head page's clock stops once it enters service.
                const double arrived_at = buffer.front().arrival;
                buffer.pop_front();
                enter_service(arrived_at);
            }
            notify(SimEventKind::ServiceCompletion);
            continue;
        }
        x -= srv_rate;
        size_t which = 0;
        for (; which + 1 < buffer.size(); ++which) {
            const double r = clocks[static_cast<size_t>(buffer[which].phase)].rate;
            if (x < r) break;
            x -= r;
        }
        Page& page = buffer[which];
        const int next = pick(clocks[static_cast<size_t>(page.phase)].cumulative, unif(rng_obs));
        if (next < r_abs) {
            page.phase = next;
            notify(SimEventKind::ClockPhase);
            continue;
        }
        ++rep.obsolesced;
        if (Bucket* b = bucket_of(batch_count)) {
            b->obs += 1;
            b->obs_sojourn += now - page.arrival;
        }
        buffer.erase(buffer.begin() + static_cast<std::ptrdiff_t>(which));
        --n;
        notify(SimEventKind::Obsolescence);
    }
    rep.in_system_at_end = n;

    const double tq = student_t_995(cfg.batches - 1);
    std::vector<double> star, loss, obs, succ, act, lam, v1, v2, queue;
    for (const Bucket& b : buckets) {
        star.push_back(b.empty_time / b.time);
        act.push_back(b.robot_time / b.time);
        queue.push_back(b.queue_time / b.time);
        lam.push_back(b.arrived / b.time);
        loss.push_back(b.arrived > 0 ? b.lost / b.arrived : 0.0);
        obs.push_back(b.arrived > 0 ? b.obs / b.arrived : 0.0);
        succ.push_back(b.arrived > 0 ? b.served / b.arrived : 0.0);
        v1.push_back(b.served > 0 ? b.served_sojourn / b.served : 0.0);
        v2.push_back(b.obs > 0 ? b.obs_sojourn / b.obs : 0.0);
    }
    rep.p_star = batch_estimate(star, tq);
    double pages = 0.0, lost_pages = 0.0, obs_pages = 0.0, served_pages = 0.0;
    for (const Bucket& b : buckets) {
        pages += b.arrived;
        lost_pages += b.lost;
        obs_pages += b.obs;
        served_pages += b.served;
    }
    rep.p_loss = fraction_estimate(loss, tq, lost_pages, pages);
    rep.p_obs = fraction_estimate(obs, tq, obs_pages, pages);
    rep.p_success = fraction_estimate(succ, tq, served_pages, pages);
    rep.n_act = batch_estimate(act, tq);
    rep.lambda = batch_estimate(lam, tq);
    rep.v1_bar = batch_estimate(v1, tq);
    rep.v2_bar = batch_estimate(v2, tq);
    rep.mean_queue = batch_estimate(queue, tq);
    return rep;
}

}  // namespace crawlq
