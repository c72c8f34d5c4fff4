// crawlq: command-line front end for the threshold-control queue toolkit.
//
// Exit codes: 0 success, 1 invalid model or failed computation (JSON error list on
// stdout), 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crawlq/arrivals.hpp"
#include "crawlq/error.hpp"
#include "crawlq/generator.hpp"
#include "crawlq/measures.hpp"
#include "crawlq/model_file.hpp"
#include "crawlq/optimizer.hpp"
#include "crawlq/simulator.hpp"
#include "crawlq/sojourn.hpp"
#include "crawlq/stationary.hpp"
#include "crawlq/trace.hpp"

using namespace crawlq;

namespace {

std::string num(double x, int digits = 10) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string fixed(double x, int decimals) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

std::string join(const std::vector<int>& v, const char* sep = ",") {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
    return out;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : "undefined"; }

// Output sink: --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ValidationError({"cannot write " + path});
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
};

struct Common {
    std::string model_path;
    bool repair = false;
    bool strict = false;
    std::string out;
    int threads = 0;

    std::optional<ValidationMode> mode() const {
        if (repair) return ValidationMode::Repair;
        if (strict) return ValidationMode::Strict;
        return std::nullopt;
    }
    int thread_count() const {
        if (threads > 0) return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

void add_model_options(CLI::App* sub, Common& c) {
    sub->add_option("model", c.model_path, "JSON model file")->required()->check(CLI::ExistingFile);
    auto* rep = sub->add_flag("--repair", c.repair, "repair small defects in the arrival matrices");
    sub->add_flag("--strict", c.strict, "reject any defect, overriding the file's setting")->excludes(rep);
}

LoadedModel load(const Common& c) {
    auto lm = load_model_file(c.model_path, c.mode());
    for (const auto& line : lm.repair_log) std::cerr << "repair: " << line << "\n";
    return lm;
}

CostCoefficients costs_of(const LoadedModel& lm, const std::vector<double>& override_costs) {
    if (!override_costs.empty()) {
        if (override_costs.size() != 5) throw ValidationError({"--costs needs c_loss,c_obs,a,c_rob,c_star"});
        CostCoefficients c{override_costs[0], override_costs[1], override_costs[2], override_costs[3],
                           override_costs[4]};
        c.validate();
        return c;
    }
    if (!lm.costs) throw ValidationError({"model file has no costs block; pass --costs"});
    return *lm.costs;
}

// "4,1;3,1" -> {{4,1},{3,1}}
std::vector<std::vector<int>> parse_subsets(const std::string& text) {
    std::vector<std::vector<int>> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        std::vector<int> s;
        std::stringstream ps(part);
        std::string tok;
        while (std::getline(ps, tok, ',')) {
            if (tok.empty()) continue;
            try {
                s.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ValidationError({"cannot parse subset entry '" + tok + "'"});
            }
        }
        if (!s.empty()) out.push_back(std::move(s));
    }
    if (out.empty()) throw ValidationError({"--subsets is empty"});
    return out;
}

// CSV cells use spaces inside lists; the summary line uses commas.
std::string thresholds_text(const std::vector<int>& t, const char* sep = " ") { return t.empty() ? "--" : join(t, sep); }

void print_arrival_stats(const QueueModel& model) {
    for (int r = 1; r <= model.arrival.count(); ++r) {
        const auto st = arrival_stats(model.arrival.mode(r));
        std::cout << "mode " << r << ": lambda=" << num(st.lambda, 6) << " lambda_g=" << num(st.lambda_g, 6)
                  << " var_g=" << num(st.var_g, 6) << " c_cor=" << num(st.c_cor, 4) << "\n";
    }
    std::cout << "# c_cor: lag-1 correlation of inter-batch times, normalised by the mode's own rate\n";
}

// ---------------------------------------------------------------- validate

int run_validate(const Common& c, const std::string& canonical_path) {
    const auto lm = load(c);
    const auto& m = lm.model;
    std::cout << "valid: K=" << m.capacity << " modes=" << m.arrival.count() << " W=" << m.arrival.dim()
              << " M=" << m.service.size() << " R=" << m.obsolescence.size() << " states=" << m.total_dim()
              << "\n";
    std::cout << "service mean=" << num(m.service.mean(), 6) << " scv=" << num(m.service.scv(), 6)
              << "; obsolescence mean=" << num(m.obsolescence.mean(), 6) << "\n";
    print_arrival_stats(m);
    std::cout << "repairs=" << lm.repair_log.size() << "\n";
    if (!canonical_path.empty()) {
        std::ofstream out(canonical_path);
        if (!out) throw ValidationError({"cannot write " + canonical_path});
        out << emit_model(lm.canonical) << "\n";
        std::cout << "canonical model written to " << canonical_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- solve

SolverChoice solver_of(const std::string& s) {
    if (s == "general") return SolverChoice::General;
    if (s == "qbd") return SolverChoice::Qbd;
    return SolverChoice::Auto;
}

int run_solve(const Common& c, const std::string& policy_text, const std::string& solver,
              const std::vector<double>& lst_points) {
    const auto lm = load(c);
    const auto pol = ThresholdPolicy::parse(policy_text, lm.model.capacity);
    const auto sol = solve(build_generator(lm.model, pol), solver_of(solver));
    Sink sink(c.out);
    auto& os = sink.os();
    os << "level,probability\n";
    for (int i = 0; i <= sol.capacity(); ++i) os << i << "," << num(sol.level_probability(i), 15) << "\n";
    std::cout << "# residual=" << num(sol.residual, 3) << " method=" << to_string(sol.method)
              << " policy=" << pol.to_string() << "\n";
    if (!lst_points.empty()) {
        const auto rep = compute_measures(sol, lm.model, pol);
        std::cout << "u,v,v1,v2\n";
        for (double u : lst_points) {
            const auto t = sojourn_lst(lm.model, pol, sol, rep, u);
            std::cout << num(u) << "," << num(t.v, 12) << "," << opt_num(t.v1) << "," << opt_num(t.v2) << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- measures

int run_measures(const Common& c, const std::string& policy_text, const std::vector<double>& override_costs) {
    const auto lm = load(c);
    const auto pol = ThresholdPolicy::parse(policy_text, lm.model.capacity);
    const auto sol = solve(build_generator(lm.model, pol));
    auto rep = compute_measures(sol, lm.model, pol);
    fill_sojourn_means(rep, lm.model, pol, sol);
    std::optional<double> j;
    if (lm.costs || !override_costs.empty()) j = cost(rep, costs_of(lm, override_costs));

    const std::vector<std::pair<std::string, std::string>> kv{
        {"policy", pol.to_string()},
        {"P_star", num(rep.p_star)},
        {"N_act", num(rep.n_act)},
        {"lambda", num(rep.lambda)},
        {"P_loss", num(rep.p_loss)},
        {"P_loss_decomposed", num(rep.p_loss_decomposed)},
        {"P_obs", num(rep.p_obs)},
        {"P_success", num(rep.p_success)},
        {"mean_in_system", num(rep.mean_in_system)},
        {"V", opt_num(rep.v_bar)},
        {"V1", opt_num(rep.v1_bar)},
        {"V2", opt_num(rep.v2_bar)},
        {"J", j ? num(*j) : "undefined"},
        {"residual", num(sol.residual, 3)},
    };
    for (const auto& [k, v] : kv) std::cout << k << "=" << v << "\n";
    for (size_t n = 0; n < rep.phi.size(); ++n) std::cout << "phi_" << n + 1 << "=" << num(rep.phi[n]) << "\n";

    Sink sink(c.out);
    auto& os = sink.os();
    if (!sink.to_file()) os << "\n";
    for (size_t i = 0; i < kv.size(); ++i) os << (i ? "," : "") << kv[i].first;
    os << "\n";
    for (size_t i = 0; i < kv.size(); ++i) os << (i ? "," : "") << kv[i].second;
    os << "\n";
    return 0;
}

// ---------------------------------------------------------------- optimize

void write_curves(std::ostream& os, const OptimizationResult& res, const std::string& prefix_value) {
    for (const auto& ev : res.evaluations) {
        if (ev.policy.size() != 2) continue;
        if (!prefix_value.empty()) os << prefix_value << ",";
        os << join(ev.policy.modes(), " ") << "," << ev.policy.thresholds()[0] << "," << num(ev.j) << "\n";
    }
}

int run_optimize(const Common& c, const std::string& subsets, const std::vector<double>& override_costs,
                 const std::string& curves_path) {
    const auto lm = load(c);
    OptimizeOptions opt;
    if (!subsets.empty()) opt.subsets = parse_subsets(subsets);
    opt.threads = c.thread_count();
    opt.keep_evaluations = !curves_path.empty();
    const auto res = optimize(lm.model, costs_of(lm, override_costs), opt);

    Sink sink(c.out);
    auto& os = sink.os();
    os << "modes,thresholds,J,strict_thresholds,strict_J\n";
    for (const auto& row : res.table) {
        os << join(row.subset, " ") << "," << thresholds_text(row.thresholds) << "," << num(row.j) << ",";
        if (row.strict_best) {
            os << thresholds_text(row.strict_best->thresholds()) << "," << num(row.strict_j);
        } else {
            os << "--,";
        }
        os << "\n";
    }
    if (!curves_path.empty()) {
        std::ofstream cv(curves_path);
        if (!cv) throw ValidationError({"cannot write " + curves_path});
        cv << "modes,threshold,J\n";
        write_curves(cv, res, "");
    }

    std::cout << "\nJ*=" << fixed(res.best_j, 2) << " modes=" << res.best_policy.modes_string()
              << " thresholds=" << thresholds_text(res.best_policy.thresholds(), ",") << "\n";
    for (size_t r = 0; r < res.fixed_costs.size(); ++r) {
        std::cout << "C" << r + 1 << "=" << fixed(res.fixed_costs[r], 2) << (r + 1 < res.fixed_costs.size() ? " " : "\n");
    }
    std::cout << "R=" << fixed(res.relative_profit, 2) << "%\n";
    for (const auto& s : res.skipped) std::cerr << "skipped: " << s << "\n";
    return 0;
}

// ---------------------------------------------------------------- sweep

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const int a = std::stoi(text.substr(0, dots));
            const int b = std::stoi(text.substr(dots + 2));
            if (b < a) throw ValidationError({"empty range " + text});
            for (int v = a; v <= b; ++v) out.push_back(v);
            return out;
        }
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stod(tok));
        }
    } catch (const std::invalid_argument&) {
        throw ValidationError({"cannot parse value list '" + text + "'"});
    } catch (const std::out_of_range&) {
        throw ValidationError({"value out of range in '" + text + "'"});
    }
    if (out.empty()) throw ValidationError({"empty value list"});
    return out;
}

// Two-phase hyper-exponential with init (0.9, 0.1) and the given mean, parametrised by its first rate.
PhaseType h2_with_mean(double mean, double alpha1) {
    const double denom = mean * alpha1 - 0.9;
    if (!(denom > 0.0)) {
        throw ValidationError({"alpha1 = " + num(alpha1) + " must exceed " + num(0.9 / mean) +
                               " to keep the mean at " + num(mean)});
    }
    linalg::RowVector init(2);
    init << 0.9, 0.1;
    linalg::Matrix s = linalg::Matrix::Zero(2, 2);
    s(0, 0) = -alpha1;
    s(1, 1) = -0.1 * alpha1 / denom;
    return PhaseType::validate(init, s);
}

struct SweepPoint {
    std::vector<std::string> label;
    QueueModel model;
};

int run_sweep(const Common& c, const std::string& param, const std::string& scale_service,
              const std::string& scale_obsolescence, const std::string& service_h2,
              const std::string& obsolescence_h2, const std::vector<double>& override_costs,
              const std::string& subsets, const std::string& curves_path) {
    const auto lm = load(c);
    const auto coeff = costs_of(lm, override_costs);
    const QueueModel& base = lm.model;

    const int chosen = !param.empty() + !scale_service.empty() + !scale_obsolescence.empty() + !service_h2.empty() +
                       !obsolescence_h2.empty();
    if (chosen != 1) {
        throw CLI::ValidationError("sweep",
                                   "give exactly one of --param, --scale-service, --scale-obsolescence, "
                                   "--service-h2, --obsolescence-h2");
    }

    std::vector<std::string> header;
    std::vector<SweepPoint> points;
    if (!param.empty()) {
        const auto eq = param.find('=');
        if (eq == std::string::npos || param.substr(0, eq) != "K") {
            throw ValidationError({"--param expects K=a..b, got '" + param + "'"});
        }
        header = {"K"};
        for (double k : parse_values(param.substr(eq + 1))) {
            points.push_back({{std::to_string(static_cast<int>(k))},
                              QueueModel(base.arrival, base.service, base.obsolescence, static_cast<int>(k))});
        }
    } else if (!scale_service.empty()) {
        header = {"s", "b1"};
        for (double s : parse_values(scale_service)) {
            const auto sv = base.service.scaled(s);
            points.push_back({{num(s), num(sv.mean(), 6)}, QueueModel(base.arrival, sv, base.obsolescence, base.capacity)});
        }
    } else if (!scale_obsolescence.empty()) {
        header = {"s", "g1"};
        for (double s : parse_values(scale_obsolescence)) {
            const auto ob = base.obsolescence.scaled(s);
            points.push_back({{num(s), num(ob.mean(), 6)}, QueueModel(base.arrival, base.service, ob, base.capacity)});
        }
    } else if (!service_h2.empty()) {
        header = {"alpha1", "alpha2", "var_s"};
        for (double a : parse_values(service_h2)) {
            const auto sv = h2_with_mean(base.service.mean(), a);
            points.push_back({{num(a), num(-sv.subgen()(1, 1), 6), num(sv.variance(), 6)},
                              QueueModel(base.arrival, sv, base.obsolescence, base.capacity)});
        }
    } else {
        header = {"alpha1", "alpha2", "var_g"};
        for (double a : parse_values(obsolescence_h2)) {
            const auto ob = h2_with_mean(base.obsolescence.mean(), a);
            points.push_back({{num(a), num(-ob.subgen()(1, 1), 6), num(ob.variance(), 6)},
                              QueueModel(base.arrival, base.service, ob, base.capacity)});
        }
    }

    std::optional<std::ofstream> curves;
    if (!curves_path.empty()) {
        curves.emplace(curves_path);
        if (!*curves) throw ValidationError({"cannot write " + curves_path});
        *curves << header.front() << ",modes,threshold,J\n";
    }

    Sink sink(c.out);
    auto& os = sink.os();
    for (const auto& h : header) os << h << ",";
    os << "modes,j*,C*";
    for (int r = 1; r <= base.arrival.count(); ++r) os << ",C" << r;
    os << ",R\n";

    OptimizeOptions opt;
    if (!subsets.empty()) opt.subsets = parse_subsets(subsets);
    opt.threads = c.thread_count();
    opt.keep_evaluations = curves.has_value();
    for (const auto& pt : points) {
        OptimizationResult res;
        try {
            res = optimize(pt.model, coeff, opt);
        } catch (const CapacityError& e) {
            std::cerr << "skipped " << header.front() << "=" << pt.label.front() << ": " << e.what() << "\n";
            continue;
        }
        for (const auto& l : pt.label) os << l << ",";
        os << join(res.best_policy.modes(), " ") << "," << thresholds_text(res.best_policy.thresholds()) << ","
           << num(res.best_j, 8);
        for (double f : res.fixed_costs) os << "," << num(f, 8);
        os << "," << fixed(res.relative_profit, 2) << "\n";
        if (curves) write_curves(*curves, res, pt.label.front());
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const Common& c, const std::string& policy_text, SimConfig cfg, bool compare) {
    const auto lm = load(c);
    const auto pol = ThresholdPolicy::parse(policy_text, lm.model.capacity);
    const auto sim = simulate(lm.model, pol, cfg);

    std::optional<PerformanceReport> an;
    if (compare) {
        const auto sol = solve(build_generator(lm.model, pol));
        an = compute_measures(sol, lm.model, pol);
        fill_sojourn_means(*an, lm.model, pol, sol);
    }
    struct Row {
        const char* name;
        const Estimate& est;
        std::optional<double> analytic;
    };
    const std::vector<Row> rows{
        {"P_star", sim.p_star, an ? std::optional(an->p_star) : std::nullopt},
        {"P_loss", sim.p_loss, an ? std::optional(an->p_loss) : std::nullopt},
        {"P_obs", sim.p_obs, an ? std::optional(an->p_obs) : std::nullopt},
        {"P_success", sim.p_success, an ? std::optional(an->p_success) : std::nullopt},
        {"N_act", sim.n_act, an ? std::optional(an->n_act) : std::nullopt},
        {"lambda", sim.lambda, an ? std::optional(an->lambda) : std::nullopt},
        {"V1", sim.v1_bar, an ? an->v1_bar : std::nullopt},
        {"V2", sim.v2_bar, an ? an->v2_bar : std::nullopt},
        {"mean_queue", sim.mean_queue, an ? std::optional(an->mean_in_system) : std::nullopt},
    };

    Sink sink(c.out);
    auto& os = sink.os();
    os << "measure,mean,half_width_99" << (compare ? ",analytic,inside" : "") << "\n";
    for (const auto& r : rows) {
        os << r.name << "," << num(r.est.mean) << "," << num(r.est.half_width, 4);
        if (compare) {
            os << "," << opt_num(r.analytic) << ","
               << (r.analytic ? (r.est.contains(*r.analytic) ? "yes" : "no") : "--");
        }
        os << "\n";
    }
    std::cout << "\narrived=" << sim.arrived << " admitted=" << sim.admitted << " lost=" << sim.lost
              << " served=" << sim.served << " obsolesced=" << sim.obsolesced
              << " in_system_at_end=" << sim.in_system_at_end << " time=" << num(sim.sim_time, 8) << "\n";
    for (const auto& r : rows) {
        std::cout << r.name << " = " << num(r.est.mean, 6) << " +/- " << num(r.est.half_width, 2);
        if (r.analytic) std::cout << "  (analytic " << num(*r.analytic, 6) << ")";
        std::cout << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- ingest

int run_ingest(const std::string& path, double cutoff, double epsilon, int max_lag, const std::string& out) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot read " + path});
    const auto stamps = read_timestamps(in);
    const auto gaps = interarrivals(stamps);
    const auto cens = censor(gaps, cutoff);
    const auto batches = batchify(cens.kept, epsilon);
    const auto st = empirical_stats(batches.gaps, batches.sizes, max_lag);

    std::cout << "timestamps=" << stamps.size() << "\n"
              << "censored=" << cens.removed << "\n"
              << "n_batches=" << st.n_batches << "\n"
              << "mean_interarrival=" << num(st.mean_interarrival) << "\n"
              << "var_interarrival=" << num(st.var_interarrival) << "\n"
              << "mean_batch=" << num(st.mean_batch) << "\n";
    for (size_t l = 0; l < st.lag_corr.size(); ++l) std::cout << "lag_" << l + 1 << "=" << num(st.lag_corr[l]) << "\n";
    for (const auto& w : cens.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& w : st.warnings) std::cerr << "warning: " << w << "\n";

    Sink sink(out);
    auto& os = sink.os();
    if (!sink.to_file()) os << "\n";
    os << "kind,index,value\n";
    for (size_t l = 0; l < st.lag_corr.size(); ++l) os << "lag_corr," << l + 1 << "," << num(st.lag_corr[l]) << "\n";
    for (size_t k = 0; k < st.batch_pmf.size(); ++k) os << "batch_pmf," << k + 1 << "," << num(st.batch_pmf[k]) << "\n";

    // Fitting D0/D1 to these statistics is done elsewhere; this is the block to fill in.
    std::cout << "\n# arrival template (fill D0, D1 from a fitted MAP; D_k = d_k * D1):\n"
              << R"({"kind": "direct", "modes": [[ [[-a, b], [c, -d]], [[...], [...]] ]]})" << "\n";
    return 0;
}

int report_error(const std::vector<std::string>& issues, const char* kind) {
    nlohmann::ordered_json j;
    j["status"] = kind;
    j["errors"] = issues;
    std::cout << j.dump(2) << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold-control optimizer for a batch-arrival queue with page obsolescence"};
    app.require_subcommand(1);
    Common common;

    auto* validate = app.add_subcommand("validate", "check a model file and print arrival statistics");
    add_model_options(validate, common);
    std::string canonical;
    validate->add_option("--canonicalize", canonical, "write the repaired model in canonical form");

    std::string policy;
    std::string solver = "auto";
    std::vector<double> lst;
    auto* solve_cmd = app.add_subcommand("solve", "stationary level probabilities for one policy");
    add_model_options(solve_cmd, common);
    solve_cmd->add_option("--policy", policy, "e.g. \"modes=3,1;thresholds=2\"")->required();
    solve_cmd->add_option("--solver", solver)->check(CLI::IsMember({"auto", "general", "qbd"}));
    solve_cmd->add_option("--lst", lst, "transform arguments u1,u2,...")->delimiter(',');
    solve_cmd->add_option("--out", common.out, "CSV destination");

    std::vector<double> costs;
    auto* measures_cmd = app.add_subcommand("measures", "performance measures and cost for one policy");
    add_model_options(measures_cmd, common);
    measures_cmd->add_option("--policy", policy)->required();
    measures_cmd->add_option("--costs", costs, "c_loss,c_obs,a,c_rob,c_star")->delimiter(',');
    measures_cmd->add_option("--out", common.out, "CSV destination");

    std::string subsets;
    std::string curves;
    auto* optimize_cmd = app.add_subcommand("optimize", "search all mode subsets and thresholds");
    add_model_options(optimize_cmd, common);
    optimize_cmd->add_option("--subsets", subsets, "e.g. \"4,1;3,1\" (default: all)");
    optimize_cmd->add_option("--costs", costs, "c_loss,c_obs,a,c_rob,c_star")->delimiter(',');
    optimize_cmd->add_option("--threads", common.threads, "worker threads (default: hardware)");
    optimize_cmd->add_option("--out", common.out, "CSV destination for the subset table");
    optimize_cmd->add_option("--curves", curves, "CSV of J against the threshold for every two-mode policy");

    std::string param, scale_service, scale_obs, service_h2, obs_h2;
    auto* sweep_cmd = app.add_subcommand("sweep", "re-optimise while one model parameter varies");
    add_model_options(sweep_cmd, common);
    sweep_cmd->add_option("--param", param, "K=a..b");
    sweep_cmd->add_option("--scale-service", scale_service, "factors s for S (list)");
    sweep_cmd->add_option("--scale-obsolescence", scale_obs, "factors s for G (list)");
    sweep_cmd->add_option("--service-h2", service_h2, "alpha1 values, mean-preserving H2 service (list)");
    sweep_cmd->add_option("--obsolescence-h2", obs_h2, "alpha1 values, mean-preserving H2 obsolescence (list)");
    sweep_cmd->add_option("--subsets", subsets);
    sweep_cmd->add_option("--costs", costs)->delimiter(',');
    sweep_cmd->add_option("--threads", common.threads);
    sweep_cmd->add_option("--out", common.out);
    sweep_cmd->add_option("--curves", curves, "CSV of J against the threshold per value and two-mode subset");

    SimConfig cfg;
    bool compare = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo run of one policy");
    add_model_options(simulate_cmd, common);
    simulate_cmd->add_option("--policy", policy)->required();
    simulate_cmd->add_option("--arrivals", cfg.n_arrivals, "batch arrivals including warm-up");
    simulate_cmd->add_option("--seed", cfg.seed);
    simulate_cmd->add_option("--warmup", cfg.warmup, "fraction discarded");
    simulate_cmd->add_option("--batches", cfg.batches, "batch-means batches");
    simulate_cmd->add_flag("--compare", compare, "add analytic values to the output");
    simulate_cmd->add_option("--out", common.out);

    std::string timestamps;
    double cutoff = 0.0, epsilon = 0.0;
    int max_lag = 6;
    auto* ingest_cmd = app.add_subcommand("ingest", "statistics of a crawler timestamp trace");
    ingest_cmd->add_option("--timestamps", timestamps, "one timestamp per line")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--cutoff", cutoff, "drop intervals longer than this")->required();
    ingest_cmd->add_option("--epsilon", epsilon, "intervals shorter than this join a batch")->required();
    ingest_cmd->add_option("--max-lag", max_lag);
    ingest_cmd->add_option("--out", common.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (argc == 1) {
            std::cerr << app.help();
        } else {
            app.exit(e);
        }
        return 2;
    }

    try {
        if (*validate) return run_validate(common, canonical);
        if (*solve_cmd) return run_solve(common, policy, solver, lst);
        if (*measures_cmd) return run_measures(common, policy, costs);
        if (*optimize_cmd) return run_optimize(common, subsets, costs, curves);
        if (*sweep_cmd) {
            return run_sweep(common, param, scale_service, scale_obs, service_h2, obs_h2, costs, subsets, curves);
        }
        if (*simulate_cmd) return run_simulate(common, policy, cfg, compare);
        if (*ingest_cmd) return run_ingest(timestamps, cutoff, epsilon, max_lag, common.out);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const crawlq::ValidationError& e) {
        return report_error(e.issues(), "invalid");
    } catch (const crawlq::Error& e) {
        return report_error({e.what()}, "error");
    }
    return 2;
}
