#include "tndkit/mc.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"
#include "tndkit/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>
#include <tuple>

namespace tndkit {

Scenario Scenario::from_name(const std::string& name) {
    if (name == "flexible") return Scenario{name, NuisanceSpec::flexible()};
    if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'd') {
        return Scenario{name, NuisanceSpec::glm_scenario(name[0])};
    }
    throw ConfigError("unknown scenario: " + name);
}

std::uint64_t rep_seed(std::uint64_t study_seed, int rep, std::size_t n, std::size_t scenario_idx) {
    return derive_seed(study_seed, static_cast<std::uint64_t>(rep),
                       static_cast<std::uint64_t>(n), scenario_idx + 1);
}

namespace {

// In-process truth cache keyed by the DGP coefficient fingerprint.
std::uint64_t dgp_fingerprint(const DgpConfig& c, std::size_t n_pop) {
    const double fields[] = {c.beta_em, c.c_min, c.c_max, c.v_intercept, c.v_c, c.v_abs_c,
                             c.v_sin_pi_c, c.i1_intercept, c.i1_c, c.i1_u1, c.covid_intercept,
                             c.covid_v, c.covid_c, c.covid_exp_c, c.covid_u2, c.covid_u2_v,
                             c.covid_u1, c.w_other_intercept, c.w_other_c, c.w_other_u1,
                             c.w_covid_intercept, c.w_covid_c, c.w_covid_v, c.w_covid_u1,
                             c.w_covid_u2, c.w_covid_u2_v, c.h_intercept, c.h_c, c.h_v, c.h_u1};
    std::uint64_t h = Rng::mix(c.seed, n_pop);
    for (double f : fields) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(f));
        std::memcpy(&bits, &f, sizeof(bits));
        h = Rng::mix(h, bits);
    }
    return h;
}

std::mutex truth_cache_mutex;
std::map<std::uint64_t, double>& truth_cache() {
    static std::map<std::uint64_t, double> cache;
    return cache;
}

struct CellKey {
    std::string estimator, scenario;
    std::size_t n;
    bool operator<(const CellKey& o) const {
        return std::tie(estimator, scenario, n) < std::tie(o.estimator, o.scenario, o.n);
    }
};

} // namespace

double resolve_truth(const StudyConfig& config) {
    if (std::holds_alternative<double>(config.truth)) {
        const double t = std::get<double>(config.truth);
        if (!(std::isfinite(t) && t > 0.0)) {
            throw TruthResolutionFailed("explicit truth must be finite and positive");
        }
        return t;
    }
    if (std::get<std::string>(config.truth) != "auto") {
        throw TruthResolutionFailed("truth must be a number or \"auto\"");
    }
    const std::uint64_t key = dgp_fingerprint(config.dgp, config.truth_n_pop);
    {
        std::lock_guard<std::mutex> lock(truth_cache_mutex);
        auto it = truth_cache().find(key);
        if (it != truth_cache().end()) return it->second;
    }
    const TruthResult t = truth_mrr_monte_carlo(config.dgp, config.truth_n_pop, config.threads);
    std::lock_guard<std::mutex> lock(truth_cache_mutex);
    truth_cache().emplace(key, t.psi_mrr);
    return t.psi_mrr;
}

namespace {

std::vector<RepRecord> run_cells(const StudyConfig& config,
                                 const std::vector<Scenario>& scenarios) {
    struct Task {
        std::size_t scenario_idx;
        std::size_t n;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
        for (std::size_t n : config.n_list)
            for (int r = 0; r < config.reps; ++r) tasks.push_back({s, n, r});

    // One slot per (task, estimator); reduced in task order afterwards so the
    // result is independent of scheduling.
    const std::size_t n_est = config.estimators.size();
    std::vector<RepRecord> records(tasks.size() * n_est);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const Scenario& scen = scenarios[task.scenario_idx];
            const std::uint64_t seed =
                rep_seed(config.seed, task.rep, task.n, task.scenario_idx);
            RepRecord base;
            base.scenario = scen.name;
            base.n = task.n;
            base.rep = task.rep;

            TndDataset data;
            NuisanceEstimates nuis;
            bool data_ok = false;
            std::string failure;
            try {
                DgpConfig dgp = config.dgp;
                dgp.seed = seed;
                data = simulate_tnd_dataset(dgp, task.n, config.max_pop_per_rep, 1);
                validate_dataset(data);
                const FoldAssignment folds =
                    config.j_folds > 1 ? split_folds(task.n, config.j_folds, derive_seed(seed, 0x666f6cULL))
                                       : FoldAssignment::single(task.n);
                nuis = estimate_nuisances(data, scen.spec, folds, derive_seed(seed, 0x6e75ULL));
                data_ok = true;
            } catch (const Error& e) {
                failure = e.what();
            }

            for (std::size_t e = 0; e < n_est; ++e) {
                RepRecord rec = base;
                rec.estimator = config.estimators[e];
                if (!data_ok) {
                    rec.failed = true;
                    rec.failure = failure;
                } else {
                    try {
                        EstimatorOutput out;
                        if (rec.estimator == "tnddr") {
                            out = tnddr_estimate(data, nuis, config.alpha);
                        } else if (rec.estimator == "ipw") {
                            out = ipw_mrr(data, nuis, config.alpha);
                        } else if (rec.estimator == "outreg") {
                            out = outreg_mrr(data, nuis, config.alpha);
                            if (config.outreg_bootstrap > 0) {
                                out.ci_mrr = outreg_bootstrap_ci(
                                    data, scen.spec, config.j_folds, config.alpha,
                                    config.outreg_bootstrap, derive_seed(seed, 0x6f62ULL), 1);
                            }
                        } else {
                            throw ConfigError("unknown estimator: " + rec.estimator);
                        }
                        rec.psi_mrr = out.psi_mrr;
                        rec.ci = out.ci_mrr;
                    } catch (const Error& err) {
                        rec.failed = true;
                        rec.failure = err.what();
                    }
                }
                records[t * n_est + e] = std::move(rec);
            }
        }
    };

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

} // namespace

std::vector<McRow> summarize_reps(const std::vector<RepRecord>& records, double truth) {
    std::map<CellKey, std::vector<const RepRecord*>> cells;
    for (const RepRecord& r : records) {
        cells[CellKey{r.estimator, r.scenario, r.n}].push_back(&r);
    }
    std::vector<McRow> rows;
    for (const auto& [key, recs] : cells) {
        McRow row;
        row.estimator = key.estimator;
        row.scenario = key.scenario;
        row.n = key.n;
        std::vector<double> estimates;
        int covered = 0, with_ci = 0;
        for (const RepRecord* r : recs) {
            if (r->failed) {
                ++row.failures;
                continue;
            }
            estimates.push_back(r->psi_mrr);
            if (r->ci) {
                ++with_ci;
                covered += r->ci->contains(truth) ? 1 : 0;
            }
        }
        row.reps = static_cast<int>(recs.size());
        if (!estimates.empty()) {
            row.mean_bias = mean(estimates) - truth;
            row.mc_se = sample_sd(estimates); // NaN when a single estimate
        }
        if (with_ci > 0) {
            row.coverage = static_cast<double>(covered) / static_cast<double>(with_ci);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const McRow& McSummary::row(const std::string& estimator, const std::string& scenario,
                            std::size_t n) const {
    for (const McRow& r : rows) {
        if (r.estimator == estimator && r.scenario == scenario && r.n == n) return r;
    }
    throw ConfigError("no summary row for " + estimator + "/" + scenario + "/n=" +
                      std::to_string(n));
}

McSummary run_study(const StudyConfig& config) {
    if (config.reps < 1) throw ConfigError("run_study: reps must be >= 1");
    for (const std::string& est : config.estimators) {
        if (est != "ipw" && est != "outreg" && est != "tnddr") {
            throw ConfigError("unknown estimator: " + est);
        }
    }
    std::vector<Scenario> scenarios;
    scenarios.reserve(config.scenarios.size());
    for (const std::string& s : config.scenarios) scenarios.push_back(Scenario::from_name(s));

    McSummary summary;
    summary.truth = resolve_truth(config);
    summary.rep_records = run_cells(config, scenarios);
    summary.rows = summarize_reps(summary.rep_records, summary.truth);
    return summary;
}

ConvergenceResult convergence_experiment(const StudyConfig& config) {
    if (config.n_list.size() < 4) {
        throw ConfigError("convergence_experiment: need at least 4 sample sizes");
    }
    McSummary summary = run_study(config);

    ConvergenceResult result;
    result.truth = summary.truth;
    std::map<std::string, std::vector<std::pair<double, double>>> per_estimator; // (n, rmse)
    for (const std::string& est : config.estimators) {
        for (std::size_t n : config.n_list) {
            ConvergenceRow row;
            row.estimator = est;
            row.n = n;
            std::vector<double> sq_errors, errors;
            for (const RepRecord& r : summary.rep_records) {
                if (r.estimator != est || r.n != n || r.failed) continue;
                const double err = r.psi_mrr - summary.truth;
                sq_errors.push_back(err * err);
                errors.push_back(err);
            }
            for (const RepRecord& r : summary.rep_records) {
                if (r.estimator == est && r.n == n && r.failed) ++row.failures;
            }
            if (!sq_errors.empty()) {
                row.rmse = std::sqrt(mean(sq_errors));
                row.mean_bias = mean(errors);
            }
            per_estimator[est].emplace_back(static_cast<double>(n), row.rmse);
            result.rows.push_back(std::move(row));
        }
    }
    for (auto& [est, pts] : per_estimator) {
        std::vector<double> ns, rmses;
        for (auto& [n, rmse] : pts) {
            ns.push_back(n);
            rmses.push_back(rmse);
        }
        result.slope[est] = loglog_slope(ns, rmses);
    }
    return result;
}

} // namespace tndkit
