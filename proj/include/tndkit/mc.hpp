#pragma once

#include "tndkit/dgp.hpp"
#include "tndkit/estimators.hpp"
#include "tndkit/nuisance.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tndkit {

// One nuisance-specification scenario of a study: the Study-2 grid letters,
// or the flexible machine-learning mode.
struct Scenario {
    std::string name;       // "a".."d" or "flexible"
    NuisanceSpec spec;

    static Scenario from_name(const std::string& name);
};

struct StudyConfig {
    DgpConfig dgp;
    std::vector<std::size_t> n_list{1000};
    int reps = 1000;
    std::vector<std::string> estimators{"ipw", "outreg", "tnddr"};
    std::vector<std::string> scenarios{"a"};
    int j_folds = 1; // 1 = no cross-fitting
    double alpha = 0.05;
    std::uint64_t seed = 1;
    // "auto" resolves the truth with the Monte-Carlo oracle.
    std::variant<double, std::string> truth = std::string("auto");
    std::size_t truth_n_pop = 10'000'000;
    std::size_t max_pop_per_rep = 20'000'000;
    int threads = 1;
    int outreg_bootstrap = 0; // resamples for the outreg CI; 0 = no CI
};

// One replication's outcome for one estimator.
struct RepRecord {
    std::string estimator;
    std::string scenario;
    std::size_t n = 0;
    int rep = 0;
    double psi_mrr = std::numeric_limits<double>::quiet_NaN();
    std::optional<ConfInterval> ci;
    bool failed = false;
    std::string failure;
};

struct McRow {
    std::string estimator;
    std::string scenario;
    std::size_t n = 0;
    int reps = 0;
    int failures = 0;
    double mean_bias = std::numeric_limits<double>::quiet_NaN();
    double mc_se = std::numeric_limits<double>::quiet_NaN(); // NaN-flagged when reps < 2
    std::optional<double> coverage; // only for CI-emitting estimators
};

struct McSummary {
    double truth = 0.0;
    std::vector<McRow> rows;
    std::vector<RepRecord> rep_records; // in (scenario, n, rep, estimator) order

    const McRow& row(const std::string& estimator, const std::string& scenario,
                     std::size_t n) const;
};

// Resolve config.truth (oracle at truth_n_pop when "auto").
double resolve_truth(const StudyConfig& config);

// Run reps independent simulated TND studies per (scenario, n) cell and
// aggregate bias, Monte-Carlo SE, and CI coverage. Deterministic given
// config.seed, independent of config.threads.
McSummary run_study(const StudyConfig& config);

// Rebuild summary rows from per-rep records (aggregation audit path).
std::vector<McRow> summarize_reps(const std::vector<RepRecord>& records, double truth);

struct ConvergenceRow {
    std::string estimator;
    std::size_t n = 0;
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double mean_bias = std::numeric_limits<double>::quiet_NaN();
    int failures = 0;
};

struct ConvergenceResult {
    double truth = 0.0;
    std::vector<ConvergenceRow> rows;
    // ln RMSE vs ln n least-squares slope per estimator; absent when any
    // RMSE is exactly zero (constant-estimator control).
    std::map<std::string, std::optional<double>> slope;
};

// RMSE-versus-n experiment over config.n_list (needs >= 4 grid points).
ConvergenceResult convergence_experiment(const StudyConfig& config);

// Per-rep seed derivation, exposed for tests of pairwise distinctness.
std::uint64_t rep_seed(std::uint64_t study_seed, int rep, std::size_t n, std::size_t scenario_idx);

} // namespace tndkit
