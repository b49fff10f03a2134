#pragma once

#include "tndkit/nuisance.hpp"
#include "tndkit/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tndkit {

// Debiasing weights, outcome-probability form: (1 - m_hat) / (1 - mu_hat_v).
std::vector<double> debias_weights_outcome(std::span<const double> m_hat,
                                           std::span<const double> mu_hat_v);

// Debiasing weights, propensity-ratio form: pi_hat_v / pi0_hat_v.
std::vector<double> debias_weights_propensity(std::span<const double> pi_hat,
                                              std::span<const double> pi0_hat);

struct ArmEstimate {
    double psi = 0.0;
    std::vector<double> influence; // per-observation summands; mean == psi
};

// psi_v_hat = n^-1 sum Y_k I(V_k = v) / pi0_hat_v(c_k)
ArmEstimate ipw_psi_v(const TndDataset& data, std::span<const double> pi0_hat_v, int v);

// psi_v_hat = n^-1 sum mu_hat_v(c_k) (1 - m_hat(c_k)) / (1 - mu_hat_v(c_k))
ArmEstimate outreg_psi_v(const TndDataset& data, const NuisanceEstimates& nuisances, int v);

// Uncentered one-step contribution for one record.
double tnddr_phi(int y, int v_record, double pi0, double mu, int v);

// psi_v_hat = sample mean of tnddr_phi over all records.
ArmEstimate tnddr_psi_v(const TndDataset& data, const NuisanceEstimates& nuisances, int v);

struct LogScaleCi {
    double se_log = 0.0;
    ConfInterval ci;
};

// Log-scale CI for the risk ratio from per-observation influence summands:
// d_k = (inf1_k - psi1)/psi1 - (inf0_k - psi0)/psi0, se = sd(d)/sqrt(n),
// CI = exp(log(psi1/psi0) -+ z se). Throws NonPositiveEstimate.
LogScaleCi ci_log_mrr(double psi_v1, double psi_v0, std::span<const double> influence_v1,
                      std::span<const double> influence_v0, double alpha);

// The three full estimation procedures.
EstimatorOutput tnddr_estimate(const TndDataset& data, const NuisanceEstimates& nuisances,
                               double alpha = 0.05);
EstimatorOutput ipw_mrr(const TndDataset& data, const NuisanceEstimates& nuisances,
                        double alpha = 0.05);
EstimatorOutput outreg_mrr(const TndDataset& data, const NuisanceEstimates& nuisances,
                           double alpha = 0.05);

// Nonparametric bootstrap for the outcome-regression estimator: resample
// rows, refit nuisances, recompute the point estimate; percentile interval.
ConfInterval outreg_bootstrap_ci(const TndDataset& data, const NuisanceSpec& spec, int j_folds,
                                 double alpha, int n_resamples, std::uint64_t seed,
                                 int threads = 1);

// Uncentered second moment of the influence summands (diagnostics; the
// centered sample variance is what the confidence intervals use).
double phi_second_moment(std::span<const double> influence);

} // namespace tndkit
