#include "tndkit/estimators.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"
#include "tndkit/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace tndkit {

std::vector<double> debias_weights_outcome(std::span<const double> m_hat,
                                           std::span<const double> mu_hat_v) {
    if (m_hat.size() != mu_hat_v.size()) {
        throw DimensionMismatch("debias_weights_outcome: input lengths differ");
    }
    std::vector<double> w(m_hat.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - m_hat[i]) / (1.0 - mu_hat_v[i]);
    return w;
}

std::vector<double> debias_weights_propensity(std::span<const double> pi_hat,
                                              std::span<const double> pi0_hat) {
    if (pi_hat.size() != pi0_hat.size()) {
        throw DimensionMismatch("debias_weights_propensity: input lengths differ");
    }
    std::vector<double> w(pi_hat.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = pi_hat[i] / pi0_hat[i];
    return w;
}

ArmEstimate ipw_psi_v(const TndDataset& data, std::span<const double> pi0_hat_v, int v) {
    const std::size_t n = data.size();
    if (pi0_hat_v.size() != n) throw DimensionMismatch("ipw_psi_v: nuisance length mismatch");
    ArmEstimate out;
    out.influence.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const TndRecord& r = data.records[i];
        out.influence[i] = (r.y == 1 && r.v == v) ? 1.0 / pi0_hat_v[i] : 0.0;
        acc += out.influence[i];
    }
    out.psi = acc / static_cast<double>(n);
    return out;
}

ArmEstimate outreg_psi_v(const TndDataset& data, const NuisanceEstimates& nuisances, int v) {
    const std::size_t n = data.size();
    const Eigen::VectorXd& mu = nuisances.mu(v);
    ArmEstimate out;
    out.influence.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu_i = mu[static_cast<Eigen::Index>(i)];
        const double m_i = nuisances.m[static_cast<Eigen::Index>(i)];
        out.influence[i] = mu_i * (1.0 - m_i) / (1.0 - mu_i);
        acc += out.influence[i];
    }
    out.psi = acc / static_cast<double>(n);
    return out;
}

double tnddr_phi(int y, int v_record, double pi0, double mu, int v) {
    const double case_term = (y == 1 && v_record == v) ? 1.0 / pi0 : 0.0;
    if (y != 0) return case_term;
    const double arm_indicator = v_record == v ? 1.0 : 0.0;
    return case_term - mu * (arm_indicator - pi0) / (pi0 * (1.0 - mu));
}

ArmEstimate tnddr_psi_v(const TndDataset& data, const NuisanceEstimates& nuisances, int v) {
    const std::size_t n = data.size();
    const Eigen::VectorXd& pi0 = nuisances.pi0(v);
    const Eigen::VectorXd& mu = nuisances.mu(v);
    ArmEstimate out;
    out.influence.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const TndRecord& r = data.records[i];
        const Eigen::Index k = static_cast<Eigen::Index>(i);
        out.influence[i] = tnddr_phi(r.y, r.v, pi0[k], mu[k], v);
        acc += out.influence[i];
    }
    out.psi = acc / static_cast<double>(n);
    return out;
}

LogScaleCi ci_log_mrr(double psi_v1, double psi_v0, std::span<const double> influence_v1,
                      std::span<const double> influence_v0, double alpha) {
    if (!(psi_v1 > 0.0) || !(psi_v0 > 0.0)) {
        throw NonPositiveEstimate("ci_log_mrr: arm estimates must be positive");
    }
    if (influence_v1.size() != influence_v0.size() || influence_v1.empty()) {
        throw DimensionMismatch("ci_log_mrr: influence vectors must be non-empty, equal length");
    }
    const std::size_t n = influence_v1.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = (influence_v1[i] - psi_v1) / psi_v1 - (influence_v0[i] - psi_v0) / psi_v0;
    }
    LogScaleCi out;
    out.se_log = sample_sd(d) / std::sqrt(static_cast<double>(n));
    if (!std::isfinite(out.se_log)) out.se_log = 0.0; // single observation
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double log_mrr = std::log(psi_v1 / psi_v0);
    out.ci = ConfInterval{std::exp(log_mrr - z * out.se_log), std::exp(log_mrr + z * out.se_log)};
    return out;
}

namespace {

EstimatorOutput assemble(const TndDataset& data, ArmEstimate arm1, ArmEstimate arm0,
                         double alpha, std::string method, bool with_ci) {
    (void)data;
    if (!(arm0.psi > 0.0)) {
        throw DegenerateDenominator(method + ": psi under v=0 is not positive");
    }
    EstimatorOutput out;
    out.psi_v1 = arm1.psi;
    out.psi_v0 = arm0.psi;
    out.psi_mrr = arm1.psi / arm0.psi;
    out.ve = 1.0 - out.psi_mrr;
    out.method = std::move(method);
    out.alpha = alpha;
    if (with_ci) {
        LogScaleCi ci = ci_log_mrr(arm1.psi, arm0.psi, arm1.influence, arm0.influence, alpha);
        out.se_log_mrr = ci.se_log;
        out.ci_mrr = ci.ci;
    }
    out.influence_v1 = std::move(arm1.influence);
    out.influence_v0 = std::move(arm0.influence);
    return out;
}

} // namespace

EstimatorOutput tnddr_estimate(const TndDataset& data, const NuisanceEstimates& nuisances,
                               double alpha) {
    return assemble(data, tnddr_psi_v(data, nuisances, 1), tnddr_psi_v(data, nuisances, 0),
                    alpha, "tnddr", true);
}

EstimatorOutput ipw_mrr(const TndDataset& data, const NuisanceEstimates& nuisances, double alpha) {
    std::span<const double> pi0_1(nuisances.pi0_v1.data(), static_cast<std::size_t>(nuisances.pi0_v1.size()));
    std::span<const double> pi0_0(nuisances.pi0_v0.data(), static_cast<std::size_t>(nuisances.pi0_v0.size()));
    return assemble(data, ipw_psi_v(data, pi0_1, 1), ipw_psi_v(data, pi0_0, 0), alpha, "ipw",
                    true);
}

EstimatorOutput outreg_mrr(const TndDataset& data, const NuisanceEstimates& nuisances,
                           double alpha) {
    return assemble(data, outreg_psi_v(data, nuisances, 1), outreg_psi_v(data, nuisances, 0),
                    alpha, "outreg", false);
}

ConfInterval outreg_bootstrap_ci(const TndDataset& data, const NuisanceSpec& spec, int j_folds,
                                 double alpha, int n_resamples, std::uint64_t seed, int threads) {
    const std::size_t n = data.size();
    std::vector<double> estimates(static_cast<std::size_t>(n_resamples),
                                  std::numeric_limits<double>::quiet_NaN());
    threads = std::max(1, threads);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int b = next.fetch_add(1);
            if (b >= n_resamples) return;
            Rng rng(seed, 0x626f6f74ULL, static_cast<std::uint64_t>(b)); // "boot"
            TndDataset resample;
            resample.feature_names = data.feature_names;
            resample.records.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                resample.records.push_back(data.records[rng.below(n)]);
            }
            try {
                const FoldAssignment folds =
                    j_folds > 1 ? split_folds(n, j_folds, derive_seed(seed, 0x666f6cULL,
                                                                      static_cast<std::uint64_t>(b)))
                                : FoldAssignment::single(n);
                const NuisanceEstimates nuis = estimate_nuisances(
                    resample, spec, folds, derive_seed(seed, 0x6e75ULL, static_cast<std::uint64_t>(b)));
                estimates[static_cast<std::size_t>(b)] = outreg_mrr(resample, nuis, alpha).psi_mrr;
            } catch (const Error&) {
                // left as NaN; dropped below
            }
        }
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<double> ok;
    ok.reserve(estimates.size());
    for (double e : estimates) {
        if (std::isfinite(e)) ok.push_back(e);
    }
    if (ok.size() < 2) throw DegenerateDenominator("outreg_bootstrap_ci: too few usable resamples");
    std::sort(ok.begin(), ok.end());
    auto quantile = [&](double q) {
        const double pos = q * (static_cast<double>(ok.size()) - 1.0);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, ok.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return ok[lo] * (1.0 - frac) + ok[hi] * frac;
    };
    return ConfInterval{quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
}

double phi_second_moment(std::span<const double> influence) {
    double acc = 0.0;
    for (double x : influence) acc += x * x;
    return influence.empty() ? 0.0 : acc / static_cast<double>(influence.size());
}

} // namespace tndkit
