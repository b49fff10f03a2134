#pragma once

#include "tndkit/types.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace tndkit {

// Structural-equation coefficients for the simulated TND study. Defaults are
// the base simulation; named presets tweak individual coefficients.
//
// Variables: confounder C ~ U(c_min, c_max); unmeasured U1, U2 ~ Bern(0.5);
// vaccination V; other-infection I1; target-infection I2; symptoms W
// (separate models per infection, gated on the infection being present);
// hospitalization H (gated on W). The categorical infection status codes the
// other infection first: I = 1 if I1=1, else 2 if I2=1, else 0, so a
// co-infected subject is classified by the non-target infection. Sampling
// S = I(I != 0, W=1, H=1); case indicator Y = I(I = 2, W=1, H=1).
struct DgpConfig {
    double beta_em = 0.0; // effect-modification coefficient on V*C in the infection model

    double c_min = -3.0, c_max = 3.0;

    // logit P(V=1) = v_intercept + v_c*C + v_abs_c*|C| + v_sin_pi_c*sin(pi*C)
    double v_intercept = 0.5, v_c = 0.3, v_abs_c = -1.0, v_sin_pi_c = -1.0;

    // logit P(I1=1) = i1_intercept + i1_c*C + i1_u1*U1
    double i1_intercept = -5.0, i1_c = 0.5, i1_u1 = 0.5;

    // logit P(I2=1) = covid_intercept + covid_v*V + covid_c*C
    //              + covid_exp_c*exp(C) + beta_em*V*C
    //              + covid_u2*U2 + covid_u2_v*U2*V + covid_u1*U1
    double covid_intercept = -4.0;
    double covid_v = -std::log(1.5);
    double covid_c = 2.0;
    double covid_exp_c = -0.15;
    double covid_u2 = std::log(3.0);
    double covid_u2_v = -0.5 * std::log(3.0);
    double covid_u1 = -2.0;

    // symptoms from the other infection, given I1=1:
    // logit = w_other_intercept + w_other_c*C + w_other_u1*U1
    double w_other_intercept = 2.0, w_other_c = 0.5, w_other_u1 = -0.5;

    // symptoms from the target infection, given I2=1:
    // logit = w_covid_intercept + w_covid_c*C + w_covid_v*V
    //       + w_covid_u1*U1 + w_covid_u2*U2 + w_covid_u2_v*U2*V
    double w_covid_intercept = -5.0;
    double w_covid_c = 1.0;
    double w_covid_v = -std::log(3.5);
    double w_covid_u1 = -1.0;
    double w_covid_u2 = 0.5;
    double w_covid_u2_v = -0.5;

    // hospitalization given W=1:
    // logit = h_intercept + h_c*C + h_v*V + h_u1*U1
    double h_intercept = 1.0, h_c = 0.5, h_v = 0.0, h_u1 = -0.5;

    std::uint64_t seed = 0;

    double lambda_v(double c) const {
        return v_intercept + v_c * c + v_abs_c * std::fabs(c) +
               v_sin_pi_c * std::sin(M_PI * c);
    }
    double lambda_i1(double c, int u1) const { return i1_intercept + i1_c * c + i1_u1 * u1; }
    double lambda_covid(double c, int v, int u1, int u2) const {
        return covid_intercept + covid_v * v + covid_c * c + covid_exp_c * std::exp(c) +
               beta_em * v * c + covid_u2 * u2 + covid_u2_v * u2 * v + covid_u1 * u1;
    }
    double lambda_w_other(double c, int u1) const {
        return w_other_intercept + w_other_c * c + w_other_u1 * u1;
    }
    double lambda_w_covid(double c, int v, int u1, int u2) const {
        return w_covid_intercept + w_covid_c * c + w_covid_v * v + w_covid_u1 * u1 +
               w_covid_u2 * u2 + w_covid_u2_v * u2 * v;
    }
    double lambda_h(double c, int v, int u1) const {
        return h_intercept + h_c * c + h_v * v + h_u1 * u1;
    }

    static DgpConfig study1(double beta_em, std::uint64_t seed = 0) {
        DgpConfig cfg;
        cfg.beta_em = beta_em;
        cfg.seed = seed;
        return cfg;
    }
    static DgpConfig study2(std::uint64_t seed = 0) { return study1(0.0, seed); }
    // Lower-prevalence settings used to probe boundedness violations.
    static DgpConfig setting_ii(std::uint64_t seed = 0) {
        DgpConfig cfg = study2(seed);
        cfg.covid_intercept = -5.0;
        cfg.w_other_intercept = -3.5;
        return cfg;
    }
    static DgpConfig setting_iii(std::uint64_t seed = 0) {
        DgpConfig cfg = study2(seed);
        cfg.beta_em = -0.5;
        cfg.covid_exp_c = -0.25;
        cfg.w_other_intercept = -2.25;
        return cfg;
    }
};

struct FullPopulationRow {
    double c = 0.0;
    int u1 = 0, u2 = 0;
    int v = 0;
    int i1 = 0, i2 = 0;
    int w = 0, h = 0;
    int s = 0, y = 0;
};

// n_pop i.i.d. draws from the structural model. Row i is a pure function of
// (config, i), so chunked parallel generation matches sequential generation.
std::vector<FullPopulationRow> generate_population(const DgpConfig& config, std::size_t n_pop,
                                                   int threads = 1);

// First target_n rows with s=1, mapped to TndRecord{[c], v, y}.
// Throws InsufficientSample when fewer are available.
TndDataset sample_tnd(const std::vector<FullPopulationRow>& population, std::size_t target_n);

// Generate population rows in batches until target_n sampled rows accumulate.
// Throws InsufficientSample if max_pop rows are exhausted first.
TndDataset simulate_tnd_dataset(const DgpConfig& config, std::size_t target_n,
                                std::size_t max_pop = 20'000'000, int threads = 1);

struct TruthResult {
    double psi_mrr = 0.0;
    double mc_se = 0.0;
    double psi_v1 = 0.0;
    double psi_v0 = 0.0;
};

// Monte-Carlo truth for the marginal risk ratio: force V=1 then V=0 in the
// structural equations with common random numbers for (C, U1, U2) and all
// downstream Bernoulli draws, average Y over each arm, take the ratio.
// Throws DegenerateTruth when the denominator mean is zero.
TruthResult truth_mrr_monte_carlo(const DgpConfig& config, std::size_t n_pop, int threads = 1);

} // namespace tndkit
