#include "tndkit/discrete.hpp"
#include "tndkit/errors.hpp"
#include "tndkit/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace tndkit;

TEST_CASE("enumerate_discrete: atom probabilities and basic structure") {
    const DiscreteDgp dgp;
    const ExactTables t = enumerate_discrete(dgp);
    REQUIRE(t.n_atoms() == 3);
    double p_tnd_sum = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
        p_tnd_sum += t.p_tnd_c[a];
        for (int v = 0; v <= 1; ++v) {
            CHECK(t.pi0[a][v] > 0.0);
            CHECK(t.pi0[a][v] < 1.0);
            CHECK(t.mu[a][v] > 0.0);
            CHECK(t.mu[a][v] < 1.0);
        }
        CHECK(t.pi[a][0] + t.pi[a][1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.pi0[a][0] + t.pi0[a][1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(std::fabs(p_tnd_sum - 1.0) < 1e-12);
    CHECK(t.q0 > 0.0);
}

TEST_CASE("the two debiasing-weight forms coincide at every atom") {
    const ExactTables t = enumerate_discrete(DiscreteDgp{});
    for (std::size_t a = 0; a < t.n_atoms(); ++a) {
        for (int v = 0; v <= 1; ++v) {
            CHECK(std::fabs(t.omega_outcome[a][v] - t.omega_propensity[a][v]) <= 1e-12);
        }
    }
}

TEST_CASE("V independent of everything makes all weights one") {
    DiscreteDgp dgp;
    dgp.config.covid_v = 0.0;
    dgp.config.covid_u2_v = 0.0;
    dgp.config.beta_em = 0.0;
    dgp.config.w_covid_v = 0.0;
    dgp.config.w_covid_u2_v = 0.0;
    dgp.config.h_v = 0.0;
    const ExactTables t = enumerate_discrete(dgp);
    CHECK(max_weight_deviation_from_one(t) <= 1e-12);
    CHECK(t.psi_mrr_tnd == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("TND-side risk ratio equals the population-side risk ratio") {
    const ExactTables t = enumerate_discrete(DiscreteDgp{});
    CHECK(std::fabs(t.psi_mrr_tnd - t.psi_mrr_pop) <= 1e-12);
    // and q0 relates the per-arm functionals
    for (int v = 0; v <= 1; ++v) {
        CHECK(t.psi_tnd[v] * t.q0 == doctest::Approx(t.psi_pop[v]).epsilon(1e-10));
    }
}

TEST_CASE("the EIF has mean psi_v at the truth, exactly") {
    const ExactTables t = enumerate_discrete(DiscreteDgp{});
    for (int v = 0; v <= 1; ++v) {
        std::vector<double> pi0(t.n_atoms()), mu(t.n_atoms());
        for (std::size_t a = 0; a < t.n_atoms(); ++a) {
            pi0[a] = t.pi0[a][v];
            mu[a] = t.mu[a][v];
        }
        CHECK(std::fabs(tnd_mean_phi(t, pi0, mu, v) - t.psi_tnd[v]) <= 1e-10);
    }
}

TEST_CASE("oracle check battery passes on the default model and catches a fault") {
    for (const OracleCheck& c : run_oracle_checks(DiscreteDgp{})) {
        INFO(c.name, " value=", c.value);
        CHECK(c.pass);
    }
    bool mean_zero_failed = false;
    for (const OracleCheck& c : run_oracle_checks(DiscreteDgp{}, /*inject_swap_pi0=*/true)) {
        if (c.name.rfind("eif_mean_zero", 0) == 0 && !c.pass) mean_zero_failed = true;
    }
    CHECK(mean_zero_failed);
}

TEST_CASE("oracle checks pass on perturbed coefficient variants") {
    DiscreteDgp variant;
    variant.config.beta_em = 0.35;
    variant.config.covid_intercept = -3.4;
    variant.config.w_other_intercept = 1.2;
    for (const OracleCheck& c : run_oracle_checks(variant)) {
        INFO(c.name, " value=", c.value);
        CHECK(c.pass);
    }
}

TEST_CASE("zero-probability conditioning events are reported by name") {
    DiscreteDgp dgp;
    dgp.c_probs = {0.5, 0.5, 0.0};
    CHECK_THROWS_AS(enumerate_discrete(dgp), ZeroDenominator);

    DiscreteDgp bad_sum;
    bad_sum.c_probs = {0.3, 0.3, 0.3};
    CHECK_THROWS_AS(enumerate_discrete(bad_sum), ZeroDenominator);
}

TEST_CASE("sample_discrete_tnd draws from the exact TND distribution") {
    const DiscreteDgp dgp;
    const ExactTables t = enumerate_discrete(dgp);
    const TndDataset d = sample_discrete_tnd(dgp, 20000, 99);
    REQUIRE(d.size() == 20000);
    // empirical case fraction matches the enumerated one within 4 sigma
    double m_bar = 0.0;
    for (std::size_t a = 0; a < t.n_atoms(); ++a) m_bar += t.m[a] * t.p_tnd_c[a];
    std::size_t cases = 0;
    for (const TndRecord& r : d.records) cases += static_cast<std::size_t>(r.y);
    const double emp = static_cast<double>(cases) / 20000.0;
    const double se = std::sqrt(m_bar * (1.0 - m_bar) / 20000.0);
    CHECK(std::fabs(emp - m_bar) < 4.0 * se);

    // lookup of true nuisances succeeds for every record
    const AtomNuisances nu = lookup_nuisances(t, d);
    CHECK(nu.m.size() == d.size());
}
