#pragma once

#include "tndkit/dgp.hpp"
#include "tndkit/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tndkit {

// Finite-support analogue of the simulation model: C on a small atom grid,
// everything else binary, so every population and TND-conditional quantity
// can be enumerated exactly.
//
// Two structural details differ from the continuous simulation so that
// control exchangeability holds exactly (P(Y=0, S=1 | V, C) free of V) and
// the TND-side and population-side risk ratios coincide to machine
// precision: the hospitalization equation carries no vaccination term by
// default, and target-infection symptoms are drawn only for subjects whose
// categorical infection status is the target one.
struct DiscreteDgp {
    std::vector<double> c_values{-1.0, 0.0, 1.0};
    std::vector<double> c_probs{0.3, 0.4, 0.3};
    DgpConfig config;

    DiscreteDgp() { config.h_v = 0.0; }
    explicit DiscreteDgp(DgpConfig cfg) : config(cfg) {}
};

// Everything enumerate_discrete can say about a DiscreteDgp. Arm index is
// v in {0,1}; atom index follows c_values.
struct ExactTables {
    std::vector<double> c_values;
    std::vector<double> p_c;     // population P(C=c)
    std::vector<double> p_tnd_c; // P(C=c | S=1)

    // TND-conditional nuisance truths per atom and arm.
    std::vector<std::array<double, 2>> pi;  // P_TND(V=v | c)
    std::vector<std::array<double, 2>> pi0; // P_TND(V=v | c, Y=0)
    std::vector<std::array<double, 2>> mu;  // P_TND(Y=1 | V=v, c)
    std::vector<double> m;                  // P_TND(Y=1 | c)
    std::vector<std::array<double, 2>> omega_outcome;    // (1-m)/(1-mu_v)
    std::vector<std::array<double, 2>> omega_propensity; // pi_v/pi0_v

    double q0 = 0.0; // P(S=1), exposed read-only; cancels in every estimand

    std::array<double, 2> psi_tnd{}; // sum_c mu_v(c) omega_v(c) P_TND(c)
    std::array<double, 2> psi_pop{}; // E_C[P(Y=1 | V=v, C)]
    double psi_mrr_tnd = 0.0;
    double psi_mrr_pop = 0.0;

    std::size_t n_atoms() const { return c_values.size(); }
};

// Exact enumeration over all (C, U1, U2, V, I1, I2, W, H) atoms.
// Throws ZeroDenominator naming the conditioning event if any required
// conditional is undefined.
ExactTables enumerate_discrete(const DiscreteDgp& dgp);

// E_TND[phi_v] under arbitrary atomwise nuisance values (the plugged-in
// pi0 and mu), with the data distribution held at the enumerated truth.
// This is the oracle behind the double-robustness and second-order
// remainder checks.
double tnd_mean_phi(const ExactTables& t, std::span<const double> pi0_bar,
                    std::span<const double> mu_bar, int v);

// E_TND[mu_bar * (1 - m_bar)/(1 - mu_bar)]: the outcome-regression
// functional under arbitrary atomwise nuisances.
double tnd_mean_outreg(const ExactTables& t, std::span<const double> mu_bar,
                       std::span<const double> m_bar, int v);

// Draw n records from the exact TND-conditional distribution P(c, v, y | S=1).
TndDataset sample_discrete_tnd(const DiscreteDgp& dgp, std::size_t n, std::uint64_t seed);

// Per-record true nuisance values for a dataset drawn from this DiscreteDgp
// (records' first covariate must be one of c_values).
struct AtomNuisances {
    std::vector<double> pi0_v1, pi0_v0, mu_v1, mu_v0, m;
};
AtomNuisances lookup_nuisances(const ExactTables& t, const TndDataset& data);

} // namespace tndkit
