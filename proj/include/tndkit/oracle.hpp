#pragma once

#include "tndkit/discrete.hpp"

#include <string>
#include <vector>

namespace tndkit {

struct OracleCheck {
    std::string name;
    bool pass = false;
    double value = 0.0; // measured quantity (max deviation, fitted slope, ...)
    std::string detail;
};

// Enumeration-backed identity checks on a DiscreteDgp:
//   weight_forms_equal      both debiasing-weight forms agree atomwise
//   eif_mean_zero           E_TND[phi_v(truth)] recovers psi_v, both arms
//   identification          TND-side psi_mRR equals population-side psi_mRR
//   dr_exact_pi0 / dr_exact_mu
//                           exact double robustness, each single-perturbation
//                           direction
//   remainder_slope         joint-perturbation bias is second order
//   outreg_slope            outcome-regression plug-in bias is first order
// inject_swap_pi0 deliberately swaps the propensity arms to demonstrate a
// detectable failure.
std::vector<OracleCheck> run_oracle_checks(const DiscreteDgp& dgp, bool inject_swap_pi0 = false);

// Max |omega_v - 1| over atoms and arms (zero when V is independent of
// everything downstream).
double max_weight_deviation_from_one(const ExactTables& tables);

} // namespace tndkit
