#include "tndkit/oracle.hpp"

#include "tndkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tndkit {

namespace {

std::vector<double> column(const std::vector<std::array<double, 2>>& table, int v) {
    std::vector<double> out(table.size());
    for (std::size_t a = 0; a < table.size(); ++a) out[a] = table[a][static_cast<std::size_t>(v)];
    return out;
}

// Fixed atomwise perturbation directions; values keep the perturbed
// nuisances inside (0,1) for every eps used below.
double delta_pi0(std::size_t a) { return a % 2 == 0 ? 0.45 : -0.35; }
double delta_mu(std::size_t a) { return a % 3 == 0 ? -0.30 : 0.40; }

} // namespace

double max_weight_deviation_from_one(const ExactTables& t) {
    double dev = 0.0;
    for (std::size_t a = 0; a < t.n_atoms(); ++a) {
        for (int v = 0; v <= 1; ++v) {
            dev = std::max(dev, std::fabs(t.omega_outcome[a][static_cast<std::size_t>(v)] - 1.0));
        }
    }
    return dev;
}

std::vector<OracleCheck> run_oracle_checks(const DiscreteDgp& dgp, bool inject_swap_pi0) {
    const ExactTables t = enumerate_discrete(dgp);
    const std::size_t na = t.n_atoms();
    std::vector<OracleCheck> checks;

    {
        double dev = 0.0;
        for (std::size_t a = 0; a < na; ++a) {
            for (int v = 0; v <= 1; ++v) {
                dev = std::max(dev, std::fabs(t.omega_outcome[a][static_cast<std::size_t>(v)] -
                                              t.omega_propensity[a][static_cast<std::size_t>(v)]));
            }
        }
        checks.push_back({"weight_forms_equal", dev <= 1e-12, dev,
                          "max atomwise |omega_outcome - omega_propensity|"});
    }

    for (int v = 0; v <= 1; ++v) {
        // Swapping only pi0 would be masked by double robustness (mu stays
        // exact); the injected fault therefore swaps the arm in both
        // nuisances, as an arm-indexing bug would.
        const int arm = inject_swap_pi0 ? 1 - v : v;
        const std::vector<double> pi0_true = column(t.pi0, arm);
        const std::vector<double> mu_true = column(t.mu, arm);
        const double dev = std::fabs(tnd_mean_phi(t, pi0_true, mu_true, v) -
                                     t.psi_tnd[static_cast<std::size_t>(v)]);
        checks.push_back({"eif_mean_zero_v" + std::to_string(v), dev <= 1e-10, dev,
                          "|E_TND[phi_v(truth)] - psi_v|"});
    }

    {
        const double dev = std::fabs(t.psi_mrr_tnd - t.psi_mrr_pop);
        checks.push_back({"identification", dev <= 1e-12, dev,
                          "|psi_mRR (TND side) - psi_mRR (population side)|"});
    }

    for (int v = 0; v <= 1; ++v) {
        const std::vector<double> pi0_true = column(t.pi0, v);
        const std::vector<double> mu_true = column(t.mu, v);
        std::vector<double> pi0_bar(na), mu_bar(na);
        for (std::size_t a = 0; a < na; ++a) {
            pi0_bar[a] = std::clamp(pi0_true[a] + 0.3 * delta_pi0(a), 0.01, 0.99);
            mu_bar[a] = std::clamp(mu_true[a] + 0.3 * delta_mu(a), 0.01, 0.99);
        }
        const double dev_pi_exact =
            std::fabs(tnd_mean_phi(t, pi0_true, mu_bar, v) - t.psi_tnd[static_cast<std::size_t>(v)]);
        checks.push_back({"dr_exact_pi0_v" + std::to_string(v), dev_pi_exact <= 1e-10, dev_pi_exact,
                          "|E_TND[phi_v(pi0 exact, mu perturbed)] - psi_v|"});
        const double dev_mu_exact =
            std::fabs(tnd_mean_phi(t, pi0_bar, mu_true, v) - t.psi_tnd[static_cast<std::size_t>(v)]);
        checks.push_back({"dr_exact_mu_v" + std::to_string(v), dev_mu_exact <= 1e-10, dev_mu_exact,
                          "|E_TND[phi_v(pi0 perturbed, mu exact)] - psi_v|"});
    }

    {
        const int v = 1;
        const std::vector<double> pi0_true = column(t.pi0, v);
        const std::vector<double> mu_true = column(t.mu, v);
        const std::vector<double> m_true = t.m;
        std::vector<double> eps_grid, phi_bias, outreg_bias;
        for (double log_eps : {-1.0, -1.5, -2.0, -2.5}) {
            const double eps = std::pow(10.0, log_eps);
            std::vector<double> pi0_bar(na), mu_bar(na);
            for (std::size_t a = 0; a < na; ++a) {
                pi0_bar[a] = pi0_true[a] + eps * delta_pi0(a);
                mu_bar[a] = mu_true[a] + eps * delta_mu(a);
            }
            eps_grid.push_back(eps);
            phi_bias.push_back(std::fabs(tnd_mean_phi(t, pi0_bar, mu_bar, v) -
                                         t.psi_tnd[static_cast<std::size_t>(v)]));
            outreg_bias.push_back(std::fabs(tnd_mean_outreg(t, mu_bar, m_true, v) -
                                            t.psi_tnd[static_cast<std::size_t>(v)]));
        }
        const auto slope2 = loglog_slope(eps_grid, phi_bias);
        checks.push_back({"remainder_slope", slope2 && std::fabs(*slope2 - 2.0) <= 0.1,
                          slope2.value_or(std::numeric_limits<double>::quiet_NaN()),
                          "log-log slope of joint-perturbation bias vs eps"});
        const auto slope1 = loglog_slope(eps_grid, outreg_bias);
        checks.push_back({"outreg_slope", slope1 && std::fabs(*slope1 - 1.0) <= 0.1,
                          slope1.value_or(std::numeric_limits<double>::quiet_NaN()),
                          "log-log slope of outcome-regression bias vs eps"});
    }

    return checks;
}

} // namespace tndkit
