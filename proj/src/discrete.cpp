#include "tndkit/discrete.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tndkit {

namespace {

std::string atom_event(double c, int v) {
    return "C=" + std::to_string(c) + ", V=" + std::to_string(v);
}

} // namespace

ExactTables enumerate_discrete(const DiscreteDgp& dgp) {
    const DgpConfig& cfg = dgp.config;
    const std::size_t na = dgp.c_values.size();
    if (na == 0 || dgp.c_probs.size() != na) {
        throw DimensionMismatch("DiscreteDgp: c_values and c_probs must be non-empty and equal length");
    }
    double psum = 0.0;
    for (double p : dgp.c_probs) psum += p;
    if (std::fabs(psum - 1.0) > 1e-12) {
        throw ZeroDenominator("DiscreteDgp: atom probabilities sum to " + std::to_string(psum));
    }

    ExactTables t;
    t.c_values = dgp.c_values;
    t.p_c = dgp.c_probs;
    t.p_tnd_c.assign(na, 0.0);
    t.pi.assign(na, {0.0, 0.0});
    t.pi0.assign(na, {0.0, 0.0});
    t.mu.assign(na, {0.0, 0.0});
    t.m.assign(na, 0.0);
    t.omega_outcome.assign(na, {0.0, 0.0});
    t.omega_propensity.assign(na, {0.0, 0.0});

    // Joint mass of (C=c, V=v, S=1) and (C=c, V=v, Y=1), plus the
    // population-side interventional risks.
    std::vector<std::array<double, 2>> mass_s(na, {0.0, 0.0});
    std::vector<std::array<double, 2>> mass_y(na, {0.0, 0.0});

    for (std::size_t a = 0; a < na; ++a) {
        const double c = dgp.c_values[a];
        const double pv1 = expit(cfg.lambda_v(c));
        for (int u1 = 0; u1 <= 1; ++u1)
            for (int u2 = 0; u2 <= 1; ++u2) {
                const double pu = 0.25;
                const double p_i1 = expit(cfg.lambda_i1(c, u1));
                const double p_w1 = expit(cfg.lambda_w_other(c, u1));
                for (int v = 0; v <= 1; ++v) {
                    const double p_base = dgp.c_probs[a] * pu * (v == 1 ? pv1 : 1.0 - pv1);
                    const double p_i2 = expit(cfg.lambda_covid(c, v, u1, u2));
                    const double p_w2 = expit(cfg.lambda_w_covid(c, v, u1, u2));
                    const double p_h = expit(cfg.lambda_h(c, v, u1));
                    // icat = 1 branch: I1=1 (any I2); symptoms only from the
                    // other-infection model, never a case.
                    const double p_ctrl = p_i1 * p_w1 * p_h;
                    // icat = 2 branch: I1=0, I2=1; symptoms from the
                    // target-infection model, always a case when sampled.
                    const double p_case = (1.0 - p_i1) * p_i2 * p_w2 * p_h;
                    mass_s[a][v] += p_base * (p_ctrl + p_case);
                    mass_y[a][v] += p_base * p_case;
                }
                // Population-side interventional risks share (C, U1, U2).
                for (int v = 0; v <= 1; ++v) {
                    const double p_i1f = p_i1;
                    const double p_i2f = expit(cfg.lambda_covid(c, v, u1, u2));
                    const double p_w2f = expit(cfg.lambda_w_covid(c, v, u1, u2));
                    const double p_hf = expit(cfg.lambda_h(c, v, u1));
                    t.psi_pop[v] += dgp.c_probs[a] * pu * (1.0 - p_i1f) * p_i2f * p_w2f * p_hf;
                }
            }
    }

    for (std::size_t a = 0; a < na; ++a) t.q0 += mass_s[a][0] + mass_s[a][1];
    if (t.q0 <= 0.0) throw ZeroDenominator("P(S=1) = 0");

    for (std::size_t a = 0; a < na; ++a) {
        const double c = dgp.c_values[a];
        const double ms = mass_s[a][0] + mass_s[a][1];
        if (ms <= 0.0) throw ZeroDenominator("P(S=1, " + std::string("C=") + std::to_string(c) + ") = 0");
        t.p_tnd_c[a] = ms / t.q0;
        const double my = mass_y[a][0] + mass_y[a][1];
        t.m[a] = my / ms;
        const double m_ctrl = ms - my;
        if (m_ctrl <= 0.0) throw ZeroDenominator("P(Y=0, S=1, C=" + std::to_string(c) + ") = 0");
        for (int v = 0; v <= 1; ++v) {
            if (mass_s[a][v] <= 0.0) throw ZeroDenominator("P(S=1, " + atom_event(c, v) + ") = 0");
            t.pi[a][v] = mass_s[a][v] / ms;
            t.mu[a][v] = mass_y[a][v] / mass_s[a][v];
            t.pi0[a][v] = (mass_s[a][v] - mass_y[a][v]) / m_ctrl;
            if (t.pi0[a][v] <= 0.0) {
                throw ZeroDenominator("P(V=" + std::to_string(v) + " | Y=0, S=1, C=" +
                                      std::to_string(c) + ") = 0");
            }
            if (t.mu[a][v] >= 1.0) {
                throw ZeroDenominator("P(Y=0 | " + atom_event(c, v) + ", S=1) = 0");
            }
        }
        for (int v = 0; v <= 1; ++v) {
            t.omega_outcome[a][v] = (1.0 - t.m[a]) / (1.0 - t.mu[a][v]);
            t.omega_propensity[a][v] = t.pi[a][v] / t.pi0[a][v];
            t.psi_tnd[v] += t.mu[a][v] * t.omega_outcome[a][v] * t.p_tnd_c[a];
        }
    }

    if (t.psi_tnd[0] <= 0.0 || t.psi_pop[0] <= 0.0) {
        throw ZeroDenominator("risk under V=0 is 0");
    }
    t.psi_mrr_tnd = t.psi_tnd[1] / t.psi_tnd[0];
    t.psi_mrr_pop = t.psi_pop[1] / t.psi_pop[0];
    return t;
}

double tnd_mean_phi(const ExactTables& t, std::span<const double> pi0_bar,
                    std::span<const double> mu_bar, int v) {
    double acc = 0.0;
    for (std::size_t a = 0; a < t.n_atoms(); ++a) {
        const double p_y1v = t.mu[a][v] * t.pi[a][v];        // P(Y=1, V=v | c)
        const double p_y0v = (1.0 - t.m[a]) * t.pi0[a][v];   // P(Y=0, V=v | c)
        const double p_y0 = 1.0 - t.m[a];                    // P(Y=0 | c)
        const double odds_bar = mu_bar[a] / (1.0 - mu_bar[a]);
        const double term = p_y1v / pi0_bar[a] -
                            odds_bar * (p_y0v - p_y0 * pi0_bar[a]) / pi0_bar[a];
        acc += t.p_tnd_c[a] * term;
    }
    return acc;
}

double tnd_mean_outreg(const ExactTables& t, std::span<const double> mu_bar,
                       std::span<const double> m_bar, int v) {
    (void)v;
    double acc = 0.0;
    for (std::size_t a = 0; a < t.n_atoms(); ++a) {
        const double omega_bar = (1.0 - m_bar[a]) / (1.0 - mu_bar[a]);
        acc += t.p_tnd_c[a] * mu_bar[a] * omega_bar;
    }
    return acc;
}

TndDataset sample_discrete_tnd(const DiscreteDgp& dgp, std::size_t n, std::uint64_t seed) {
    ExactTables t = enumerate_discrete(dgp);
    // Categorical over (atom, v, y) under P_TND.
    struct Cell {
        double p;
        double c;
        int v, y;
    };
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < t.n_atoms(); ++a) {
        for (int v = 0; v <= 1; ++v) {
            const double p_vy1 = t.p_tnd_c[a] * t.pi[a][v] * t.mu[a][v];
            const double p_vy0 = t.p_tnd_c[a] * t.pi[a][v] * (1.0 - t.mu[a][v]);
            cells.push_back({p_vy1, t.c_values[a], v, 1});
            cells.push_back({p_vy0, t.c_values[a], v, 0});
        }
    }
    TndDataset out;
    out.feature_names = {"c"};
    out.records.reserve(n);
    Rng rng(seed, 0x64697363ULL); // "disc"
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        double cum = 0.0;
        const Cell* pick = &cells.back();
        for (const Cell& cell : cells) {
            cum += cell.p;
            if (u < cum) {
                pick = &cell;
                break;
            }
        }
        out.records.push_back(TndRecord{{pick->c}, pick->v, pick->y});
    }
    return out;
}

AtomNuisances lookup_nuisances(const ExactTables& t, const TndDataset& data) {
    AtomNuisances out;
    const std::size_t n = data.size();
    out.pi0_v1.resize(n);
    out.pi0_v0.resize(n);
    out.mu_v1.resize(n);
    out.mu_v0.resize(n);
    out.m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = data.records[i].covariates.at(0);
        std::size_t a = 0;
        bool found = false;
        for (; a < t.n_atoms(); ++a) {
            if (std::fabs(t.c_values[a] - c) < 1e-12) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw DimensionMismatch("record covariate " + std::to_string(c) +
                                    " is not an atom of the discrete support");
        }
        out.pi0_v1[i] = t.pi0[a][1];
        out.pi0_v0[i] = t.pi0[a][0];
        out.mu_v1[i] = t.mu[a][1];
        out.mu_v0[i] = t.mu[a][0];
        out.m[i] = t.m[a];
    }
    return out;
}

} // namespace tndkit
