#include "tndkit/lasso.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"
#include "tndkit/types.hpp"

#include <algorithm>
#include <cmath>

namespace tndkit {

namespace {

double soft_threshold(double z, double g) {
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

std::vector<double> quantile_knots(const Eigen::VectorXd& col, int n_knots) {
    std::vector<double> sorted(col.data(), col.data() + col.size());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> knots;
    knots.reserve(static_cast<std::size_t>(n_knots));
    const double n = static_cast<double>(sorted.size());
    for (int k = 1; k <= n_knots; ++k) {
        const double q = static_cast<double>(k) / (n_knots + 1.0);
        auto idx = static_cast<std::size_t>(q * (n - 1));
        const double knot = sorted[idx];
        if (knots.empty() || knot > knots.back()) knots.push_back(knot);
    }
    return knots;
}

double mean_logloss(const Eigen::VectorXd& p, const Eigen::VectorXd& y) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
        acc += y[i] == 1.0 ? -std::log(pi) : -std::log(1.0 - pi);
    }
    return acc / static_cast<double>(p.size());
}

} // namespace

Eigen::MatrixXd L1Model::basis(const Eigen::MatrixXd& raw) const {
    Eigen::Index n_basis = 1; // intercept
    for (const auto& ks : knots) n_basis += static_cast<Eigen::Index>(ks.size());
    n_basis += raw.cols();
    Eigen::MatrixXd x(raw.rows(), n_basis);
    x.col(0).setOnes();
    Eigen::Index col = 1;
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        for (double k : knots[static_cast<std::size_t>(j)]) {
            x.col(col++) = (raw.col(j).array() >= k).cast<double>();
        }
    }
    for (Eigen::Index j = 0; j < raw.cols(); ++j) x.col(col++) = raw.col(j);
    return x;
}

Eigen::VectorXd L1Model::predict(const Eigen::MatrixXd& raw) const {
    if (degenerate_labels) return Eigen::VectorXd::Constant(raw.rows(), constant_p);
    Eigen::VectorXd eta = basis(raw) * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = expit(eta[i]);
    return eta;
}

int L1Model::n_nonzero() const {
    int nz = 0;
    for (Eigen::Index j = 1; j < beta.size(); ++j)
        if (beta[j] != 0.0) ++nz;
    return nz;
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda) {
    const Eigen::VectorXd eta = x * beta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        loss += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y[i] * e;
    }
    loss /= static_cast<double>(x.rows());
    return loss + lambda * beta.tail(beta.size() - 1).lpNorm<1>();
}

Eigen::VectorXd cd_logistic_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  double lambda, Eigen::VectorXd beta, const L1Options& opts,
                                  std::vector<double>* sweep_losses) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const double dn = static_cast<double>(n);
    // Fixed per-coordinate curvature bound: (1/4n) sum x_ij^2. Updates that
    // minimize the resulting quadratic majorizer can never increase the
    // penalized objective.
    Eigen::VectorXd curv(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        curv[j] = x.col(j).squaredNorm() / (4.0 * dn);
        if (curv[j] <= 0.0) curv[j] = 1.0; // all-zero column: coefficient stays put
    }
    Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd resid(n), u(n), wu(n), w(n), cj_local(p);
    // Outer sweeps re-anchor a weighted quadratic model at the current point;
    // inner coordinate descent solves it (no expits inside). A fast anchor
    // uses the exact IRLS curvature; if its step ever increases the penalized
    // objective it is rolled back and replaced by one pass under the global
    // X'X/4n bound, which is a true majorizer. The recorded objective is
    // therefore non-increasing across sweeps.
    double loss = lasso_objective(x, y, beta, lambda);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double prob = expit(eta[i]);
            resid[i] = prob - y[i];
            w[i] = std::max(prob * (1.0 - prob), 1e-3);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            const double* xj = x.col(j).data();
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) acc += xj[i] * xj[i] * w[i];
            cj_local[j] = acc > 0.0 ? acc / dn : curv[j];
        }
        const Eigen::VectorXd beta_in = beta;
        const Eigen::VectorXd eta_in = eta;

        // Inner CD on the anchored quadratic; u = X(beta - beta_in).
        u.setZero();
        wu.setZero();
        double outer_delta = 0.0;
        bool full_pass = true;
        for (int inner = 0; inner < 200; ++inner) {
            double max_delta = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!full_pass && j != 0 && beta[j] == 0.0) continue;
                const double* xj = x.col(j).data();
                double g = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) g += xj[i] * (resid[i] + wu[i]);
                const double z = beta[j] - g / (dn * cj_local[j]);
                const double next = j == 0 ? z : soft_threshold(z, lambda / cj_local[j]);
                const double delta = next - beta[j];
                if (delta != 0.0) {
                    beta[j] = next;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        u[i] += delta * xj[i];
                        wu[i] += delta * xj[i] * w[i];
                    }
                    max_delta = std::max(max_delta, std::fabs(delta));
                }
            }
            if (max_delta < opts.tol) {
                if (full_pass) break;
                full_pass = true;
            } else {
                full_pass = false;
            }
            outer_delta = std::max(outer_delta, max_delta);
        }
        eta += u;

        double new_loss = lasso_objective(x, y, beta, lambda);
        if (new_loss > loss + 1e-14 * (1.0 + std::fabs(loss))) {
            // Roll back and take one guaranteed-descent pass instead.
            beta = beta_in;
            eta = eta_in;
            u.setZero();
            outer_delta = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                const double* xj = x.col(j).data();
                double g = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) g += xj[i] * (resid[i] + 0.25 * u[i]);
                const double z = beta[j] - g / (dn * curv[j]);
                const double next = j == 0 ? z : soft_threshold(z, lambda / curv[j]);
                const double delta = next - beta[j];
                if (delta != 0.0) {
                    beta[j] = next;
                    u += delta * x.col(j);
                    outer_delta = std::max(outer_delta, std::fabs(delta));
                }
            }
            eta += u;
            new_loss = lasso_objective(x, y, beta, lambda);
        } else {
            outer_delta = (beta - beta_in).lpNorm<Eigen::Infinity>();
        }
        loss = new_loss;
        if (sweep_losses) sweep_losses->push_back(loss);
        if (outer_delta < opts.tol) return beta;
    }
    // Majorized descent cannot diverge; a slow tail is usable as-is.
    return beta;
}

L1Model fit_l1_basis(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& labels,
                     const L1Options& opts, std::uint64_t seed) {
    const Eigen::Index n = covariates.rows();
    if (n != labels.size() || n < 2 * opts.cv_folds) {
        throw DimensionMismatch("fit_l1_basis: need matching labels and at least 2*cv_folds rows");
    }

    L1Model model;
    model.in_dim = static_cast<int>(covariates.cols());

    const double ybar = labels.mean();
    if (ybar == 0.0 || ybar == 1.0) {
        model.degenerate_labels = true;
        model.constant_p = ybar;
        model.beta = Eigen::VectorXd::Zero(1);
        return model;
    }

    model.knots.reserve(static_cast<std::size_t>(covariates.cols()));
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
        model.knots.push_back(quantile_knots(covariates.col(j), opts.n_knots));
    }
    const Eigen::MatrixXd x = model.basis(covariates);
    const Eigen::Index p = x.cols();

    // lambda_max: smallest lambda at which the intercept-only fit is optimal.
    Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(p);
    beta0[0] = std::log(ybar / (1.0 - ybar));
    double lambda_max = 0.0;
    {
        const Eigen::VectorXd resid = Eigen::VectorXd::Constant(n, ybar) - labels;
        for (Eigen::Index j = 1; j < p; ++j) {
            lambda_max = std::max(lambda_max, std::fabs(x.col(j).dot(resid)) /
                                                  static_cast<double>(n));
        }
    }
    if (lambda_max <= 0.0) lambda_max = 1e-3;

    std::vector<double> lambdas(static_cast<std::size_t>(opts.n_lambda));
    const double log_max = std::log(lambda_max);
    const double log_min = std::log(lambda_max * opts.lambda_min_ratio);
    for (int k = 0; k < opts.n_lambda; ++k) {
        const double tfrac = opts.n_lambda == 1 ? 0.0 : static_cast<double>(k) / (opts.n_lambda - 1);
        lambdas[static_cast<std::size_t>(k)] = std::exp(log_max + tfrac * (log_min - log_max));
    }

    // Cross-validated log-loss over the path.
    const FoldAssignment folds = split_folds(static_cast<std::size_t>(n), opts.cv_folds, seed);
    std::vector<double> cv_loss(lambdas.size(), 0.0);
    for (int f = 0; f < opts.cv_folds; ++f) {
        std::vector<Eigen::Index> train, valid;
        for (Eigen::Index i = 0; i < n; ++i) {
            (folds.fold_of[static_cast<std::size_t>(i)] == f ? valid : train).push_back(i);
        }
        Eigen::MatrixXd xt(train.size(), p), xv(valid.size(), p);
        Eigen::VectorXd yt(train.size()), yv(valid.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            xt.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
            yt[static_cast<Eigen::Index>(i)] = labels[train[i]];
        }
        for (std::size_t i = 0; i < valid.size(); ++i) {
            xv.row(static_cast<Eigen::Index>(i)) = x.row(valid[i]);
            yv[static_cast<Eigen::Index>(i)] = labels[valid[i]];
        }
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
        const double ytbar = yt.mean();
        warm[0] = ytbar <= 0.0 || ytbar >= 1.0 ? 0.0 : std::log(ytbar / (1.0 - ytbar));
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
            warm = cd_logistic_lasso(xt, yt, lambdas[k], warm, opts);
            Eigen::VectorXd pe = xv * warm;
            for (Eigen::Index i = 0; i < pe.size(); ++i) pe[i] = expit(pe[i]);
            cv_loss[k] += mean_logloss(pe, yv) * static_cast<double>(valid.size());
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < cv_loss.size(); ++k) {
        if (cv_loss[k] < cv_loss[best]) best = k;
    }

    // Refit on all data down the path to the selected lambda.
    Eigen::VectorXd warm = beta0;
    for (std::size_t k = 0; k <= best; ++k) {
        warm = cd_logistic_lasso(x, labels, lambdas[k], warm, opts);
    }
    model.beta = warm;
    model.lambda = lambdas[best];
    return model;
}

} // namespace tndkit
