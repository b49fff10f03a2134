#include "tndkit/logistic.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"

#include <cmath>
#include <vector>

namespace tndkit {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
    Eigen::MatrixXd out(features.rows(), features.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(features.cols()) = features;
    return out;
}

Eigen::VectorXd predict_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = features * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = expit(eta[i]);
    return eta;
}

namespace {

// Sum-scale penalized log-likelihood (the quantity Newton maximizes).
double loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
              double ridge) {
    const Eigen::VectorXd eta = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // log(1 + e^eta) computed stably
        const double e = eta[i];
        ll += y[i] * e - (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)));
    }
    return ll - 0.5 * ridge * beta.squaredNorm();
}

} // namespace

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const GlmOptions& opts) {
    if (x.rows() != y.size() || x.rows() == 0) {
        throw DimensionMismatch("fit_logistic: feature rows must match label count and be nonzero");
    }
    const Eigen::Index p = x.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double ll = loglik(x, y, beta, opts.ridge);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const Eigen::VectorXd prob = predict_logistic(x, beta);
        const Eigen::VectorXd score = x.transpose() * (y - prob) - opts.ridge * beta;
        if (score.lpNorm<Eigen::Infinity>() < opts.tol) return beta;

        Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
        Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
        hess.diagonal().array() += opts.ridge;

        Eigen::VectorXd step;
        double jitter = 0.0;
        for (;;) {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            if (ldlt.info() == Eigen::Success) {
                step = ldlt.solve(score);
                if (step.allFinite()) break;
            }
            jitter = jitter == 0.0 ? 1e-10 : jitter * 100.0;
            if (jitter > 1.0) throw SingularHessian("fit_logistic: Hessian not factorizable");
            hess.diagonal().array() += jitter;
        }

        // Backtracking on the penalized log-likelihood.
        double t = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            Eigen::VectorXd cand = beta + t * step;
            double cand_ll = loglik(x, y, cand, opts.ridge);
            if (std::isfinite(cand_ll) && cand_ll >= ll - 1e-14 * (1.0 + std::fabs(ll))) {
                beta = std::move(cand);
                ll = cand_ll;
                improved = true;
                break;
            }
        }
        if (!improved) {
            throw SingularHessian("fit_logistic: damping failed to find an ascent step");
        }
    }
    const Eigen::VectorXd prob = predict_logistic(x, beta);
    const double max_score =
        (x.transpose() * (y - prob) - opts.ridge * beta).lpNorm<Eigen::Infinity>();
    if (max_score < opts.tol) return beta;
    throw NoConvergence("fit_logistic: no convergence after " + std::to_string(opts.max_iter) +
                            " iterations (max |score| = " + std::to_string(max_score) + ")",
                        std::vector<double>(beta.data(), beta.data() + beta.size()), max_score,
                        opts.max_iter);
}

double logistic_penalized_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta, double ridge) {
    const double n = static_cast<double>(x.rows());
    return -loglik(x, y, beta, 0.0) / n + 0.5 * (ridge / n) * beta.squaredNorm();
}

Eigen::VectorXd logistic_penalized_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& beta, double ridge) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd prob = predict_logistic(x, beta);
    return (x.transpose() * (prob - y) + ridge * beta) / n;
}

} // namespace tndkit
