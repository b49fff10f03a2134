#pragma once

#include <Eigen/Dense>

namespace tndkit {

struct GlmOptions {
    double ridge = 1e-8; // keeps separable fits finite
    double tol = 1e-8;   // convergence on the max |score| of the penalized log-likelihood
    int max_iter = 100;
};

// Damped Newton maximizer of the ridge-penalized Bernoulli log-likelihood.
// `features` must already contain the intercept column if one is wanted.
// Throws NoConvergence (carrying the last iterate) or SingularHessian.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                             const GlmOptions& opts = {});

// expit(features * beta)
Eigen::VectorXd predict_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& beta);

// Mean Bernoulli log-loss plus (ridge/2n)|beta|^2; gradient of the same.
double logistic_penalized_loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                               const Eigen::VectorXd& beta, double ridge);
Eigen::VectorXd logistic_penalized_gradient(const Eigen::MatrixXd& features,
                                            const Eigen::VectorXd& labels,
                                            const Eigen::VectorXd& beta, double ridge);

// Prepend a column of ones.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features);

} // namespace tndkit
