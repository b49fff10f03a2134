#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tndkit {

struct L1Options {
    int n_knots = 20;            // indicator-basis knots per raw feature (empirical quantiles)
    int cv_folds = 5;
    int n_lambda = 30;           // log-spaced path from lambda_max down
    double lambda_min_ratio = 1e-3;
    double tol = 1e-6;           // max coordinate change per sweep
    int max_sweeps = 1000;
};

// Sparse logistic model on the zero-order indicator basis {I(x_j >= knot)}
// plus the raw features.
struct L1Model {
    std::vector<std::vector<double>> knots; // per raw feature, ascending
    Eigen::VectorXd beta;                   // [intercept, indicators..., raw features...]
    double lambda = 0.0;
    bool degenerate_labels = false;
    double constant_p = 0.0; // fitted value when degenerate
    int in_dim = 0;

    Eigen::MatrixXd basis(const Eigen::MatrixXd& raw) const; // with intercept column
    Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const;
    int n_nonzero() const; // excluding the intercept
};

// L1-penalized logistic regression on the expanded basis, lambda chosen by
// cv_folds-fold cross-validated log-loss. Deterministic given seed.
L1Model fit_l1_basis(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& labels,
                     const L1Options& opts, std::uint64_t seed);

// One coordinate-majorization-descent solve at fixed lambda; x must carry the
// intercept in column 0 (unpenalized). When sweep_losses is non-null the
// penalized objective is recorded after every sweep.
Eigen::VectorXd cd_logistic_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  double lambda, Eigen::VectorXd warm_start,
                                  const L1Options& opts,
                                  std::vector<double>* sweep_losses = nullptr);

// Mean logistic loss plus lambda * l1 norm of the penalized coordinates.
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda);

} // namespace tndkit
