#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace tndkit {

// Deterministic map from raw covariates to a model feature matrix
// (no intercept column; learners prepend their own).
//
// Built-ins, applied columnwise to each raw covariate x:
//   ps_correct  -> [x, |x|, sin(pi x)]   (propensity model terms of the
//                                         simulation's vaccination equation)
//   ps_wrong    -> [x]                   (drops the nonlinear terms)
//   out_correct -> [x, exp(x)]           (outcome model terms, fit per arm)
//   out_wrong   -> [x]
//   identity    -> [x]                   (for already-encoded covariates)
struct FeatureMap {
    std::string name;
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> transform;

    Eigen::MatrixXd operator()(const Eigen::MatrixXd& raw) const { return transform(raw); }
};

// Throws ConfigError for an unknown name.
FeatureMap feature_map(const std::string& name);

} // namespace tndkit
