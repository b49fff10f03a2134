#pragma once

#include "tndkit/features.hpp"
#include "tndkit/lasso.hpp"
#include "tndkit/logistic.hpp"
#include "tndkit/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace tndkit {

struct LearnerSpec {
    enum class Kind { logistic_glm, l1_basis };
    Kind kind = Kind::logistic_glm;
    FeatureMap map = feature_map("identity");
    GlmOptions glm{};
    L1Options l1{};
};

// Propensity learner for pi0 (V regressed on covariates among controls) and
// outcome learner shared by mu_v (per-arm) and m (marginal, no vaccination).
struct NuisanceSpec {
    LearnerSpec propensity;
    LearnerSpec outcome;
    double epsilon = 0.01; // bounding for every emitted probability

    // Study-2 specification grid: scenario in {a, b, c, d}.
    static NuisanceSpec glm_scenario(char scenario);
    // Flexible mode: l1_basis for both learners on raw covariates.
    static NuisanceSpec flexible();
};

struct NuisanceEstimates {
    Eigen::VectorXd pi0_v1, pi0_v0; // propensity among controls, both arms
    Eigen::VectorXd mu_v1, mu_v0;   // arm-specific outcome probabilities
    Eigen::VectorXd m;              // marginal outcome probability
    double epsilon = 0.01;
    std::vector<std::string> notes; // degenerate-label flags per fit

    const Eigen::VectorXd& pi0(int v) const { return v == 1 ? pi0_v1 : pi0_v0; }
    const Eigen::VectorXd& mu(int v) const { return v == 1 ? mu_v1 : mu_v0; }
};

// Cross-fitted nuisance estimation: for each fold j, fit on the complement
// and predict on the fold; with folds.j_folds == 1, fit and predict on the
// full data. Throws DegenerateArm naming the fold and missing stratum.
NuisanceEstimates estimate_nuisances(const TndDataset& data, const NuisanceSpec& spec,
                                     const FoldAssignment& folds, std::uint64_t seed = 0);

// Raw covariate matrix of a dataset (n x dim).
Eigen::MatrixXd covariate_matrix(const TndDataset& data);

} // namespace tndkit
