#include "tndkit/discrete.hpp"
#include "tndkit/errors.hpp"
#include "tndkit/nuisance.hpp"

#include <doctest.h>

#include <cmath>

using namespace tndkit;

namespace {

// Saturated indicator features for the 3-atom discrete support.
FeatureMap atom_indicators() {
    return FeatureMap{"atom_indicators", [](const Eigen::MatrixXd& raw) {
                          Eigen::MatrixXd out(raw.rows(), 2);
                          out.col(0) = (raw.col(0).array() > -0.5 && raw.col(0).array() < 0.5)
                                           .cast<double>();
                          out.col(1) = (raw.col(0).array() >= 0.5).cast<double>();
                          return out;
                      }};
}

} // namespace

TEST_CASE("saturated GLM recovers the enumerated control propensities") {
    const DiscreteDgp dgp;
    const ExactTables t = enumerate_discrete(dgp);
    // the smallest atom carries ~6% of the TND mass, so the 0.02 tolerance
    // needs a larger sample than the headline n of the other tests
    const TndDataset data = sample_discrete_tnd(dgp, 40000, 2024);

    NuisanceSpec spec;
    spec.propensity.map = atom_indicators();
    spec.outcome.map = atom_indicators();
    const NuisanceEstimates est =
        estimate_nuisances(data, spec, FoldAssignment::single(data.size()), 1);

    for (std::size_t i = 0; i < data.size(); ++i) {
        const double c = data.records[i].covariates[0];
        std::size_t a = c < -0.5 ? 0 : (c < 0.5 ? 1 : 2);
        CHECK(std::fabs(est.pi0_v1[static_cast<Eigen::Index>(i)] - t.pi0[a][1]) < 0.02);
        CHECK(std::fabs(est.mu_v1[static_cast<Eigen::Index>(i)] - t.mu[a][1]) < 0.04);
        CHECK(std::fabs(est.m[static_cast<Eigen::Index>(i)] - t.m[a]) < 0.02);
    }
}

TEST_CASE("controls concentrated in one arm raise DegenerateArm") {
    TndDataset d;
    d.feature_names = {"c"};
    for (int i = 0; i < 20; ++i) {
        // all controls vaccinated; cases in both arms
        const int y = i % 2;
        const int v = y == 0 ? 1 : i % 4 == 1 ? 1 : 0;
        d.records.push_back(TndRecord{{static_cast<double>(i % 5)}, v, y});
    }
    NuisanceSpec spec;
    CHECK_THROWS_AS(estimate_nuisances(d, spec, FoldAssignment::single(d.size()), 1),
                    DegenerateArm);
}

TEST_CASE("cross-fitting honesty: poisoning a record does not move its own prediction") {
    const DiscreteDgp dgp;
    TndDataset data = sample_discrete_tnd(dgp, 400, 7);
    const FoldAssignment folds = split_folds(data.size(), 2, 3);
    NuisanceSpec spec;
    spec.propensity.map = atom_indicators();
    spec.outcome.map = atom_indicators();
    const NuisanceEstimates before = estimate_nuisances(data, spec, folds, 5);

    // flip record k's label; its own out-of-fold prediction cannot change
    const std::size_t k = 11;
    data.records[k].y = 1 - data.records[k].y;
    const NuisanceEstimates after = estimate_nuisances(data, spec, folds, 5);
    const Eigen::Index ki = static_cast<Eigen::Index>(k);
    CHECK(before.mu_v1[ki] == after.mu_v1[ki]);
    CHECK(before.mu_v0[ki] == after.mu_v0[ki]);
    CHECK(before.m[ki] == after.m[ki]);
    CHECK(before.pi0_v1[ki] == after.pi0_v1[ki]);

    // some other record's prediction does change (the poisoned row trains it)
    bool any_changed = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (folds.fold_of[i] != folds.fold_of[k] &&
            before.m[static_cast<Eigen::Index>(i)] != after.m[static_cast<Eigen::Index>(i)]) {
            any_changed = true;
            break;
        }
    }
    CHECK(any_changed);
}

TEST_CASE("every emitted probability is clamped to [eps, 1-eps]") {
    const DiscreteDgp dgp;
    const TndDataset data = sample_discrete_tnd(dgp, 600, 12);
    NuisanceSpec spec;
    spec.epsilon = 0.05;
    const NuisanceEstimates est =
        estimate_nuisances(data, spec, split_folds(data.size(), 3, 4), 9);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(data.size()); ++i) {
        for (const Eigen::VectorXd* v :
             {&est.pi0_v1, &est.pi0_v0, &est.mu_v1, &est.mu_v0, &est.m}) {
            CHECK((*v)[i] >= 0.05);
            CHECK((*v)[i] <= 0.95);
        }
    }
}

TEST_CASE("J=2 and J=1 agree on average at moderate size") {
    const DiscreteDgp dgp;
    const TndDataset data = sample_discrete_tnd(dgp, 5000, 31);
    NuisanceSpec spec;
    spec.propensity.map = atom_indicators();
    spec.outcome.map = atom_indicators();
    const NuisanceEstimates split =
        estimate_nuisances(data, spec, split_folds(data.size(), 2, 8), 2);
    const NuisanceEstimates full =
        estimate_nuisances(data, spec, FoldAssignment::single(data.size()), 2);
    double mad = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(data.size()); ++i) {
        mad += std::fabs(split.pi0_v1[i] - full.pi0_v1[i]);
    }
    mad /= static_cast<double>(data.size());
    CHECK(mad < 0.03);
}

TEST_CASE("scenario grid wires the specification pairs") {
    CHECK(NuisanceSpec::glm_scenario('a').propensity.map.name == "ps_correct");
    CHECK(NuisanceSpec::glm_scenario('a').outcome.map.name == "out_correct");
    CHECK(NuisanceSpec::glm_scenario('b').propensity.map.name == "ps_wrong");
    CHECK(NuisanceSpec::glm_scenario('c').outcome.map.name == "out_wrong");
    CHECK(NuisanceSpec::glm_scenario('d').propensity.map.name == "ps_wrong");
    CHECK(NuisanceSpec::glm_scenario('d').outcome.map.name == "out_wrong");
    CHECK(NuisanceSpec::flexible().propensity.kind == LearnerSpec::Kind::l1_basis);
    CHECK_THROWS_AS(NuisanceSpec::glm_scenario('z'), ConfigError);
}
