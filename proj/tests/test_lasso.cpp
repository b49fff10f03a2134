#include "tndkit/errors.hpp"
#include "tndkit/lasso.hpp"
#include "tndkit/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace tndkit;

namespace {

// labels ~ Bern(p(c)) with c ~ U(-1.5, 1.5)
void simulate(std::size_t n, std::uint64_t seed, double (*prob)(double), Eigen::MatrixXd& x,
              Eigen::VectorXd& y) {
    Rng rng(seed);
    x.resize(static_cast<Eigen::Index>(n), 1);
    y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double c = rng.uniform(-1.5, 1.5);
        x(static_cast<Eigen::Index>(i), 0) = c;
        y[static_cast<Eigen::Index>(i)] = rng.bernoulli(prob(c)) ? 1.0 : 0.0;
    }
}

} // namespace

TEST_CASE("pure-noise labels shrink to a near-constant model") {
    // Cross-validated lambda.min occasionally keeps a knot or two under the
    // null, so the shrinkage claim is checked across a seed battery: the
    // typical fit is exactly intercept-only and the average wiggle is small.
    double total_dev = 0.0;
    int near_constant = 0;
    const int n_seeds = 8;
    for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
        Eigen::MatrixXd x;
        Eigen::VectorXd y;
        simulate(500, 100 + seed, [](double) { return 0.35; }, x, y);
        const L1Model m = fit_l1_basis(x, y, L1Options{}, seed);
        const Eigen::VectorXd p = m.predict(x);
        const double ybar = y.mean();
        double dev = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i) dev = std::max(dev, std::fabs(p[i] - ybar));
        total_dev += dev;
        near_constant += dev < 0.01 ? 1 : 0;
    }
    CHECK(total_dev / n_seeds < 0.05);
    CHECK(near_constant >= n_seeds / 2);
}

TEST_CASE("step-function truth is recovered at the plateaus") {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    simulate(2000, 33, [](double c) { return c > 0.0 ? 0.8 : 0.2; }, x, y);
    const L1Model m = fit_l1_basis(x, y, L1Options{}, 5);
    Eigen::MatrixXd probe(2, 1);
    probe << -1.0, 1.0;
    const Eigen::VectorXd p = m.predict(probe);
    CHECK(std::fabs(p[0] - 0.2) < 0.05);
    CHECK(std::fabs(p[1] - 0.8) < 0.05);
}

TEST_CASE("all-equal labels take the degenerate path") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 1);
    const L1Model ones = fit_l1_basis(x, Eigen::VectorXd::Ones(40), L1Options{}, 1);
    CHECK(ones.degenerate_labels);
    CHECK(ones.predict(x)[0] == 1.0); // clamping happens at the nuisance layer
    const L1Model zeros = fit_l1_basis(x, Eigen::VectorXd::Zero(40), L1Options{}, 1);
    CHECK(zeros.degenerate_labels);
    CHECK(zeros.predict(x)[0] == 0.0);
}

TEST_CASE("penalized objective is non-increasing across sweeps") {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    simulate(300, 8, [](double c) { return 0.3 + 0.4 * (c > 0.5); }, x, y);
    L1Model shape;
    shape.in_dim = 1;
    shape.knots = {{-1.0, -0.5, 0.0, 0.5, 1.0}};
    const Eigen::MatrixXd basis = shape.basis(x);
    for (double lambda : {0.2, 0.02, 0.002, 0.0002}) {
        std::vector<double> losses;
        cd_logistic_lasso(basis, y, lambda, Eigen::VectorXd::Zero(basis.cols()), L1Options{},
                          &losses);
        REQUIRE(!losses.empty());
        for (std::size_t k = 1; k < losses.size(); ++k) {
            CHECK(losses[k] <= losses[k - 1] + 1e-12);
        }
    }
}

TEST_CASE("fit is deterministic given the seed") {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    simulate(400, 55, [](double c) { return 0.25 + 0.5 * (c > 0.0); }, x, y);
    const L1Model a = fit_l1_basis(x, y, L1Options{}, 17);
    const L1Model b = fit_l1_basis(x, y, L1Options{}, 17);
    CHECK(a.lambda == b.lambda);
    CHECK((a.beta - b.beta).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("row-count preconditions") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 1);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
    y[0] = 1.0;
    L1Options opts; // cv_folds = 5 needs >= 10 rows
    CHECK_THROWS_AS(fit_l1_basis(x, y, opts, 1), DimensionMismatch);
}
