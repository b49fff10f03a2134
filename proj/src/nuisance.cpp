#include "tndkit/nuisance.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"

#include <algorithm>

namespace tndkit {

NuisanceSpec NuisanceSpec::glm_scenario(char scenario) {
    NuisanceSpec spec;
    spec.propensity.kind = LearnerSpec::Kind::logistic_glm;
    spec.outcome.kind = LearnerSpec::Kind::logistic_glm;
    switch (scenario) {
        case 'a':
            spec.propensity.map = feature_map("ps_correct");
            spec.outcome.map = feature_map("out_correct");
            break;
        case 'b':
            spec.propensity.map = feature_map("ps_wrong");
            spec.outcome.map = feature_map("out_correct");
            break;
        case 'c':
            spec.propensity.map = feature_map("ps_correct");
            spec.outcome.map = feature_map("out_wrong");
            break;
        case 'd':
            spec.propensity.map = feature_map("ps_wrong");
            spec.outcome.map = feature_map("out_wrong");
            break;
        default:
            throw ConfigError(std::string("unknown scenario: ") + scenario);
    }
    return spec;
}

NuisanceSpec NuisanceSpec::flexible() {
    NuisanceSpec spec;
    spec.propensity.kind = LearnerSpec::Kind::l1_basis;
    spec.outcome.kind = LearnerSpec::Kind::l1_basis;
    return spec;
}

Eigen::MatrixXd covariate_matrix(const TndDataset& data) {
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    const Eigen::Index d = static_cast<Eigen::Index>(data.dim());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& cov = data.records[static_cast<std::size_t>(i)].covariates;
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = cov[static_cast<std::size_t>(j)];
    }
    return x;
}

namespace {

// One fitted model, trained on selected rows of the raw covariates, able to
// predict on any row set.
class Fit {
  public:
    Fit(const LearnerSpec& spec, const Eigen::MatrixXd& raw_train, const Eigen::VectorXd& labels,
        std::uint64_t seed)
        : spec_(&spec) {
        if (spec.kind == LearnerSpec::Kind::logistic_glm) {
            glm_beta_ = fit_logistic(with_intercept(spec.map(raw_train)), labels, spec.glm);
        } else {
            l1_ = fit_l1_basis(spec.map(raw_train), labels, spec.l1, seed);
        }
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const {
        if (spec_->kind == LearnerSpec::Kind::logistic_glm) {
            return predict_logistic(with_intercept(spec_->map(raw)), glm_beta_);
        }
        return l1_.predict(spec_->map(raw));
    }

    bool degenerate() const {
        return spec_->kind == LearnerSpec::Kind::l1_basis && l1_.degenerate_labels;
    }

  private:
    const LearnerSpec* spec_;
    Eigen::VectorXd glm_beta_;
    L1Model l1_;
};

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

Eigen::VectorXd select(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
    return out;
}

void clamp_into(Eigen::VectorXd& v, double eps) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], eps, 1.0 - eps);
}

} // namespace

NuisanceEstimates estimate_nuisances(const TndDataset& data, const NuisanceSpec& spec,
                                     const FoldAssignment& folds, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (folds.size() != n) {
        throw DimensionMismatch("estimate_nuisances: fold assignment size does not match dataset");
    }
    if (!(spec.epsilon > 0.0 && spec.epsilon < 0.5)) {
        throw ConfigError("estimate_nuisances: epsilon must lie in (0, 0.5)");
    }

    const Eigen::MatrixXd raw = covariate_matrix(data);
    Eigen::VectorXd v(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[static_cast<Eigen::Index>(i)] = data.records[i].v;
        y[static_cast<Eigen::Index>(i)] = data.records[i].y;
    }

    NuisanceEstimates est;
    est.epsilon = spec.epsilon;
    est.pi0_v1.resize(static_cast<Eigen::Index>(n));
    est.pi0_v0.resize(static_cast<Eigen::Index>(n));
    est.mu_v1.resize(static_cast<Eigen::Index>(n));
    est.mu_v0.resize(static_cast<Eigen::Index>(n));
    est.m.resize(static_cast<Eigen::Index>(n));

    const int j_folds = folds.j_folds;
    for (int j = 0; j < j_folds; ++j) {
        std::vector<Eigen::Index> train, test;
        for (std::size_t i = 0; i < n; ++i) {
            const bool held_out = j_folds > 1 && folds.fold_of[i] == j;
            (held_out ? test : train).push_back(static_cast<Eigen::Index>(i));
        }
        if (j_folds == 1) test = train;

        // Required strata in the training complement.
        std::size_t cases = 0, controls = 0, arm1 = 0, ctrl_arm1 = 0, ctrl_arm0 = 0;
        for (Eigen::Index i : train) {
            const bool is_case = y[i] == 1.0;
            cases += is_case;
            controls += !is_case;
            arm1 += v[i] == 1.0;
            if (!is_case) {
                ctrl_arm1 += v[i] == 1.0;
                ctrl_arm0 += v[i] == 0.0;
            }
        }
        const std::string where = " in training complement of fold " + std::to_string(j);
        if (cases == 0) throw DegenerateArm("no cases" + where);
        if (controls == 0) throw DegenerateArm("no controls" + where);
        if (arm1 == 0) throw DegenerateArm("no records with v=1" + where);
        if (arm1 == train.size()) throw DegenerateArm("no records with v=0" + where);
        if (ctrl_arm1 == 0) throw DegenerateArm("no controls with v=1" + where);
        if (ctrl_arm0 == 0) throw DegenerateArm("no controls with v=0" + where);

        std::vector<Eigen::Index> ctrl_rows, arm_rows[2];
        for (Eigen::Index i : train) {
            if (y[i] == 0.0) ctrl_rows.push_back(i);
            arm_rows[v[i] == 1.0 ? 1 : 0].push_back(i);
        }

        const Eigen::MatrixXd raw_test = select_rows(raw, test);

        // pi0: V on covariates among controls only.
        Fit fit_pi0(spec.propensity, select_rows(raw, ctrl_rows), select(v, ctrl_rows),
                    derive_seed(seed, static_cast<std::uint64_t>(j), 1));
        if (fit_pi0.degenerate()) est.notes.push_back("pi0 fold " + std::to_string(j) + ": degenerate labels");
        Eigen::VectorXd p1 = fit_pi0.predict(raw_test);
        Eigen::VectorXd p0 = Eigen::VectorXd::Ones(p1.size()) - p1;
        clamp_into(p1, spec.epsilon);
        clamp_into(p0, spec.epsilon);

        // mu_v: Y on covariates within arm v.
        Eigen::VectorXd mu_hat[2];
        for (int arm = 0; arm <= 1; ++arm) {
            Fit fit_mu(spec.outcome, select_rows(raw, arm_rows[arm]), select(y, arm_rows[arm]),
                       derive_seed(seed, static_cast<std::uint64_t>(j), 2 + static_cast<std::uint64_t>(arm)));
            if (fit_mu.degenerate()) {
                est.notes.push_back("mu_v" + std::to_string(arm) + " fold " + std::to_string(j) +
                                    ": degenerate labels");
            }
            mu_hat[arm] = fit_mu.predict(raw_test);
            clamp_into(mu_hat[arm], spec.epsilon);
        }

        // m: Y on covariates, not adjusting for vaccination.
        Fit fit_m(spec.outcome, select_rows(raw, train), select(y, train),
                  derive_seed(seed, static_cast<std::uint64_t>(j), 4));
        if (fit_m.degenerate()) est.notes.push_back("m fold " + std::to_string(j) + ": degenerate labels");
        Eigen::VectorXd m_hat = fit_m.predict(raw_test);
        clamp_into(m_hat, spec.epsilon);

        for (std::size_t k = 0; k < test.size(); ++k) {
            const Eigen::Index i = test[k];
            const Eigen::Index kk = static_cast<Eigen::Index>(k);
            est.pi0_v1[i] = p1[kk];
            est.pi0_v0[i] = p0[kk];
            est.mu_v1[i] = mu_hat[1][kk];
            est.mu_v0[i] = mu_hat[0][kk];
            est.m[i] = m_hat[kk];
        }
    }
    return est;
}

} // namespace tndkit
