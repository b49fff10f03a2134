#include "tndkit/config.hpp"
#include "tndkit/dgp.hpp"
#include "tndkit/discrete.hpp"
#include "tndkit/errors.hpp"
#include "tndkit/estimators.hpp"
#include "tndkit/mc.hpp"
#include "tndkit/nuisance.hpp"
#include "tndkit/oracle.hpp"
#include "tndkit/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tndkit;

namespace {

TndDataset dataset_from_arrays(const Eigen::MatrixXd& covariates, const std::vector<int>& v,
                               const std::vector<int>& y, std::vector<std::string> feature_names) {
    TndDataset d;
    const auto n = static_cast<std::size_t>(covariates.rows());
    if (v.size() != n || y.size() != n) {
        throw DimensionMismatch("v and y must match the covariate row count");
    }
    if (feature_names.empty()) {
        for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
            feature_names.push_back("x" + std::to_string(j));
        }
    }
    d.feature_names = std::move(feature_names);
    d.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.records[i].v = v[i];
        d.records[i].y = y[i];
        for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
            d.records[i].covariates.push_back(covariates(static_cast<Eigen::Index>(i), j));
        }
    }
    validate_dataset(d);
    return d;
}

py::dict output_to_dict(const EstimatorOutput& out) {
    py::dict r;
    r["method"] = out.method;
    r["psi_mrr"] = out.psi_mrr;
    r["psi_v1"] = out.psi_v1;
    r["psi_v0"] = out.psi_v0;
    r["ve"] = out.ve;
    if (out.se_log_mrr) r["se_log_mrr"] = *out.se_log_mrr;
    if (out.ci_mrr) r["ci_mrr"] = py::make_tuple(out.ci_mrr->lower, out.ci_mrr->upper);
    r["influence_v1"] = out.influence_v1;
    r["influence_v0"] = out.influence_v0;
    return r;
}

} // namespace

PYBIND11_MODULE(_tndkit, m) {
    m.doc() = "test-negative-design vaccine-effectiveness estimation";

    py::register_exception<Error>(m, "TndError");

    py::class_<DgpConfig>(m, "DgpConfig")
        .def(py::init<>())
        .def_readwrite("beta_em", &DgpConfig::beta_em)
        .def_readwrite("seed", &DgpConfig::seed)
        .def_readwrite("covid_intercept", &DgpConfig::covid_intercept)
        .def_readwrite("covid_exp_c", &DgpConfig::covid_exp_c)
        .def_readwrite("w_other_intercept", &DgpConfig::w_other_intercept)
        .def_readwrite("h_v", &DgpConfig::h_v)
        .def_static("study1", &DgpConfig::study1, py::arg("beta_em"), py::arg("seed") = 0)
        .def_static("study2", &DgpConfig::study2, py::arg("seed") = 0)
        .def_static("setting_ii", &DgpConfig::setting_ii, py::arg("seed") = 0)
        .def_static("setting_iii", &DgpConfig::setting_iii, py::arg("seed") = 0);

    m.def(
        "simulate_tnd",
        [](const DgpConfig& cfg, std::size_t n, int threads) {
            const TndDataset d = simulate_tnd_dataset(cfg, n, 20'000'000, threads);
            Eigen::MatrixXd c(static_cast<Eigen::Index>(d.size()), 1);
            std::vector<int> v(d.size()), y(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                c(static_cast<Eigen::Index>(i), 0) = d.records[i].covariates[0];
                v[i] = d.records[i].v;
                y[i] = d.records[i].y;
            }
            return py::make_tuple(c, v, y);
        },
        py::arg("config"), py::arg("n"), py::arg("threads") = 1,
        "Simulate a TND dataset; returns (covariates, v, y).");

    m.def(
        "truth_mrr",
        [](const DgpConfig& cfg, std::size_t n_pop, int threads) {
            const TruthResult t = truth_mrr_monte_carlo(cfg, n_pop, threads);
            return py::make_tuple(t.psi_mrr, t.mc_se);
        },
        py::arg("config"), py::arg("n_pop") = 1'000'000, py::arg("threads") = 1,
        "Monte-Carlo truth for the marginal risk ratio; returns (psi_mrr, mc_se).");

    m.def(
        "split_folds",
        [](std::size_t n, int j, std::uint64_t seed) { return split_folds(n, j, seed).fold_of; },
        py::arg("n"), py::arg("j"), py::arg("seed"));

    m.def(
        "estimate",
        [](const Eigen::MatrixXd& covariates, const std::vector<int>& v, const std::vector<int>& y,
           const std::vector<std::string>& estimators, const std::string& learner,
           const std::string& ps_features, const std::string& out_features, int j_folds,
           double alpha, double epsilon, std::uint64_t seed,
           std::vector<std::string> feature_names) {
            const TndDataset data = dataset_from_arrays(covariates, v, y, std::move(feature_names));
            EstimateConfig est;
            est.estimators = estimators;
            est.learner = learner;
            est.ps_features = ps_features;
            est.out_features = out_features;
            est.j_folds = j_folds;
            est.alpha = alpha;
            est.epsilon = epsilon;
            est.seed = seed;
            const NuisanceSpec spec = est.nuisance_spec();
            const FoldAssignment folds = j_folds > 1 ? split_folds(data.size(), j_folds, seed)
                                                     : FoldAssignment::single(data.size());
            const NuisanceEstimates nuis = estimate_nuisances(data, spec, folds, seed);
            py::list results;
            for (const std::string& name : estimators) {
                if (name == "tnddr") {
                    results.append(output_to_dict(tnddr_estimate(data, nuis, alpha)));
                } else if (name == "ipw") {
                    results.append(output_to_dict(ipw_mrr(data, nuis, alpha)));
                } else if (name == "outreg") {
                    results.append(output_to_dict(outreg_mrr(data, nuis, alpha)));
                } else {
                    throw ConfigError("unknown estimator: " + name);
                }
            }
            return results;
        },
        py::arg("covariates"), py::arg("v"), py::arg("y"),
        py::arg("estimators") = std::vector<std::string>{"tnddr"}, py::arg("learner") = "glm",
        py::arg("ps_features") = "identity", py::arg("out_features") = "identity",
        py::arg("j_folds") = 2, py::arg("alpha") = 0.05, py::arg("epsilon") = 0.01,
        py::arg("seed") = 1, py::arg("feature_names") = std::vector<std::string>{},
        "Run the requested estimators on (covariates, v, y); returns a list of result dicts.");

    m.def(
        "oracle_check",
        [](bool inject_fault) {
            py::list out;
            for (const OracleCheck& c : run_oracle_checks(DiscreteDgp{}, inject_fault)) {
                py::dict d;
                d["name"] = c.name;
                d["pass"] = c.pass;
                d["value"] = c.value;
                out.append(d);
            }
            return out;
        },
        py::arg("inject_fault") = false,
        "Enumeration-oracle identity checks on the discrete model.");

    m.def(
        "run_study_json",
        [](const std::string& config_json, int threads) {
            RunConfig cfg = parse_run_config(config_json);
            cfg.study.threads = threads;
            const McSummary s = run_study(cfg.study);
            py::list rows;
            for (const McRow& row : s.rows) {
                py::dict d;
                d["estimator"] = row.estimator;
                d["scenario"] = row.scenario;
                d["n"] = row.n;
                d["mean_bias"] = row.mean_bias;
                d["mc_se"] = row.mc_se;
                if (row.coverage) d["coverage"] = *row.coverage;
                d["failures"] = row.failures;
                rows.append(d);
            }
            py::dict out;
            out["truth"] = s.truth;
            out["rows"] = rows;
            return out;
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "Run a replication study from a JSON config document.");
}
