#include "tndkit/config.hpp"

#include "tndkit/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tndkit {

using nlohmann::json;

NuisanceSpec EstimateConfig::nuisance_spec() const {
    NuisanceSpec spec;
    spec.epsilon = epsilon;
    if (learner == "glm") {
        spec.propensity.kind = LearnerSpec::Kind::logistic_glm;
        spec.outcome.kind = LearnerSpec::Kind::logistic_glm;
    } else if (learner == "l1_basis") {
        spec.propensity.kind = LearnerSpec::Kind::l1_basis;
        spec.outcome.kind = LearnerSpec::Kind::l1_basis;
    } else {
        throw ConfigError("unknown learner: " + learner);
    }
    spec.propensity.map = feature_map(ps_features);
    spec.outcome.map = feature_map(out_features);
    return spec;
}

std::vector<std::string> known_presets() {
    return {"study1-b025", "study1-b05", "study2", "appendix-II", "appendix-III"};
}

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ConfigError(where + " must be a non-negative integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw ConfigError(where + " must be non-negative");
    return static_cast<std::uint64_t>(x);
}

void apply_dgp(const json& obj, DgpConfig& dgp) {
    static const std::set<std::string> keys = {
        "beta_em",       "seed",          "c_min",          "c_max",
        "v_intercept",   "v_c",           "v_abs_c",        "v_sin_pi_c",
        "i1_intercept",  "i1_c",          "i1_u1",          "covid_intercept",
        "covid_v",       "covid_c",       "covid_exp_c",    "covid_u2",
        "covid_u2_v",    "covid_u1",      "w_other_intercept", "w_other_c",
        "w_other_u1",    "w_covid_intercept", "w_covid_c",  "w_covid_v",
        "w_covid_u1",    "w_covid_u2",    "w_covid_u2_v",   "h_intercept",
        "h_c",           "h_v",           "h_u1"};
    check_keys(obj, "dgp", keys);
    auto num = [&](const char* key, double& field) {
        if (obj.contains(key)) field = as_number(obj[key], std::string("dgp.") + key);
    };
    if (obj.contains("seed")) dgp.seed = as_u64(obj["seed"], "dgp.seed");
    num("beta_em", dgp.beta_em);
    num("c_min", dgp.c_min);
    num("c_max", dgp.c_max);
    num("v_intercept", dgp.v_intercept);
    num("v_c", dgp.v_c);
    num("v_abs_c", dgp.v_abs_c);
    num("v_sin_pi_c", dgp.v_sin_pi_c);
    num("i1_intercept", dgp.i1_intercept);
    num("i1_c", dgp.i1_c);
    num("i1_u1", dgp.i1_u1);
    num("covid_intercept", dgp.covid_intercept);
    num("covid_v", dgp.covid_v);
    num("covid_c", dgp.covid_c);
    num("covid_exp_c", dgp.covid_exp_c);
    num("covid_u2", dgp.covid_u2);
    num("covid_u2_v", dgp.covid_u2_v);
    num("covid_u1", dgp.covid_u1);
    num("w_other_intercept", dgp.w_other_intercept);
    num("w_other_c", dgp.w_other_c);
    num("w_other_u1", dgp.w_other_u1);
    num("w_covid_intercept", dgp.w_covid_intercept);
    num("w_covid_c", dgp.w_covid_c);
    num("w_covid_v", dgp.w_covid_v);
    num("w_covid_u1", dgp.w_covid_u1);
    num("w_covid_u2", dgp.w_covid_u2);
    num("w_covid_u2_v", dgp.w_covid_u2_v);
    num("h_intercept", dgp.h_intercept);
    num("h_c", dgp.h_c);
    num("h_v", dgp.h_v);
    num("h_u1", dgp.h_u1);
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw ConfigError(where + " must contain only strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

void apply_estimate(const json& obj, EstimateConfig& est) {
    static const std::set<std::string> keys = {"estimators", "learner",  "ps_features",
                                               "out_features", "j_folds", "alpha",
                                               "epsilon",      "bootstrap", "seed"};
    check_keys(obj, "estimate", keys);
    if (obj.contains("estimators")) est.estimators = string_list(obj["estimators"], "estimate.estimators");
    if (obj.contains("learner")) est.learner = obj["learner"].get<std::string>();
    if (obj.contains("ps_features")) est.ps_features = obj["ps_features"].get<std::string>();
    if (obj.contains("out_features")) est.out_features = obj["out_features"].get<std::string>();
    if (obj.contains("j_folds")) est.j_folds = static_cast<int>(as_u64(obj["j_folds"], "estimate.j_folds"));
    if (obj.contains("alpha")) est.alpha = as_number(obj["alpha"], "estimate.alpha");
    if (obj.contains("epsilon")) est.epsilon = as_number(obj["epsilon"], "estimate.epsilon");
    if (obj.contains("bootstrap")) est.bootstrap = static_cast<int>(as_u64(obj["bootstrap"], "estimate.bootstrap"));
    if (obj.contains("seed")) est.seed = as_u64(obj["seed"], "estimate.seed");
}

void apply_study(const json& obj, StudyConfig& study, std::string& mode) {
    static const std::set<std::string> keys = {
        "n_list", "reps",  "estimators", "scenarios",   "j_folds",        "alpha",
        "seed",   "truth", "truth_n_pop", "max_pop_per_rep", "outreg_bootstrap", "mode"};
    check_keys(obj, "study", keys);
    if (obj.contains("n_list")) {
        if (!obj["n_list"].is_array()) throw ConfigError("study.n_list must be an array");
        study.n_list.clear();
        for (const auto& v : obj["n_list"]) {
            study.n_list.push_back(static_cast<std::size_t>(as_u64(v, "study.n_list[]")));
        }
    }
    if (obj.contains("reps")) study.reps = static_cast<int>(as_u64(obj["reps"], "study.reps"));
    if (obj.contains("estimators")) study.estimators = string_list(obj["estimators"], "study.estimators");
    if (obj.contains("scenarios")) study.scenarios = string_list(obj["scenarios"], "study.scenarios");
    if (obj.contains("j_folds")) study.j_folds = static_cast<int>(as_u64(obj["j_folds"], "study.j_folds"));
    if (obj.contains("alpha")) study.alpha = as_number(obj["alpha"], "study.alpha");
    if (obj.contains("seed")) study.seed = as_u64(obj["seed"], "study.seed");
    if (obj.contains("truth")) {
        if (obj["truth"].is_number()) {
            study.truth = obj["truth"].get<double>();
        } else if (obj["truth"].is_string()) {
            study.truth = obj["truth"].get<std::string>();
        } else {
            throw ConfigError("study.truth must be a number or \"auto\"");
        }
    }
    if (obj.contains("truth_n_pop")) {
        study.truth_n_pop = static_cast<std::size_t>(as_u64(obj["truth_n_pop"], "study.truth_n_pop"));
    }
    if (obj.contains("max_pop_per_rep")) {
        study.max_pop_per_rep =
            static_cast<std::size_t>(as_u64(obj["max_pop_per_rep"], "study.max_pop_per_rep"));
    }
    if (obj.contains("outreg_bootstrap")) {
        study.outreg_bootstrap =
            static_cast<int>(as_u64(obj["outreg_bootstrap"], "study.outreg_bootstrap"));
    }
    if (obj.contains("mode")) {
        mode = obj["mode"].get<std::string>();
        if (mode != "study" && mode != "convergence") {
            throw ConfigError("study.mode must be \"study\" or \"convergence\"");
        }
    }
}

void apply_preset(const std::string& name, RunConfig& cfg) {
    if (name == "study1-b025" || name == "study1-b05") {
        cfg.dgp = DgpConfig::study1(name == "study1-b025" ? 0.25 : 0.5);
        cfg.study.n_list = {500, 1000, 2000};
        cfg.study.reps = 1000;
        cfg.study.scenarios = {"flexible"};
        cfg.study.j_folds = 2;
        cfg.estimate.learner = "l1_basis";
        cfg.estimate.j_folds = 2;
    } else if (name == "study2") {
        cfg.dgp = DgpConfig::study2();
        cfg.study.n_list = {250, 500, 1000};
        cfg.study.reps = 1000;
        cfg.study.scenarios = {"a", "b", "c", "d"};
        cfg.study.j_folds = 1;
        cfg.estimate.learner = "glm";
        cfg.estimate.ps_features = "ps_correct";
        cfg.estimate.out_features = "out_correct";
        cfg.estimate.j_folds = 1;
    } else if (name == "appendix-II" || name == "appendix-III") {
        cfg.dgp = name == "appendix-II" ? DgpConfig::setting_ii() : DgpConfig::setting_iii();
        cfg.study.n_list = {250, 500, 1000};
        cfg.study.reps = 1000;
        cfg.study.scenarios = {"a"};
        cfg.study.j_folds = 1;
        cfg.estimate.learner = "glm";
        cfg.estimate.ps_features = "ps_correct";
        cfg.estimate.out_features = "out_correct";
        cfg.estimate.j_folds = 1;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    cfg.preset = name;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> keys = {"preset", "seed",     "dgp",   "simulate",
                                               "truth",  "estimate", "study", "schema"};
    check_keys(root, "config", keys);

    RunConfig cfg;
    if (root.contains("preset")) apply_preset(root["preset"].get<std::string>(), cfg);
    if (root.contains("seed")) {
        const std::uint64_t seed = as_u64(root["seed"], "seed");
        cfg.dgp.seed = seed;
        cfg.study.seed = seed;
        cfg.estimate.seed = seed;
    }
    if (root.contains("dgp")) apply_dgp(root["dgp"], cfg.dgp);
    if (root.contains("simulate")) {
        static const std::set<std::string> sim_keys = {"n", "full_population"};
        check_keys(root["simulate"], "simulate", sim_keys);
        if (root["simulate"].contains("n")) {
            cfg.simulate_n = static_cast<std::size_t>(as_u64(root["simulate"]["n"], "simulate.n"));
        }
        if (root["simulate"].contains("full_population")) {
            if (!root["simulate"]["full_population"].is_boolean()) {
                throw ConfigError("simulate.full_population must be a boolean");
            }
            cfg.full_population = root["simulate"]["full_population"].get<bool>();
        }
    }
    if (root.contains("truth")) {
        static const std::set<std::string> truth_keys = {"n_pop"};
        check_keys(root["truth"], "truth", truth_keys);
        if (root["truth"].contains("n_pop")) {
            cfg.truth_n_pop = static_cast<std::size_t>(as_u64(root["truth"]["n_pop"], "truth.n_pop"));
        }
    }
    if (root.contains("estimate")) apply_estimate(root["estimate"], cfg.estimate);
    if (root.contains("study")) apply_study(root["study"], cfg.study, cfg.study_mode);
    if (root.contains("schema")) {
        cfg.schema = root["schema"].get<std::string>();
        if (cfg.schema != "generic" && cfg.schema != "quebec") {
            throw ConfigError("schema must be \"generic\" or \"quebec\"");
        }
    }
    cfg.study.dgp = cfg.dgp;
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace tndkit
