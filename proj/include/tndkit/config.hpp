#pragma once

#include "tndkit/dgp.hpp"
#include "tndkit/mc.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tndkit {

struct EstimateConfig {
    std::vector<std::string> estimators{"tnddr", "ipw", "outreg"};
    std::string learner = "glm"; // glm | l1_basis
    std::string ps_features = "identity";
    std::string out_features = "identity";
    int j_folds = 2;
    double alpha = 0.05;
    double epsilon = 0.01;
    int bootstrap = 0; // outreg bootstrap resamples; 0 = no outreg CI
    std::uint64_t seed = 1;

    NuisanceSpec nuisance_spec() const;
};

// Parsed configuration document for one CLI run. Presets encode the
// simulation-study settings; explicit keys override preset values.
struct RunConfig {
    std::string preset; // study1-b025 | study1-b05 | study2 | appendix-II | appendix-III
    DgpConfig dgp;
    std::size_t simulate_n = 1000;
    bool full_population = false;
    std::size_t truth_n_pop = 10'000'000;
    std::string schema = "generic";
    std::string study_mode = "study"; // study | convergence
    EstimateConfig estimate;
    StudyConfig study;
};

// Strict parse: unknown keys anywhere are rejected with ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// The preset names understood by parse_run_config.
std::vector<std::string> known_presets();

} // namespace tndkit
