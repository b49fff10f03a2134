#include "tndkit/csv.hpp"
#include "tndkit/discrete.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

#ifndef TND_CLI_PATH
#error "TND_CLI_PATH must point at the tnd binary"
#endif

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    static int counter = 0;
    const fs::path outfile =
        fs::temp_directory_path() / ("tnd_cli_test_" + std::to_string(counter++) + ".out");
    const std::string cmd =
        std::string(TND_CLI_PATH) + " " + args + " > " + outfile.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream is(outfile);
    std::ostringstream buf;
    buf << is.rdbuf();
    fs::remove(outfile);
    CliResult r;
    r.exit_code = WEXITSTATUS(rc);
    r.out = buf.str();
    return r;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream os(p);
    os << content;
    return p;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

} // namespace

TEST_CASE("simulate emits the requested rows, byte-identically on re-run") {
    const CliResult a = run("simulate --preset study2 --seed 1 --n 100");
    REQUIRE(a.exit_code == 0);
    CHECK(count_lines(a.out) == 101); // header + 100 records
    CHECK(a.out.rfind("c,v,y\n", 0) == 0);
    const CliResult b = run("simulate --preset study2 --seed 1 --n 100");
    CHECK(a.out == b.out);
    const CliResult c = run("simulate --preset study2 --seed 2 --n 100");
    CHECK(a.out != c.out);
}

TEST_CASE("full-population output passes the gating check") {
    const fs::path pop = fs::temp_directory_path() / "tnd_cli_pop.csv";
    const CliResult sim =
        run("simulate --preset study2 --seed 4 --n 5000 --full-population --out " + pop.string());
    REQUIRE(sim.exit_code == 0);
    const CliResult check = run("oracle-check --file " + pop.string());
    CHECK(check.exit_code == 0);
    CHECK(check.out.find("gating_violations=0") != std::string::npos);
    fs::remove(pop);
}

TEST_CASE("estimate reports internally consistent VE with ordered CI") {
    const fs::path data = fs::temp_directory_path() / "tnd_cli_est.csv";
    REQUIRE(run("simulate --preset study2 --seed 9 --n 2000 --out " + data.string()).exit_code == 0);
    const fs::path cfg = temp_file("tnd_cli_est.json",
                                   R"({"estimate":{"learner":"glm","ps_features":"ps_correct",
             "out_features":"out_correct","j_folds":2,"estimators":["tnddr"]}})");
    const CliResult r = run("estimate " + data.string() + " --seed 3 --format csv --config " +
                            cfg.string());
    REQUIRE(r.exit_code == 0);
    double psi = -1, ve = -1, lo = -1, hi = -1;
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line)) {
        std::sscanf(line.c_str(), "tnddr.psi_mrr=%lf", &psi);
        std::sscanf(line.c_str(), "tnddr.ve=%lf", &ve);
        std::sscanf(line.c_str(), "tnddr.ci_lower=%lf", &lo);
        std::sscanf(line.c_str(), "tnddr.ci_upper=%lf", &hi);
    }
    REQUIRE(psi > 0);
    CHECK(ve == doctest::Approx(1.0 - psi).epsilon(1e-12));
    CHECK(lo <= psi);
    CHECK(psi <= hi);
    // diagnostics mode prints both variance conventions
    CHECK(r.out.find("tnddr.var_phi_v1_centered=") != std::string::npos);
    CHECK(r.out.find("tnddr.var_phi_v1_uncentered=") != std::string::npos);
    fs::remove(data);
    fs::remove(cfg);
}

TEST_CASE("estimate rejects a file without the y column, exit code 3") {
    const fs::path bad = temp_file("tnd_cli_bad.csv", "c,v\n1.0,0\n");
    const CliResult r = run("estimate " + bad.string());
    CHECK(r.exit_code == 3);
    fs::remove(bad);
}

TEST_CASE("config errors exit with code 2") {
    const fs::path cfg = temp_file("tnd_cli_badcfg.json", R"({"nope":1})");
    CHECK(run("simulate --config " + cfg.string()).exit_code == 2);
    CHECK(run("simulate --preset study9").exit_code == 2);
    fs::remove(cfg);
}

TEST_CASE("mc-study smoke run emits summary and per-rep files") {
    const fs::path dir = fs::temp_directory_path() / "tnd_cli_mc";
    fs::create_directories(dir);
    const fs::path cfg = temp_file(
        "tnd_cli_mc.json",
        R"({"preset":"study2","seed":5,
            "study":{"n_list":[300],"reps":2,"scenarios":["a"],"truth":0.13}})");
    const CliResult r =
        run("mc-study --config " + cfg.string() + " --format csv --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("estimator,scenario,n,", 0) == 0);
    REQUIRE(fs::exists(dir / "summary.csv"));
    REQUIRE(fs::exists(dir / "reps.csv"));

    // with reps=2 per cell, coverage can only be 0, 0.5, or 1
    std::ifstream is(dir / "summary.csv");
    std::string line;
    std::getline(is, line); // header
    while (std::getline(is, line)) {
        std::istringstream fields(line);
        std::string f;
        int col = 0;
        while (std::getline(fields, f, ',')) {
            if (col == 5 && !f.empty()) {
                const double cov = std::strtod(f.c_str(), nullptr);
                CHECK((cov == 0.0 || cov == 0.5 || cov == 1.0));
            }
            ++col;
        }
    }
    fs::remove_all(dir);
    fs::remove(cfg);
}

TEST_CASE("reps.csv re-aggregates to exactly the persisted summary") {
    const fs::path dir = fs::temp_directory_path() / "tnd_cli_agg";
    fs::create_directories(dir);
    const fs::path cfg = temp_file(
        "tnd_cli_agg.json",
        R"({"preset":"study2","seed":21,
            "study":{"n_list":[400],"reps":5,"scenarios":["a"],"estimators":["tnddr"],"truth":0.13}})");
    REQUIRE(run("mc-study --config " + cfg.string() + " --out " + dir.string()).exit_code == 0);

    // recompute mean bias from the persisted per-rep estimates
    std::ifstream reps(dir / "reps.csv");
    std::string line;
    std::getline(reps, line);
    std::vector<double> estimates;
    while (std::getline(reps, line)) {
        std::istringstream fields(line);
        std::string f;
        for (int col = 0; std::getline(fields, f, ','); ++col) {
            if (col == 4 && !f.empty()) estimates.push_back(std::strtod(f.c_str(), nullptr));
        }
    }
    REQUIRE(estimates.size() == 5);
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean = mean / 5.0 - 0.13;

    std::ifstream summary(dir / "summary.csv");
    std::getline(summary, line); // header
    std::getline(summary, line);
    std::istringstream fields(line);
    std::string f;
    double persisted_bias = 0.0;
    for (int col = 0; std::getline(fields, f, ','); ++col) {
        if (col == 3) persisted_bias = std::strtod(f.c_str(), nullptr);
    }
    CHECK(persisted_bias == doctest::Approx(mean).epsilon(1e-15));
    fs::remove_all(dir);
    fs::remove(cfg);
}

TEST_CASE("estimate on an enumerated-model sample recovers the exact risk ratio") {
    // dataset drawn from the discrete oracle, estimated with the adaptive
    // learner (whose quantile knots saturate a 3-atom support)
    const tndkit::DiscreteDgp dgp;
    const tndkit::ExactTables tables = tndkit::enumerate_discrete(dgp);
    const tndkit::TndDataset sample = tndkit::sample_discrete_tnd(dgp, 4000, 8080);
    const fs::path data = fs::temp_directory_path() / "tnd_cli_disc.csv";
    tndkit::write_dataset_csv(sample, data.string());

    const fs::path cfg = temp_file(
        "tnd_cli_disc.json",
        R"({"estimate":{"learner":"l1_basis","estimators":["tnddr"],"j_folds":2}})");
    const CliResult r =
        run("estimate " + data.string() + " --seed 6 --format csv --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    double psi = -1, se_log = -1;
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line)) {
        std::sscanf(line.c_str(), "tnddr.psi_mrr=%lf", &psi);
        std::sscanf(line.c_str(), "tnddr.se_log_mrr=%lf", &se_log);
    }
    REQUIRE(psi > 0);
    REQUIRE(se_log > 0);
    const double se_psi = psi * se_log; // delta method on the log scale
    CHECK(std::fabs(psi - tables.psi_mrr_tnd) <= 2.0 * se_psi);
    fs::remove(data);
    fs::remove(cfg);
}

TEST_CASE("numerical failures exit with code 4") {
    // both arms and both outcomes present, but no cases with v=0: the IPW
    // denominator arm is exactly zero
    std::ostringstream csv;
    csv << "c,v,y\n";
    for (int i = 0; i < 30; ++i) csv << (i % 3) << ",1," << (i % 2) << "\n";
    for (int i = 0; i < 30; ++i) csv << (i % 3) << ",0,0\n";
    const fs::path data = temp_file("tnd_cli_numfail.csv", csv.str());
    const fs::path cfg = temp_file("tnd_cli_numfail.json",
                                   R"({"estimate":{"learner":"glm","estimators":["ipw"],"j_folds":1}})");
    const CliResult r = run("estimate " + data.string() + " --config " + cfg.string());
    CHECK(r.exit_code == 4);
    fs::remove(data);
    fs::remove(cfg);
}

TEST_CASE("oracle-check passes by default and fails under fault injection") {
    const CliResult ok = run("oracle-check");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("PASS oracle checks") != std::string::npos);

    const CliResult bad = run("oracle-check --inject-fault");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("quebec schema ingestion") {
    std::ostringstream csv;
    csv << "age_group,sex,multimorbidity,epi_week,v,y\n";
    const char* ages[] = {"60-69", "70-79", "80-89", "90+"};
    for (int i = 0; i < 400; ++i) {
        csv << ages[i % 4] << ',' << (i % 2 ? "Female" : "Male") << ',' << (i % 3 ? "Yes" : "No")
            << ',' << (27 + i % 18) << ',' << ((i * 7 + i / 5) % 3 == 0 ? 1 : 0) << ','
            << (i % 11 == 0 ? 1 : 0) << "\n";
    }
    const fs::path data = temp_file("tnd_cli_quebec.csv", csv.str());
    const fs::path cfg = temp_file("tnd_cli_quebec.json",
                                   R"({"schema":"quebec","estimate":{"learner":"glm",
            "estimators":["tnddr"],"j_folds":1}})");
    const CliResult r =
        run("estimate " + data.string() + " --config " + cfg.string() + " --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("tnddr.psi_mrr=") != std::string::npos);
    fs::remove(data);
    fs::remove(cfg);
}
