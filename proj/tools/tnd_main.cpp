#include "tndkit/config.hpp"
#include "tndkit/csv.hpp"
#include "tndkit/discrete.hpp"
#include "tndkit/errors.hpp"
#include "tndkit/estimators.hpp"
#include "tndkit/mc.hpp"
#include "tndkit/oracle.hpp"
#include "tndkit/rng.hpp"
#include "tndkit/stats.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace tndkit;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNumericalError = 4;

struct Args {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    int threads = 1;
    std::string format = "table";
    std::string preset;

    // per-command extras
    std::optional<std::size_t> n;
    bool full_population = false;
    std::optional<std::size_t> n_pop;
    std::string data_path;
    std::string schema;
    std::string oracle_file;
    bool inject_fault = false;
};

void add_common_flags(CLI::App* cmd, Args& args) {
    cmd->add_option("--config", args.config_path, "JSON config document for this run");
    cmd->add_option("--seed", args.seed, "seed override (applies to dgp, study, estimate)");
    cmd->add_option("--out", args.out_path, "output file (or directory for mc-study)");
    cmd->add_option("--threads", args.threads, "worker threads")
        ->envname("TNDKIT_THREADS")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", args.format, "report format")->check(CLI::IsMember({"csv", "table"}));
    cmd->add_option("--preset", args.preset,
                    "named preset (study1-b025, study1-b05, study2, appendix-II, appendix-III)");
}

RunConfig resolve_config(const Args& args) {
    std::string text = "{}";
    if (!args.config_path.empty()) {
        std::ifstream is(args.config_path);
        if (!is) throw ConfigError("cannot open config file: " + args.config_path);
        std::ostringstream buf;
        buf << is.rdbuf();
        text = buf.str();
    }
    if (!args.preset.empty()) {
        // Inject the CLI preset; an explicit preset in the document wins.
        RunConfig probe = parse_run_config(text);
        if (probe.preset.empty()) {
            const std::size_t brace = text.find('{');
            if (brace == std::string::npos) throw ConfigError("config must be a JSON object");
            const bool empty_obj = text.find_first_not_of(" \t\r\n", brace + 1) != std::string::npos &&
                                   text[text.find_first_not_of(" \t\r\n", brace + 1)] == '}';
            text.insert(brace + 1, "\"preset\":\"" + args.preset + "\"" + (empty_obj ? "" : ","));
        }
    }
    RunConfig cfg = parse_run_config(text);
    if (args.seed) {
        cfg.dgp.seed = *args.seed;
        cfg.study.seed = *args.seed;
        cfg.estimate.seed = *args.seed;
    }
    if (args.n) cfg.simulate_n = *args.n;
    if (args.full_population) cfg.full_population = true;
    if (args.n_pop) cfg.truth_n_pop = *args.n_pop;
    if (!args.schema.empty()) cfg.schema = args.schema;
    cfg.study.dgp = cfg.dgp;
    cfg.study.threads = args.threads;
    return cfg;
}

std::ostream& open_out(const Args& args, std::ofstream& file) {
    if (args.out_path.empty()) return std::cout;
    file.open(args.out_path);
    if (!file) throw SchemaError("cannot open for writing: " + args.out_path);
    return file;
}

int cmd_simulate(const Args& args) {
    const RunConfig cfg = resolve_config(args);
    std::ofstream file;
    std::ostream& os = open_out(args, file);
    if (cfg.full_population) {
        write_population_csv(generate_population(cfg.dgp, cfg.simulate_n, args.threads), os);
    } else {
        write_dataset_csv(
            simulate_tnd_dataset(cfg.dgp, cfg.simulate_n, cfg.study.max_pop_per_rep, args.threads),
            os);
    }
    return kExitOk;
}

int cmd_truth(const Args& args) {
    const RunConfig cfg = resolve_config(args);
    const TruthResult t = truth_mrr_monte_carlo(cfg.dgp, cfg.truth_n_pop, args.threads);
    std::ofstream file;
    std::ostream& os = open_out(args, file);
    os << "psi_mrr=" << format_double(t.psi_mrr) << "\n"
       << "mc_se=" << format_double(t.mc_se) << "\n"
       << "psi_v1=" << format_double(t.psi_v1) << "\n"
       << "psi_v0=" << format_double(t.psi_v0) << "\n"
       << "n_pop=" << cfg.truth_n_pop << "\n";
    return kExitOk;
}

void print_estimate_kv(std::ostream& os, const std::vector<EstimatorOutput>& outputs,
                       std::size_t n, std::size_t cases) {
    os << "n=" << n << "\ncases=" << cases << "\ncontrols=" << (n - cases) << "\n";
    for (const EstimatorOutput& out : outputs) {
        const std::string& p = out.method;
        os << p << ".psi_mrr=" << format_double(out.psi_mrr) << "\n"
           << p << ".psi_v1=" << format_double(out.psi_v1) << "\n"
           << p << ".psi_v0=" << format_double(out.psi_v0) << "\n"
           << p << ".ve=" << format_double(out.ve) << "\n";
        if (out.se_log_mrr) os << p << ".se_log_mrr=" << format_double(*out.se_log_mrr) << "\n";
        if (out.ci_mrr) {
            os << p << ".ci_lower=" << format_double(out.ci_mrr->lower) << "\n"
               << p << ".ci_upper=" << format_double(out.ci_mrr->upper) << "\n";
        }
        // Variance diagnostics: the centered moment backs the intervals, the
        // uncentered one is printed alongside for comparison.
        std::vector<double> c1(out.influence_v1), c0(out.influence_v0);
        for (double& x : c1) x -= out.psi_v1;
        for (double& x : c0) x -= out.psi_v0;
        os << p << ".var_phi_v1_centered=" << format_double(phi_second_moment(c1)) << "\n"
           << p << ".var_phi_v1_uncentered=" << format_double(phi_second_moment(out.influence_v1))
           << "\n"
           << p << ".var_phi_v0_centered=" << format_double(phi_second_moment(c0)) << "\n"
           << p << ".var_phi_v0_uncentered=" << format_double(phi_second_moment(out.influence_v0))
           << "\n";
    }
}

void print_estimate_table(std::ostream& os, const std::vector<EstimatorOutput>& outputs,
                          std::size_t n, std::size_t cases) {
    os << "n=" << n << " cases=" << cases << " controls=" << (n - cases) << "\n";
    os << std::left << std::setw(8) << "method" << std::setw(11) << "psi_mrr" << std::setw(11)
       << "ve" << std::setw(22) << "ci_mrr" << "se_log\n";
    for (const EstimatorOutput& out : outputs) {
        std::ostringstream ci;
        if (out.ci_mrr) {
            ci << std::setprecision(4) << "(" << out.ci_mrr->lower << ", " << out.ci_mrr->upper
               << ")";
        } else {
            ci << "-";
        }
        os << std::left << std::setw(8) << out.method << std::setw(11) << std::setprecision(4)
           << out.psi_mrr << std::setw(11) << out.ve << std::setw(22) << ci.str();
        if (out.se_log_mrr) {
            os << std::setprecision(4) << *out.se_log_mrr;
        } else {
            os << "-";
        }
        os << "\n";
    }
}

int cmd_estimate(const Args& args) {
    const RunConfig cfg = resolve_config(args);
    const TndDataset data = read_dataset_csv(args.data_path, cfg.schema);

    const EstimateConfig& est = cfg.estimate;
    const NuisanceSpec spec = est.nuisance_spec();
    const FoldAssignment folds = est.j_folds > 1
                                     ? split_folds(data.size(), est.j_folds, est.seed)
                                     : FoldAssignment::single(data.size());
    const NuisanceEstimates nuis = estimate_nuisances(data, spec, folds, est.seed);

    std::vector<EstimatorOutput> outputs;
    for (const std::string& name : est.estimators) {
        if (name == "tnddr") {
            outputs.push_back(tnddr_estimate(data, nuis, est.alpha));
        } else if (name == "ipw") {
            outputs.push_back(ipw_mrr(data, nuis, est.alpha));
        } else if (name == "outreg") {
            EstimatorOutput out = outreg_mrr(data, nuis, est.alpha);
            if (est.bootstrap > 0) {
                out.ci_mrr = outreg_bootstrap_ci(data, spec, est.j_folds, est.alpha, est.bootstrap,
                                                 derive_seed(est.seed, 0x6f62ULL), args.threads);
            }
            outputs.push_back(std::move(out));
        } else {
            throw ConfigError("unknown estimator: " + name);
        }
    }
    std::size_t cases = 0;
    for (const TndRecord& r : data.records) cases += static_cast<std::size_t>(r.y);

    std::ofstream file;
    std::ostream& os = open_out(args, file);
    if (args.format == "csv") {
        print_estimate_kv(os, outputs, data.size(), cases);
    } else {
        print_estimate_table(os, outputs, data.size(), cases);
    }
    return kExitOk;
}

std::string summary_csv(const McSummary& summary) {
    std::ostringstream os;
    os << "estimator,scenario,n,mean_bias,mc_se,coverage,failures\n";
    for (const McRow& row : summary.rows) {
        os << row.estimator << ',' << row.scenario << ',' << row.n << ','
           << format_double(row.mean_bias) << ',' << format_double(row.mc_se) << ',';
        if (row.coverage) os << format_double(*row.coverage);
        os << ',' << row.failures << '\n';
    }
    return os.str();
}

std::string reps_csv(const McSummary& summary) {
    std::ostringstream os;
    os << "estimator,scenario,n,rep,psi_mrr,ci_lower,ci_upper,failed,failure\n";
    for (const RepRecord& r : summary.rep_records) {
        os << r.estimator << ',' << r.scenario << ',' << r.n << ',' << r.rep << ','
           << (r.failed ? "" : format_double(r.psi_mrr)) << ',';
        if (r.ci) os << format_double(r.ci->lower);
        os << ',';
        if (r.ci) os << format_double(r.ci->upper);
        os << ',' << (r.failed ? 1 : 0) << ',' << r.failure << '\n';
    }
    return os.str();
}

void print_study_table(std::ostream& os, const McSummary& summary) {
    os << "truth psi_mrr = " << format_double(summary.truth) << "\n";
    os << std::left << std::setw(10) << "estimator" << std::setw(10) << "scenario" << std::setw(7)
       << "n" << std::setw(11) << "mean_bias" << std::setw(9) << "mc_se" << std::setw(10)
       << "coverage" << "failures\n";
    for (const McRow& row : summary.rows) {
        os << std::left << std::setw(10) << row.estimator << std::setw(10) << row.scenario
           << std::setw(7) << row.n << std::setw(11) << std::setprecision(4) << row.mean_bias
           << std::setw(9) << row.mc_se << std::setw(10);
        if (row.coverage) {
            os << *row.coverage * 100.0;
        } else {
            os << "-";
        }
        os << row.failures << "\n";
    }
}

int cmd_mc_study(const Args& args) {
    const RunConfig cfg = resolve_config(args);
    if (cfg.study_mode == "convergence") {
        const ConvergenceResult result = convergence_experiment(cfg.study);
        std::ostringstream body;
        body << "truth=" << format_double(result.truth) << "\n";
        body << "estimator,n,rmse,mean_bias,failures\n";
        for (const ConvergenceRow& row : result.rows) {
            body << row.estimator << ',' << row.n << ',' << format_double(row.rmse) << ','
                 << format_double(row.mean_bias) << ',' << row.failures << '\n';
        }
        for (const auto& [est, slope] : result.slope) {
            body << "slope," << est << ','
                 << (slope ? format_double(*slope) : std::string("undefined")) << ",,\n";
        }
        std::ofstream file;
        std::ostream& os = open_out(args, file);
        os << body.str();
        return kExitOk;
    }
    const McSummary summary = run_study(cfg.study);
    if (!args.out_path.empty()) {
        std::ofstream sfile(args.out_path + "/summary.csv");
        if (!sfile) throw SchemaError("cannot open for writing: " + args.out_path + "/summary.csv");
        sfile << summary_csv(summary);
        std::ofstream rfile(args.out_path + "/reps.csv");
        if (!rfile) throw SchemaError("cannot open for writing: " + args.out_path + "/reps.csv");
        rfile << reps_csv(summary);
    }
    if (args.format == "csv") {
        std::cout << summary_csv(summary);
    } else {
        print_study_table(std::cout, summary);
    }
    return kExitOk;
}

int cmd_oracle_check(const Args& args) {
    if (!args.oracle_file.empty()) {
        const auto rows = read_population_csv(args.oracle_file);
        std::size_t bad = 0;
        for (const FullPopulationRow& r : rows) {
            const bool ok = (r.w == 0 || r.i1 == 1 || r.i2 == 1) && (r.h == 0 || r.w == 1) &&
                            (r.y == 0 || r.s == 1);
            bad += ok ? 0 : 1;
        }
        std::cout << "rows=" << rows.size() << "\ngating_violations=" << bad << "\n"
                  << (bad == 0 ? "PASS" : "FAIL") << " gating invariants\n";
        return bad == 0 ? kExitOk : kExitCheckFailed;
    }

    DiscreteDgp dgp;
    if (!args.config_path.empty() || !args.preset.empty()) {
        const RunConfig cfg = resolve_config(args);
        DgpConfig dc = cfg.dgp;
        dc.h_v = 0.0; // the discrete oracle keeps the control path free of V
        dgp = DiscreteDgp(dc);
    }
    const ExactTables tables = enumerate_discrete(dgp);
    const auto checks = run_oracle_checks(dgp, args.inject_fault);
    bool all_pass = true;
    for (const OracleCheck& c : checks) {
        all_pass = all_pass && c.pass;
        std::cout << (c.pass ? "PASS" : "FAIL") << " " << c.name
                  << " value=" << format_double(c.value) << " (" << c.detail << ")\n";
    }
    std::cout << "max_weight_deviation_from_one="
              << format_double(max_weight_deviation_from_one(tables)) << "\n"
              << "q0=" << format_double(tables.q0) << "\n"
              << (all_pass ? "PASS" : "FAIL") << " oracle checks\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"test-negative-design vaccine-effectiveness estimation toolkit"};
    app.require_subcommand(1);
    Args args;

    CLI::App* simulate = app.add_subcommand("simulate", "simulate a TND dataset (CSV)");
    add_common_flags(simulate, args);
    simulate->add_option("--n", args.n, "rows to emit (TND records, or population rows with --full-population)");
    simulate->add_flag("--full-population", args.full_population, "emit full population rows");

    CLI::App* truth = app.add_subcommand("truth", "Monte-Carlo truth for the marginal risk ratio");
    add_common_flags(truth, args);
    truth->add_option("--n-pop", args.n_pop, "population draws for the oracle");

    CLI::App* estimate = app.add_subcommand("estimate", "estimate VE from a dataset CSV");
    add_common_flags(estimate, args);
    estimate->add_option("data", args.data_path, "input dataset CSV")->required();
    estimate->add_option("--schema", args.schema, "input schema (generic or quebec)");

    CLI::App* mc = app.add_subcommand("mc-study", "replication study / convergence experiment");
    add_common_flags(mc, args);

    CLI::App* oracle = app.add_subcommand("oracle-check", "enumeration-oracle diagnostics");
    add_common_flags(oracle, args);
    oracle->add_option("--file", args.oracle_file, "check gating invariants of a full-population CSV");
    oracle->add_flag("--inject-fault", args.inject_fault,
                     "swap propensity arms to demonstrate failure detection");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (truth->parsed()) return cmd_truth(args);
        if (estimate->parsed()) return cmd_estimate(args);
        if (mc->parsed()) return cmd_mc_study(args);
        if (oracle->parsed()) return cmd_oracle_check(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const SchemaError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitConfigError;
}
