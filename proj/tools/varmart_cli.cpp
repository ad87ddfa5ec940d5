// varmart: experiments on path variation, stopping times, and dyadic
// martingale weights.  Subcommands emit one JSON document per run (or a CSV
// row dump with --format csv).  Exit codes: 0 success, 1 property violation
// detected, 2 usage or parameter error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "varmart/core.hpp"
#include "varmart/dyadic.hpp"
#include "varmart/experiment.hpp"
#include "varmart/lepingle.hpp"
#include "varmart/rng.hpp"
#include "varmart/simulate.hpp"
#include "varmart/variation.hpp"

namespace {

using nlohmann::json;
namespace vm = varmart;

// --seed wins over the VARMART_SEED environment variable; the source is
// echoed into every report so runs stay attributable.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value,
                           std::string& source) {
    if (seed_opt != nullptr && seed_opt->count() > 0) {
        source = "flag";
        return flag_value;
    }
    if (const char* env = std::getenv("VARMART_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw std::invalid_argument("VARMART_SEED is not a valid unsigned integer: '" +
                                        std::string(env) + "'");
        source = "env";
        return static_cast<std::uint64_t>(v);
    }
    source = "default";
    return 0;
}

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_file);
    if (!out) throw std::invalid_argument("cannot open output file '" + out_file + "'");
    out << text;
}

void emit_report(const vm::cli::ExperimentReport& rep, const std::string& format,
                 const std::string& out_file) {
    if (format == "csv")
        emit(rep.to_csv(), out_file);
    else
        emit(rep.to_json().dump(2) + "\n", out_file);
}

vm::core::Path load_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open path file '" + file + "'");
    return vm::core::read_path_csv(in);
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string out_file;
    std::string format = "json";
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    opts.seed_opt = sub->add_option("--seed", opts.seed,
                                    "Master seed (default: VARMART_SEED env var, else 0)");
    sub->add_option("--out", opts.out_file, "Write the report to this file instead of stdout");
    sub->add_option("--format", opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Path variation, greedy stopping times, and weighted dyadic martingale "
        "experiments"};
    app.require_subcommand(1);

    // --- variation ---
    std::string var_file;
    double var_r = 2.0;
    bool var_oracle = false;
    CommonOpts var_common;
    CLI::App* var = app.add_subcommand(
        "variation", "Exact V^r of a CSV path with its optimal index partition");
    var->add_option("file", var_file, "CSV path file, one row per time index")->required();
    var->add_option("--r", var_r, "Variation exponent r > 0")->required();
    var->add_flag("--oracle", var_oracle,
                  "Cross-check against the exhaustive oracle (paths of at most 16 points)");
    var->add_option("--out", var_common.out_file, "Write the result to this file");

    // --- check-domination ---
    vm::cli::CheckDominationParams dom_params;
    CommonOpts dom_common;
    CLI::App* dom = app.add_subcommand(
        "check-domination",
        "Verify the pathwise variation bounds on simulated paths");
    dom->add_option("--kind", dom_params.kind,
                    "Path kind: gaussian-walk | rademacher-walk | "
                    "gaussian-walk-euclid-<d> | constant-path")
        ->capture_default_str();
    dom->add_option("--n", dom_params.n, "Walk step count")->capture_default_str();
    dom->add_option("--replicates", dom_params.replicates, "Number of replicate paths")
        ->capture_default_str();
    dom->add_option("--rho", dom_params.rho, "Inner exponent rho > 0")->capture_default_str();
    dom->add_option("--r", dom_params.r, "Variation exponent r > rho")->capture_default_str();
    add_common(dom, dom_common);

    // --- qp ---
    std::string qp_weight_file, qp_weight_spec;
    int qp_depth = 8;
    double qp_p = 2.0;
    bool qp_oracle = false;
    CommonOpts qp_common;
    CLI::App* qp = app.add_subcommand(
        "qp", "Martingale A_p characteristic Q_p of a dyadic weight");
    CLI::Option* qp_file_opt =
        qp->add_option("--weight-file", qp_weight_file, "CSV weight file, one leaf per row");
    CLI::Option* qp_spec_opt =
        qp->add_option("--weight", qp_weight_spec,
                       "Weight spec: ones | power:<alpha> | random:<spread>");
    qp_file_opt->excludes(qp_spec_opt);
    qp->add_option("--depth", qp_depth, "Tree depth for --weight specs")->capture_default_str();
    qp->add_option("--p", qp_p, "Exponent p in (1, infinity)")->required();
    qp->add_flag("--oracle", qp_oracle,
                 "Cross-check against stopping-time enumeration (depth at most 3)");
    qp->add_option("--out", qp_common.out_file, "Write the result to this file");
    qp_common.seed_opt = qp->add_option(
        "--seed", qp_common.seed, "Seed for random:<spread> weights (default: VARMART_SEED, else 0)");

    // --- lepingle-ratio ---
    vm::cli::LepingleRatioParams lep_params;
    CommonOpts lep_common;
    CLI::App* lep = app.add_subcommand(
        "lepingle-ratio",
        "Normalized ||V^r X|| / ||X|| ratios over random dyadic martingales");
    lep->add_option("--depth", lep_params.depth, "Tree depth (at most 14)")->capture_default_str();
    lep->add_option("--p", lep_params.p, "Norm exponent p in (1, infinity)")->capture_default_str();
    lep->add_option("--r", lep_params.r, "Variation exponent r > 2")->required();
    lep->add_option("--weight", lep_params.weight,
                    "Weight spec: ones | power:<alpha> | random:<spread>")
        ->capture_default_str();
    lep->add_option("--replicates", lep_params.replicates, "Number of replicate martingales")
        ->capture_default_str();
    add_common(lep, lep_common);

    // --- growth-scan ---
    vm::cli::GrowthScanParams scan_params;
    CommonOpts scan_common;
    CLI::App* scan = app.add_subcommand(
        "growth-scan",
        "Tabulate normalized variation ratios over a grid of exponents r");
    scan->add_option("--depth", scan_params.depth, "Tree depth (at most 14)")
        ->capture_default_str();
    scan->add_option("--p", scan_params.p, "Norm exponent p in (1, infinity)")
        ->capture_default_str();
    scan->add_option("--r-grid", scan_params.r_grid, "Grid of exponents r > 2")
        ->required()
        ->delimiter(',')
        ->expected(-1);
    scan->add_option("--weights", scan_params.weights,
                     "Weight specs (ones | power:<alpha> | random:<spread>)")
        ->delimiter(',')
        ->expected(-1)
        ->capture_default_str();
    scan->add_option("--replicates", scan_params.replicates, "Number of replicate martingales")
        ->capture_default_str();
    scan->add_option("--budget", scan_params.budget,
                     "Bound asserted on the theorem-normalized ratio column")
        ->capture_default_str();
    add_common(scan, scan_common);

    // --- loglog-lowerbound ---
    vm::cli::LoglogParams loglog_params;
    CommonOpts loglog_common;
    CLI::App* loglog = app.add_subcommand(
        "loglog-lowerbound",
        "Fraction of Gaussian walks with (V^2 X)^2 >= c N log log N per grid N");
    loglog->add_option("--n-grid", loglog_params.n_grid, "Walk lengths N (each at least 16)")
        ->delimiter(',')
        ->expected(-1)
        ->capture_default_str();
    loglog->add_option("--c", loglog_params.c, "Constant c < 1/12")->capture_default_str();
    loglog->add_option("--replicates", loglog_params.replicates, "Replicates per grid point")
        ->capture_default_str();
    add_common(loglog, loglog_common);

    // --- holder-chain ---
    vm::cli::HolderChainParams holder_params;
    CommonOpts holder_common;
    CLI::App* holder = app.add_subcommand(
        "holder-chain", "Check V^2 <= N^{1/2-1/r} V^r over an ensemble of walks");
    holder->add_option("--kind", holder_params.kind,
                       "Path kind: gaussian-walk | rademacher-walk | "
                       "gaussian-walk-euclid-<d> | constant-path")
        ->capture_default_str();
    holder->add_option("--n", holder_params.n, "Walk step count")->capture_default_str();
    holder->add_option("--r-grid", holder_params.r_grid, "Exponents r > 2")
        ->delimiter(',')
        ->expected(-1)
        ->capture_default_str();
    holder->add_option("--replicates", holder_params.replicates, "Number of replicate paths")
        ->capture_default_str();
    add_common(holder, holder_common);

    try {
        app.parse(argc, argv);

        if (app.got_subcommand(var)) {
            const vm::core::Path path = load_path_csv(var_file);
            const vm::variation::VariationResult res = vm::variation::variation_dp(path, var_r);
            json out = vm::cli::variation_result_json(res);
            int exit_code = 0;
            if (var_oracle) {
                if (path.length() > 16)
                    throw std::invalid_argument(
                        "--oracle needs a path of at most 16 points (got " +
                        std::to_string(path.length()) + ")");
                const double oracle = vm::variation::variation_bruteforce(path, var_r);
                const bool agrees =
                    std::fabs(res.value - oracle) <= 1e-12 * std::max(1.0, oracle);
                out["oracle_value"] = oracle;
                out["oracle_agrees"] = agrees;
                if (!agrees) exit_code = 1;
            }
            emit(out.dump(2) + "\n", var_common.out_file);
            return exit_code;
        }

        if (app.got_subcommand(qp)) {
            std::string source;
            const std::uint64_t seed = resolve_seed(qp_common.seed_opt, qp_common.seed, source);
            vm::dyadic::DyadicWeight weight;
            json weight_echo;
            if (!qp_weight_file.empty()) {
                std::ifstream in(qp_weight_file);
                if (!in)
                    throw std::invalid_argument("cannot open weight file '" + qp_weight_file +
                                                "'");
                weight = vm::dyadic::weight_from_leaves(vm::dyadic::read_leaves_csv(in));
                weight_echo = {{"weight_file", qp_weight_file}, {"depth", weight.depth}};
            } else if (!qp_weight_spec.empty()) {
                const vm::cli::WeightSpec spec = vm::cli::parse_weight_spec(qp_weight_spec);
                weight = vm::cli::make_weight(spec, qp_depth, seed);
                weight_echo = {{"weight", qp_weight_spec},
                               {"depth", qp_depth},
                               {"seed", seed},
                               {"seed_source", source}};
            } else {
                throw std::invalid_argument("qp: pass --weight-file or --weight");
            }
            const vm::dyadic::QpResult res = vm::dyadic::qp_characteristic(weight, qp_p);
            json out = vm::cli::qp_result_json(res);
            out["input"] = weight_echo;
            int exit_code = 0;
            if (qp_oracle) {
                if (weight.depth > 3)
                    throw std::invalid_argument("--oracle needs depth at most 3 (got " +
                                                std::to_string(weight.depth) + ")");
                const double oracle = vm::dyadic::qp_bruteforce(weight, qp_p);
                const bool agrees = std::fabs(res.value - oracle) <= 1e-10 * oracle;
                out["oracle_value"] = oracle;
                out["oracle_agrees"] = agrees;
                if (!agrees) exit_code = 1;
            }
            emit(out.dump(2) + "\n", qp_common.out_file);
            return exit_code;
        }

        if (app.got_subcommand(dom)) {
            std::string source;
            dom_params.seed = resolve_seed(dom_common.seed_opt, dom_common.seed, source);
            vm::cli::ExperimentReport rep = vm::cli::run_check_domination(dom_params);
            rep.params["seed_source"] = source;
            emit_report(rep, dom_common.format, dom_common.out_file);
            return rep.exit_code;
        }

        if (app.got_subcommand(lep)) {
            std::string source;
            lep_params.seed = resolve_seed(lep_common.seed_opt, lep_common.seed, source);
            vm::cli::ExperimentReport rep = vm::cli::run_lepingle_ratio(lep_params);
            rep.params["seed_source"] = source;
            emit_report(rep, lep_common.format, lep_common.out_file);
            return rep.exit_code;
        }

        if (app.got_subcommand(scan)) {
            std::string source;
            scan_params.seed = resolve_seed(scan_common.seed_opt, scan_common.seed, source);
            vm::cli::ExperimentReport rep = vm::cli::run_growth_scan(scan_params);
            rep.params["seed_source"] = source;
            emit_report(rep, scan_common.format, scan_common.out_file);
            return rep.exit_code;
        }

        if (app.got_subcommand(loglog)) {
            std::string source;
            loglog_params.seed = resolve_seed(loglog_common.seed_opt, loglog_common.seed, source);
            vm::cli::ExperimentReport rep = vm::cli::run_loglog_lowerbound(loglog_params);
            rep.params["seed_source"] = source;
            emit_report(rep, loglog_common.format, loglog_common.out_file);
            return rep.exit_code;
        }

        if (app.got_subcommand(holder)) {
            std::string source;
            holder_params.seed = resolve_seed(holder_common.seed_opt, holder_common.seed, source);
            vm::cli::ExperimentReport rep = vm::cli::run_holder_chain(holder_params);
            rep.params["seed_source"] = source;
            emit_report(rep, holder_common.format, holder_common.out_file);
            return rep.exit_code;
        }

        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
