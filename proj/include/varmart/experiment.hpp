#pragma once

// Experiment runners behind the CLI subcommands.  Every runner is a pure
// function of its parameters: replicate k draws from substream_seed(seed, k)
// (or the documented 2k/2k+1 split when a replicate needs both a martingale
// and a weight), rows are assembled in replicate order, and reports
// re-serialize byte-identically on re-runs except for the wall_time_ms field.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "varmart/core.hpp"
#include "varmart/dyadic.hpp"
#include "varmart/lepingle.hpp"
#include "varmart/rng.hpp"
#include "varmart/simulate.hpp"
#include "varmart/variation.hpp"

namespace varmart::cli {

using nlohmann::json;

// ===== Reports =====

struct ExperimentReport {
    std::string command;
    json params = json::object();
    json rows = json::array();
    json aggregates = json::object();
    double wall_time_ms = 0.0;
    int exit_code = 0;  // 0 clean, 1 property violation detected

    json to_json() const {
        return json{{"command", command},
                    {"params", params},
                    {"rows", rows},
                    {"aggregates", aggregates},
                    {"wall_time_ms", wall_time_ms}};
    }

    // Row dump only; one line per replicate row, columns sorted by key.
    std::string to_csv() const {
        std::ostringstream out;
        if (rows.empty()) return out.str();
        bool first = true;
        for (const auto& [key, value] : rows.front().items()) {
            (void)value;
            if (!first) out << ',';
            out << key;
            first = false;
        }
        out << '\n';
        for (const json& row : rows) {
            first = true;
            for (const auto& [key, value] : row.items()) {
                (void)key;
                if (!first) out << ',';
                if (value.is_string())
                    out << value.get<std::string>();
                else
                    out << value.dump();
                first = false;
            }
            out << '\n';
        }
        return out.str();
    }
};

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// ===== Weight specs =====
//
// Textual weight families used by the dyadic experiments:
//   "ones"            constant weight 1
//   "power:<alpha>"   leaf i gets ((i+1/2)/2^depth)^alpha, alpha > -1
//   "random:<spread>" i.i.d. log-uniform on [1/spread, spread], needs a seed

struct WeightSpec {
    enum class Kind { Ones, Power, Random } kind = Kind::Ones;
    double param = 0.0;
    std::string text = "ones";
};

inline WeightSpec parse_weight_spec(const std::string& text) {
    WeightSpec spec;
    spec.text = text;
    if (text == "ones") {
        spec.kind = WeightSpec::Kind::Ones;
        return spec;
    }
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string head = text.substr(0, colon);
        const std::string tail = text.substr(colon + 1);
        try {
            spec.param = std::stod(tail);
        } catch (const std::exception&) {
            throw std::invalid_argument("weight spec '" + text + "': bad parameter");
        }
        if (head == "power") {
            if (!(spec.param > -1.0))
                throw std::invalid_argument("weight spec '" + text + "': alpha must be > -1");
            spec.kind = WeightSpec::Kind::Power;
            return spec;
        }
        if (head == "random") {
            if (!(spec.param >= 1.0))
                throw std::invalid_argument("weight spec '" + text + "': spread must be >= 1");
            spec.kind = WeightSpec::Kind::Random;
            return spec;
        }
    }
    throw std::invalid_argument("weight spec '" + text +
                                "': expected ones | power:<alpha> | random:<spread>");
}

inline dyadic::DyadicWeight make_weight(const WeightSpec& spec, int depth, std::uint64_t seed) {
    switch (spec.kind) {
        case WeightSpec::Kind::Ones:
            return simulate::dyadic_power_weight(depth, 0.0);
        case WeightSpec::Kind::Power:
            return simulate::dyadic_power_weight(depth, spec.param);
        case WeightSpec::Kind::Random:
            return simulate::random_ap_weight(depth, spec.param, seed);
    }
    throw std::logic_error("make_weight: unreachable");
}

// ===== check-domination =====

struct CheckDominationParams {
    std::string kind = "gaussian-walk";
    std::size_t n = 256;
    std::size_t replicates = 1000;
    double rho = 2.0;
    double r = 3.0;
    std::uint64_t seed = 0;
};

inline ExperimentReport run_check_domination(const CheckDominationParams& p) {
    if (!(p.rho > 0.0) || !(p.r > p.rho))
        throw std::invalid_argument("check-domination: need 0 < rho < r");
    if (!simulate::is_path_kind(p.kind))
        throw std::invalid_argument("check-domination: unknown path kind '" + p.kind + "'");
    Stopwatch clock;
    ExperimentReport rep;
    rep.command = "check-domination";
    rep.params = {{"kind", p.kind}, {"n", p.n},       {"replicates", p.replicates},
                  {"rho", p.rho},   {"r", p.r},       {"seed", p.seed}};
    std::size_t violations = 0;
    std::size_t zero_lhs_rows = 0;
    double ratio_min = 0.0, ratio_max = 0.0, ratio_sum = 0.0;
    std::size_t ratio_count = 0;
    for (std::size_t k = 0; k < p.replicates; ++k) {
        const std::uint64_t sub = rng::substream_seed(p.seed, k);
        simulate::GeneratorSpec gen{.kind = p.kind, .n = p.n, .seed = sub};
        const core::Path path = simulate::generate_path(gen);
        const lepingle::DominationTerms terms = lepingle::domination_terms(path);
        const double vr = variation::variation_value(path, p.r);
        lepingle::DominationReport dom = lepingle::domination_rhs(path, terms, p.rho, p.r, vr);
        dom.seed = sub;
        const double full_rhs = lepingle::domination_full_rhs(path, terms, p.rho, p.r);
        const double full_lhs = variation::pow_dist(vr, p.r);
        const bool full_holds = full_lhs <= full_rhs * (1.0 + 1e-9);
        if (!dom.holds || !full_holds) ++violations;
        json row{{"replicate", k},
                 {"seed", sub},
                 {"path_length", dom.path_length},
                 {"rho", dom.rho},
                 {"r", dom.r},
                 {"lhs", dom.lhs},
                 {"rhs", dom.rhs},
                 {"m_star", dom.m_star},
                 {"holds", dom.holds},
                 {"full_lhs", full_lhs},
                 {"full_rhs", full_rhs},
                 {"full_holds", full_holds}};
        if (dom.lhs > 0.0) {
            const double ratio = dom.rhs / dom.lhs;
            row["rhs_over_lhs"] = ratio;
            if (ratio_count == 0 || ratio < ratio_min) ratio_min = ratio;
            if (ratio_count == 0 || ratio > ratio_max) ratio_max = ratio;
            ratio_sum += ratio;
            ++ratio_count;
        } else {
            row["rhs_over_lhs"] = nullptr;
            ++zero_lhs_rows;
        }
        rep.rows.push_back(std::move(row));
    }
    rep.aggregates = {{"violations", violations},
                      {"zero_lhs_rows", zero_lhs_rows},
                      {"rhs_over_lhs_min", ratio_count ? json(ratio_min) : json(nullptr)},
                      {"rhs_over_lhs_max", ratio_count ? json(ratio_max) : json(nullptr)},
                      {"rhs_over_lhs_mean",
                       ratio_count ? json(ratio_sum / static_cast<double>(ratio_count))
                                   : json(nullptr)}};
    rep.exit_code = violations ? 1 : 0;
    rep.wall_time_ms = clock.ms();
    return rep;
}

// ===== lepingle-ratio =====

struct LepingleRatioParams {
    int depth = 10;
    double p = 2.0;
    double r = 3.0;
    std::string weight = "ones";
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
};

// Normalized ratio for one martingale/weight draw:
//   || V^r X ||_{L^p(w)} / ( sqrt(r/(r-2)) * Q_p(w)^{max(1,1/(p-1))} * ||X||_{L^p(w)} ).
inline double leaf_variation_ratio(const dyadic::DyadicTree& tree,
                                   const dyadic::DyadicWeight& weight, double p, double r,
                                   double growth_normalizer, double* norm_vr_out = nullptr,
                                   double* norm_x_out = nullptr, double* qp_out = nullptr) {
    const std::size_t leaf_count = tree.leaves().size();
    std::vector<double> vr(leaf_count);
    for (std::size_t w = 0; w < leaf_count; ++w)
        vr[w] = variation::variation_value(dyadic::leaf_path(tree, w), r);
    const double norm_vr = dyadic::weighted_norm(vr, weight, p);
    const double norm_x = dyadic::weighted_norm(tree.leaves(), weight, p);
    const double qp = dyadic::qp_characteristic(weight, p).value;
    if (norm_vr_out) *norm_vr_out = norm_vr;
    if (norm_x_out) *norm_x_out = norm_x;
    if (qp_out) *qp_out = qp;
    if (norm_x == 0.0) {
        if (norm_vr > 0.0)
            throw std::logic_error("leaf_variation_ratio: ||V^r X|| > 0 with ||X|| = 0");
        return 0.0;
    }
    return norm_vr /
           (growth_normalizer * std::pow(qp, std::max(1.0, 1.0 / (p - 1.0))) * norm_x);
}

inline ExperimentReport run_lepingle_ratio(const LepingleRatioParams& p) {
    if (!(p.r > 2.0)) throw std::invalid_argument("lepingle-ratio: r must be > 2");
    if (!(p.p > 1.0) || !std::isfinite(p.p))
        throw std::invalid_argument("lepingle-ratio: p must lie in (1, infinity)");
    if (p.depth < 0 || p.depth > 14)
        throw std::invalid_argument("lepingle-ratio: depth must lie in [0, 14]");
    const WeightSpec wspec = parse_weight_spec(p.weight);
    Stopwatch clock;
    ExperimentReport rep;
    rep.command = "lepingle-ratio";
    rep.params = {{"depth", p.depth},           {"p", p.p},
                  {"r", p.r},                   {"weight", p.weight},
                  {"replicates", p.replicates}, {"seed", p.seed}};
    const double growth = std::sqrt(p.r / (p.r - 2.0));
    double max_ratio = 0.0, ratio_sum = 0.0;
    for (std::size_t k = 0; k < p.replicates; ++k) {
        const std::uint64_t tree_seed = rng::substream_seed(p.seed, 2 * k);
        const std::uint64_t weight_seed = rng::substream_seed(p.seed, 2 * k + 1);
        const dyadic::DyadicTree tree = simulate::dyadic_random_leaves(p.depth, tree_seed);
        const dyadic::DyadicWeight weight = make_weight(wspec, p.depth, weight_seed);
        double norm_vr = 0.0, norm_x = 0.0, qp = 0.0;
        const double ratio =
            leaf_variation_ratio(tree, weight, p.p, p.r, growth, &norm_vr, &norm_x, &qp);
        max_ratio = std::max(max_ratio, ratio);
        ratio_sum += ratio;
        rep.rows.push_back(json{{"replicate", k},
                                {"tree_seed", tree_seed},
                                {"weight_seed", weight_seed},
                                {"norm_vr", norm_vr},
                                {"norm_x", norm_x},
                                {"qp", qp},
                                {"normalized_ratio", ratio}});
    }
    rep.aggregates = {{"growth_factor", growth},
                      {"max_normalized_ratio", max_ratio},
                      {"mean_normalized_ratio",
                       p.replicates ? json(ratio_sum / static_cast<double>(p.replicates))
                                    : json(nullptr)}};
    rep.wall_time_ms = clock.ms();
    return rep;
}

// ===== growth-scan =====

struct GrowthScanParams {
    int depth = 10;
    double p = 2.0;
    std::vector<double> r_grid;
    std::vector<std::string> weights = {"ones", "power:0.3", "power:0.7", "random:4"};
    std::size_t replicates = 100;
    double budget = 100.0;
    std::uint64_t seed = 0;
};

inline ExperimentReport run_growth_scan(GrowthScanParams p) {
    if (p.r_grid.empty()) throw std::invalid_argument("growth-scan: empty r grid");
    for (double r : p.r_grid)
        if (!(r > 2.0)) throw std::invalid_argument("growth-scan: every grid r must be > 2");
    if (!(p.p > 1.0) || !std::isfinite(p.p))
        throw std::invalid_argument("growth-scan: p must lie in (1, infinity)");
    if (p.depth < 0 || p.depth > 14)
        throw std::invalid_argument("growth-scan: depth must lie in [0, 14]");
    if (p.weights.empty()) throw std::invalid_argument("growth-scan: no weight specs");
    if (p.replicates < 1) throw std::invalid_argument("growth-scan: need replicates >= 1");
    // The table is in ascending r; monotonicity statements refer to that order.
    std::sort(p.r_grid.begin(), p.r_grid.end());
    p.r_grid.erase(std::unique(p.r_grid.begin(), p.r_grid.end()), p.r_grid.end());
    std::vector<WeightSpec> wspecs;
    for (const std::string& w : p.weights) wspecs.push_back(parse_weight_spec(w));

    Stopwatch clock;
    ExperimentReport rep;
    rep.command = "growth-scan";
    rep.params = {{"depth", p.depth},         {"p", p.p},
                  {"r_grid", p.r_grid},       {"weights", p.weights},
                  {"replicates", p.replicates}, {"budget", p.budget},
                  {"seed", p.seed}};

    const std::size_t leaf_count = std::size_t{1} << p.depth;
    const std::size_t cells = p.replicates * wspecs.size();
    const double qexp = std::max(1.0, 1.0 / (p.p - 1.0));

    // Per grid point: max/mean over replicate x weight of the Q_p-normalized
    // ratio ||V^r X|| / (Q_p^qexp ||X||); the r-dependent normalizations are
    // applied per column afterwards.
    std::vector<double> q_ratio_max(p.r_grid.size(), 0.0);
    std::vector<double> q_ratio_sum(p.r_grid.size(), 0.0);
    std::vector<double> raw_max(p.r_grid.size(), 0.0);
    std::vector<double> raw_sum(p.r_grid.size(), 0.0);
    std::size_t replicate_monotone_violations = 0;

    std::vector<double> vr(leaf_count);
    for (std::size_t k = 0; k < p.replicates; ++k) {
        const std::uint64_t tree_seed = rng::substream_seed(p.seed, 2 * k);
        const std::uint64_t weight_block = rng::substream_seed(p.seed, 2 * k + 1);
        const dyadic::DyadicTree tree = simulate::dyadic_random_leaves(p.depth, tree_seed);
        std::vector<dyadic::DyadicWeight> weights;
        std::vector<double> qps;
        for (std::size_t i = 0; i < wspecs.size(); ++i) {
            weights.push_back(make_weight(wspecs[i], p.depth,
                                          rng::substream_seed(weight_block, i)));
            qps.push_back(dyadic::qp_characteristic(weights.back(), p.p).value);
        }
        std::vector<double> norm_x(wspecs.size());
        for (std::size_t i = 0; i < wspecs.size(); ++i)
            norm_x[i] = dyadic::weighted_norm(tree.leaves(), weights[i], p.p);

        std::vector<std::vector<double>> raw_by_weight(wspecs.size());
        for (std::size_t g = 0; g < p.r_grid.size(); ++g) {
            const double r = p.r_grid[g];
            for (std::size_t w = 0; w < leaf_count; ++w)
                vr[w] = variation::variation_value(dyadic::leaf_path(tree, w), r);
            for (std::size_t i = 0; i < wspecs.size(); ++i) {
                const double norm_vr = dyadic::weighted_norm(vr, weights[i], p.p);
                if (norm_x[i] == 0.0) {
                    if (norm_vr > 0.0)
                        throw std::logic_error("growth-scan: ||V^r X|| > 0 with ||X|| = 0");
                    raw_by_weight[i].push_back(0.0);
                    continue;
                }
                const double raw = norm_vr / norm_x[i];
                const double q_ratio = raw / std::pow(qps[i], qexp);
                raw_by_weight[i].push_back(raw);
                raw_max[g] = std::max(raw_max[g], raw);
                raw_sum[g] += raw;
                q_ratio_max[g] = std::max(q_ratio_max[g], q_ratio);
                q_ratio_sum[g] += q_ratio;
            }
        }
        for (std::size_t i = 0; i < wspecs.size(); ++i)
            for (std::size_t g = 1; g < raw_by_weight[i].size(); ++g)
                if (raw_by_weight[i][g] > raw_by_weight[i][g - 1] * (1.0 + 1e-12))
                    ++replicate_monotone_violations;
    }

    bool within_budget = true;
    double theorem_col_min = 0.0, theorem_col_max = 0.0;
    bool raw_max_monotone = true, raw_mean_monotone = true;
    double prev_raw_max = 0.0, prev_raw_mean = 0.0;
    for (std::size_t g = 0; g < p.r_grid.size(); ++g) {
        const double r = p.r_grid[g];
        const double theorem_norm = std::sqrt(r / (r - 2.0));
        const double conjecture_norm = std::sqrt(std::log(r / (r - 2.0)));
        const double raw_mean = raw_sum[g] / static_cast<double>(cells);
        const double q_mean = q_ratio_sum[g] / static_cast<double>(cells);
        const double theorem_max = q_ratio_max[g] / theorem_norm;
        const double theorem_mean = q_mean / theorem_norm;
        rep.rows.push_back(json{{"r", r},
                                {"raw_max", raw_max[g]},
                                {"raw_mean", raw_mean},
                                {"theorem_normalized_max", theorem_max},
                                {"theorem_normalized_mean", theorem_mean},
                                {"conjecture_normalized_max", q_ratio_max[g] / conjecture_norm},
                                {"conjecture_normalized_mean", q_mean / conjecture_norm}});
        if (!(theorem_max <= p.budget)) within_budget = false;
        if (g == 0 || theorem_max < theorem_col_min) theorem_col_min = theorem_max;
        if (g == 0 || theorem_max > theorem_col_max) theorem_col_max = theorem_max;
        if (g > 0 && raw_max[g] > prev_raw_max * (1.0 + 1e-12)) raw_max_monotone = false;
        if (g > 0 && raw_mean > prev_raw_mean * (1.0 + 1e-12)) raw_mean_monotone = false;
        prev_raw_max = raw_max[g];
        prev_raw_mean = raw_mean;
    }
    rep.aggregates = {
        {"budget", p.budget},
        {"within_budget", within_budget},
        {"theorem_column_min", theorem_col_min},
        {"theorem_column_max", theorem_col_max},
        {"theorem_column_spread",
         theorem_col_min > 0.0 ? json(theorem_col_max / theorem_col_min) : json(nullptr)},
        {"raw_max_non_increasing", raw_max_monotone},
        {"raw_mean_non_increasing", raw_mean_monotone},
        {"replicate_monotone_violations", replicate_monotone_violations}};
    rep.exit_code = within_budget ? 0 : 1;
    rep.wall_time_ms = clock.ms();
    return rep;
}

// ===== loglog-lowerbound =====

struct LoglogParams {
    std::vector<std::size_t> n_grid = {256, 1024, 4096};
    double c = 1.0 / 24.0;
    std::size_t replicates = 200;
    std::uint64_t seed = 0;
};

inline ExperimentReport run_loglog_lowerbound(LoglogParams p) {
    if (!(p.c < 1.0 / 12.0))
        throw std::invalid_argument("loglog-lowerbound: c must be < 1/12");
    if (p.n_grid.empty()) throw std::invalid_argument("loglog-lowerbound: empty N grid");
    if (p.replicates < 1) throw std::invalid_argument("loglog-lowerbound: need replicates >= 1");
    for (std::size_t n : p.n_grid)
        if (n < 16)
            throw std::invalid_argument("loglog-lowerbound: every N must be >= 16");
    std::sort(p.n_grid.begin(), p.n_grid.end());
    p.n_grid.erase(std::unique(p.n_grid.begin(), p.n_grid.end()), p.n_grid.end());
    Stopwatch clock;
    ExperimentReport rep;
    rep.command = "loglog-lowerbound";
    rep.params = {{"n_grid", p.n_grid},
                  {"c", p.c},
                  {"replicates", p.replicates},
                  {"seed", p.seed}};
    std::vector<double> fractions;
    for (std::size_t a = 0; a < p.n_grid.size(); ++a) {
        const std::size_t n = p.n_grid[a];
        const double threshold =
            p.c * static_cast<double>(n) * std::log(std::log(static_cast<double>(n)));
        std::size_t satisfied_count = 0;
        for (std::size_t k = 0; k < p.replicates; ++k) {
            const std::uint64_t sub = rng::substream_seed(p.seed, a * p.replicates + k);
            const core::Path walk = simulate::gaussian_walk(n, sub);
            const double v2 = variation::variation_value(walk, 2.0);
            const double v2_squared = v2 * v2;
            const bool satisfied = v2_squared >= threshold;
            if (satisfied) ++satisfied_count;
            rep.rows.push_back(json{{"n", n},
                                    {"replicate", k},
                                    {"seed", sub},
                                    {"v2_squared", v2_squared},
                                    {"threshold", threshold},
                                    {"satisfied", satisfied}});
        }
        fractions.push_back(static_cast<double>(satisfied_count) /
                            static_cast<double>(p.replicates));
    }
    bool non_decreasing = true;
    for (std::size_t a = 1; a < fractions.size(); ++a)
        if (fractions[a] < fractions[a - 1]) non_decreasing = false;
    rep.aggregates = {{"fractions", fractions},
                      {"non_decreasing", non_decreasing},
                      {"last_exceeds_first",
                       fractions.size() > 1 && fractions.back() > fractions.front()}};
    rep.exit_code = non_decreasing ? 0 : 1;
    rep.wall_time_ms = clock.ms();
    return rep;
}

// ===== holder-chain =====

struct HolderChainParams {
    std::string kind = "gaussian-walk";
    std::size_t n = 256;
    std::vector<double> r_grid = {2.5, 4.0, 8.0};
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
};

inline ExperimentReport run_holder_chain(const HolderChainParams& p) {
    for (double r : p.r_grid)
        if (!(r > 2.0)) throw std::invalid_argument("holder-chain: every r must be > 2");
    if (p.r_grid.empty()) throw std::invalid_argument("holder-chain: empty r grid");
    if (p.n < 1) throw std::invalid_argument("holder-chain: n must be >= 1");
    if (!simulate::is_path_kind(p.kind))
        throw std::invalid_argument("holder-chain: unknown path kind '" + p.kind + "'");
    Stopwatch clock;
    ExperimentReport rep;
    rep.command = "holder-chain";
    rep.params = {{"kind", p.kind},
                  {"n", p.n},
                  {"r_grid", p.r_grid},
                  {"replicates", p.replicates},
                  {"seed", p.seed}};
    std::size_t violations = 0;
    for (std::size_t k = 0; k < p.replicates; ++k) {
        const std::uint64_t sub = rng::substream_seed(p.seed, k);
        simulate::GeneratorSpec gen{.kind = p.kind, .n = p.n, .seed = sub};
        const core::Path path = simulate::generate_path(gen);
        for (double r : p.r_grid) {
            const variation::HolderCheck check = variation::holder_bound_check(path, r);
            if (!check.holds) ++violations;
            rep.rows.push_back(json{{"replicate", k},
                                    {"seed", sub},
                                    {"r", r},
                                    {"v2", check.v2},
                                    {"vr", check.vr},
                                    {"bound", check.bound},
                                    {"holds", check.holds}});
        }
    }
    rep.aggregates = {{"violations", violations},
                      {"total_checks", p.replicates * p.r_grid.size()}};
    rep.exit_code = violations ? 1 : 0;
    rep.wall_time_ms = clock.ms();
    return rep;
}

// ===== Direct results (variation, qp) =====

inline json variation_result_json(const variation::VariationResult& res) {
    return json{{"r", res.r}, {"value", res.value}, {"partition", res.partition}};
}

inline json domination_report_json(const lepingle::DominationReport& rep) {
    return json{{"rho", rep.rho},       {"r", rep.r},
                {"lhs", rep.lhs},       {"rhs", rep.rhs},
                {"m_star", rep.m_star}, {"holds", rep.holds},
                {"path_length", rep.path_length}, {"seed", rep.seed}};
}

inline json qp_result_json(const dyadic::QpResult& res) {
    return json{{"p", res.p},
                {"value", res.value},
                {"argmax_level", res.argmax_level},
                {"argmax_index", res.argmax_index}};
}

}  // namespace varmart::cli
