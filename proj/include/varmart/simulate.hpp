#pragma once

// Seeded, reproducible generators for walks, dyadic martingales, and weights.
// Every generator is a pure function of its parameters: identical spec gives
// bit-identical output.  Replicate k of a master seed must draw from
// rng::substream_seed(seed, k); generators never split seeds themselves.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "varmart/core.hpp"
#include "varmart/dyadic.hpp"
#include "varmart/rng.hpp"

namespace varmart::simulate {

// ===== Path generators =====

// X_0 = 0, i.i.d. standard normal increments.
inline core::Path gaussian_walk(std::size_t n, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<double> x(n + 1);
    x[0] = 0.0;
    for (std::size_t t = 0; t < n; ++t) x[t + 1] = x[t] + gen.next_normal();
    return core::Path::real(std::move(x));
}

// X_0 = 0, i.i.d. +-1 increments.
inline core::Path rademacher_walk(std::size_t n, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<double> x(n + 1);
    x[0] = 0.0;
    for (std::size_t t = 0; t < n; ++t) x[t + 1] = x[t] + gen.next_sign();
    return core::Path::real(std::move(x));
}

// Independent standard normal coordinates per increment.
inline core::Path gaussian_walk_euclid(std::size_t n, int d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("gaussian_walk_euclid: d must be >= 1");
    rng::SplitMix64 gen(seed);
    std::vector<double> coords((n + 1) * static_cast<std::size_t>(d), 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (int i = 0; i < d; ++i)
            coords[(t + 1) * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] =
                coords[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] +
                gen.next_normal();
    return core::Path(core::MetricSpace::euclidean(d), std::move(coords));
}

// ===== Dyadic generators =====

// i.i.d. standard normal leaves.
inline dyadic::DyadicTree dyadic_random_leaves(int depth, std::uint64_t seed) {
    if (depth < 0) throw std::invalid_argument("dyadic_random_leaves: depth must be >= 0");
    rng::SplitMix64 gen(seed);
    std::vector<double> leaves(std::size_t{1} << depth);
    for (double& v : leaves) v = gen.next_normal();
    return dyadic::tree_from_leaves(std::move(leaves));
}

// w_i = ((i + 1/2) / 2^depth)^alpha; deterministic, alpha > -1 keeps the
// weight positive and integrable in the continuum analogue.
inline dyadic::DyadicWeight dyadic_power_weight(int depth, double alpha) {
    if (depth < 0) throw std::invalid_argument("dyadic_power_weight: depth must be >= 0");
    if (!(alpha > -1.0)) throw std::invalid_argument("dyadic_power_weight: alpha must be > -1");
    std::vector<double> leaves(std::size_t{1} << depth);
    for (std::size_t i = 0; i < leaves.size(); ++i)
        leaves[i] = std::pow((static_cast<double>(i) + 0.5) * std::ldexp(1.0, -depth), alpha);
    return dyadic::weight_from_leaves(std::move(leaves));
}

// Leaves i.i.d. log-uniform on [1/spread, spread].
inline dyadic::DyadicWeight random_ap_weight(int depth, double spread, std::uint64_t seed) {
    if (depth < 0) throw std::invalid_argument("random_ap_weight: depth must be >= 0");
    if (!(spread >= 1.0)) throw std::invalid_argument("random_ap_weight: spread must be >= 1");
    rng::SplitMix64 gen(seed);
    const double log_spread = std::log(spread);
    std::vector<double> leaves(std::size_t{1} << depth);
    for (double& v : leaves) v = std::exp((2.0 * gen.next_unit() - 1.0) * log_spread);
    return dyadic::weight_from_leaves(std::move(leaves));
}

// ===== GeneratorSpec =====

// Declarative description of one generator invocation; serializes to JSON so
// reports can embed exactly what they consumed.  kind is one of:
//   gaussian-walk | rademacher-walk | gaussian-walk-euclid-<d> |
//   dyadic-random-leaves | dyadic-power-weight | random-ap-weight |
//   constant-path
// (constant-path is the degenerate control used by the CLI experiments).
struct GeneratorSpec {
    std::string kind;
    std::size_t n = 0;   // walk step count (path kinds)
    int depth = 0;       // dyadic kinds
    int d = 1;           // euclidean dimension
    double alpha = 0.0;  // dyadic-power-weight
    double spread = 1.0; // random-ap-weight
    std::uint64_t seed = 0;
};

inline bool parse_euclid_kind(const std::string& kind, int& d_out) {
    const std::string prefix = "gaussian-walk-euclid-";
    if (kind.size() <= prefix.size() || kind.compare(0, prefix.size(), prefix) != 0) return false;
    const std::string tail = kind.substr(prefix.size());
    for (char c : tail)
        if (c < '0' || c > '9') return false;
    d_out = std::stoi(tail);
    return true;
}

inline bool is_path_kind(const std::string& kind) {
    int d = 0;
    return kind == "gaussian-walk" || kind == "rademacher-walk" || kind == "constant-path" ||
           parse_euclid_kind(kind, d);
}

inline core::Path generate_path(const GeneratorSpec& spec) {
    if (spec.kind == "gaussian-walk") return gaussian_walk(spec.n, spec.seed);
    if (spec.kind == "rademacher-walk") return rademacher_walk(spec.n, spec.seed);
    if (spec.kind == "constant-path")
        return core::Path::real(std::vector<double>(spec.n + 1, 0.0));
    int d = 0;
    if (parse_euclid_kind(spec.kind, d)) return gaussian_walk_euclid(spec.n, d, spec.seed);
    throw std::invalid_argument("generate_path: unknown kind '" + spec.kind + "'");
}

inline nlohmann::json spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j{{"kind", spec.kind}, {"seed", spec.seed}};
    if (is_path_kind(spec.kind)) j["n"] = spec.n;
    if (spec.kind == "dyadic-random-leaves" || spec.kind == "dyadic-power-weight" ||
        spec.kind == "random-ap-weight")
        j["depth"] = spec.depth;
    if (spec.kind == "dyadic-power-weight") {
        j["alpha"] = spec.alpha;
        j.erase("seed");  // deterministic family
    }
    if (spec.kind == "random-ap-weight") j["spread"] = spec.spread;
    return j;
}

inline GeneratorSpec spec_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (j.contains("n")) spec.n = j.at("n").get<std::size_t>();
    if (j.contains("depth")) spec.depth = j.at("depth").get<int>();
    if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();
    if (j.contains("spread")) spec.spread = j.at("spread").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    int d = 0;
    if (parse_euclid_kind(spec.kind, d)) spec.d = d;
    return spec;
}

}  // namespace varmart::simulate
