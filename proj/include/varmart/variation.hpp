#pragma once

// Exact r-variation of a finite path.
//
//   V^r(X) = sup ( sum_j d(X_{u_{j-1}}, X_{u_j})^r )^{1/r}
//
// with the supremum over strictly increasing index subsequences.  For a
// finite path the supremum is a maximum, computed exactly by dynamic
// programming in quadratic time; an exponential brute force serves as an
// oracle for short paths.  extrema_prune is a lossless reduction for real
// paths and r >= 1: same-sign increments merge because |a+b|^r >= |a|^r+|b|^r.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "varmart/core.hpp"

namespace varmart::variation {

// d^r with d = 0 short-circuited (avoids log-of-zero); r = 1, 2 fast paths
// stay within 2 ulp of std::pow.
inline double pow_dist(double d, double r) {
    if (d == 0.0) return 0.0;
    if (r == 1.0) return d;
    if (r == 2.0) return d * d;
    return std::pow(d, r);
}

struct VariationResult {
    double r = 0.0;
    double value = 0.0;
    // Indices u_0 < u_1 < ... achieving the maximum; empty when the value is 0.
    std::vector<std::size_t> partition;
};

// f[i] = best sum of d^r over a subsequence ending at index i (0 if the
// subsequence starts there).  Ties pick the smallest predecessor and the
// smallest final index, so partitions are reproducible.
inline VariationResult variation_dp(const core::Path& path, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("variation_dp: r must be > 0");
    core::require_valid(path);
    const std::size_t n = path.length();
    std::vector<double> f(n, 0.0);
    std::vector<std::size_t> back(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        double best = 0.0;
        std::size_t arg = i;
        for (std::size_t j = 0; j < i; ++j) {
            const double cand = f[j] + pow_dist(path.dist(j, i), r);
            if (cand > best) {
                best = cand;
                arg = j;
            }
        }
        f[i] = best;
        back[i] = arg;
    }
    std::size_t tail = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (f[i] > f[tail]) tail = i;

    VariationResult out;
    out.r = r;
    if (f[tail] == 0.0) return out;  // constant-distance path: value 0, empty partition
    out.value = std::pow(f[tail], 1.0 / r);
    std::vector<std::size_t> rev;
    std::size_t i = tail;
    while (true) {
        rev.push_back(i);
        if (back[i] == i) break;  // subsequence start
        i = back[i];
    }
    out.partition.assign(rev.rbegin(), rev.rend());
    return out;
}

// Exhaustive maximum over all increasing subsequences of length >= 2 plus the
// empty score 0.  Exponential; guarded to paths of at most 16 points.
inline double variation_bruteforce(const core::Path& path, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("variation_bruteforce: r must be > 0");
    core::require_valid(path);
    const std::size_t n = path.length();
    if (n > 16) throw std::invalid_argument("variation_bruteforce: path longer than 16 points");
    double best = 0.0;
    const std::size_t top = std::size_t{1} << n;
    for (std::size_t mask = 1; mask < top; ++mask) {
        double sum = 0.0;
        std::size_t prev = n;  // sentinel
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (std::size_t{1} << i))) continue;
            if (prev != n) sum += pow_dist(path.dist(prev, i), r);
            prev = i;
        }
        if (sum > best) best = sum;
    }
    return best == 0.0 ? 0.0 : std::pow(best, 1.0 / r);
}

// Subsequence of a real path consisting of X_0, X_n, and all strict local
// extrema.  Runs of equal values collapse first so flat-topped extrema are
// kept.  Preserves V^r exactly for r >= 1.
inline core::Path extrema_prune(const core::Path& path) {
    if (path.space.geometry != core::Geometry::RealLine)
        throw std::invalid_argument("extrema_prune: real-line paths only");
    core::require_valid(path);
    const std::vector<double>& x = path.coords;
    if (x.size() <= 2) return path;

    std::vector<double> dedup;
    dedup.reserve(x.size());
    for (double v : x)
        if (dedup.empty() || v != dedup.back()) dedup.push_back(v);
    if (dedup.size() == 1) return core::Path::real({x.front(), x.back()});

    std::vector<double> kept;
    kept.reserve(dedup.size());
    kept.push_back(dedup.front());
    for (std::size_t i = 1; i + 1 < dedup.size(); ++i) {
        const bool up_in = dedup[i] > dedup[i - 1];
        const bool up_out = dedup[i + 1] > dedup[i];
        if (up_in != up_out) kept.push_back(dedup[i]);  // sign change: strict extremum
    }
    kept.push_back(dedup.back());
    return core::Path::real(std::move(kept));
}

// V^r value only, pruning real paths when the reduction is lossless.
inline double variation_value(const core::Path& path, double r) {
    if (r >= 1.0 && path.space.geometry == core::Geometry::RealLine)
        return variation_dp(extrema_prune(path), r).value;
    return variation_dp(path, r).value;
}

// ===== Hoelder comparison =====
//
// For a path of N+1 points and r > 2:  V^2 <= N^{1/2 - 1/r} * V^r.

struct HolderCheck {
    double v2 = 0.0;
    double vr = 0.0;
    double bound = 0.0;
    bool holds = false;
};

inline HolderCheck holder_bound_check(const core::Path& path, double r) {
    if (!(r > 2.0)) throw std::invalid_argument("holder_bound_check: r must be > 2");
    core::require_valid(path);
    const std::size_t len = path.length();
    if (len < 2) throw std::invalid_argument("holder_bound_check: need at least 2 points");
    const double n_steps = static_cast<double>(len - 1);
    HolderCheck out;
    out.v2 = variation_value(path, 2.0);
    out.vr = variation_value(path, r);
    out.bound = std::pow(n_steps, 0.5 - 1.0 / r) * out.vr;
    out.holds = out.v2 <= out.bound * (1.0 + 1e-9);
    return out;
}

}  // namespace varmart::variation
