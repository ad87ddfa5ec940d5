#pragma once

// Finite dyadic filtered probability spaces with uniform leaf measure.
//
// A depth-n tree stores a function on 2^n equiprobable atoms together with
// all conditional expectations: each internal node is the average of its two
// children, so level k is E[X | F_k] and level 0 is the mean.  Weights are
// strictly positive leaf functions; Q_p is their martingale A_p
// characteristic.  Sums that feed serialized reports use fixed left-to-right
// pairwise summation so results are bit-stable across runs.

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "varmart/core.hpp"

namespace varmart::dyadic {

// ===== Trees =====

struct DyadicTree {
    int depth = 0;
    // levels[k] holds 2^k values; levels[depth] is the leaf function.
    std::vector<std::vector<double>> levels;

    const std::vector<double>& leaves() const { return levels.back(); }
    // Node value at (level, index); the node covers leaves [index*2^(depth-level), ...).
    double node(int level, std::size_t index) const {
        return levels[static_cast<std::size_t>(level)][index];
    }
};

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline int log2_size(std::size_t x) {
    int n = 0;
    while ((std::size_t{1} << n) < x) ++n;
    return n;
}

inline DyadicTree tree_from_leaves(std::vector<double> leaves) {
    if (!is_power_of_two(leaves.size()))
        throw std::invalid_argument("tree_from_leaves: leaf count must be a power of two");
    for (double v : leaves)
        if (!std::isfinite(v)) throw std::invalid_argument("tree_from_leaves: non-finite leaf");
    DyadicTree tree;
    tree.depth = log2_size(leaves.size());
    tree.levels.resize(static_cast<std::size_t>(tree.depth) + 1);
    tree.levels[static_cast<std::size_t>(tree.depth)] = std::move(leaves);
    for (int k = tree.depth; k-- > 0;) {
        const std::vector<double>& below = tree.levels[static_cast<std::size_t>(k) + 1];
        std::vector<double>& here = tree.levels[static_cast<std::size_t>(k)];
        here.resize(below.size() / 2);
        for (std::size_t i = 0; i < here.size(); ++i)
            here[i] = 0.5 * (below[2 * i] + below[2 * i + 1]);
    }
    return tree;
}

// Trajectory X_0(w),...,X_n(w) of the martingale along the atom w.
inline core::Path leaf_path(const DyadicTree& tree, std::size_t leaf) {
    if (leaf >= tree.leaves().size()) throw std::invalid_argument("leaf_path: leaf out of range");
    std::vector<double> values(static_cast<std::size_t>(tree.depth) + 1);
    for (int k = 0; k <= tree.depth; ++k)
        values[static_cast<std::size_t>(k)] = tree.node(k, leaf >> (tree.depth - k));
    return core::Path::real(std::move(values));
}

inline std::vector<core::Path> martingale_paths(const DyadicTree& tree) {
    std::vector<core::Path> paths;
    paths.reserve(tree.leaves().size());
    for (std::size_t w = 0; w < tree.leaves().size(); ++w) paths.push_back(leaf_path(tree, w));
    return paths;
}

// ===== Weights =====

struct DyadicWeight {
    int depth = 0;
    std::vector<double> leaves;
};

inline DyadicWeight weight_from_leaves(std::vector<double> leaves) {
    if (!is_power_of_two(leaves.size()))
        throw std::invalid_argument("weight_from_leaves: leaf count must be a power of two");
    for (double v : leaves)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("weight_from_leaves: weights must be positive and finite");
    DyadicWeight w;
    w.depth = log2_size(leaves.size());
    w.leaves = std::move(leaves);
    return w;
}

// ===== Summation =====

// Fixed left-to-right pairwise summation; deterministic and cache-friendly.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// ===== Weighted norms and Q_p =====

// ( 2^{-n} sum_w |X(w)|^p w(w) )^{1/p} with uniform measure on leaves.
inline double weighted_norm(std::span<const double> values, const DyadicWeight& weight,
                            double p) {
    if (values.size() != weight.leaves.size())
        throw std::invalid_argument("weighted_norm: size mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_norm: p must be >= 1");
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        terms[i] = std::pow(std::fabs(values[i]), p) * weight.leaves[i];
    const double mean = pairwise_sum(terms) * std::ldexp(1.0, -weight.depth);
    return std::pow(mean, 1.0 / p);
}

struct QpResult {
    double p = 2.0;
    double value = 1.0;
    int argmax_level = 0;
    std::size_t argmax_index = 0;
};

// Q_p(w) = max over nodes v of avg_v(w) * avg_v(w^{-1/(p-1)})^{p-1}.  The
// stopping-time supremum collapses to a node maximum because conditional
// expectations at a stopping time agree pointwise with some fixed-level node
// average, and positivity of w makes the ess-sup a plain max over atoms; this
// reduction is validated against qp_bruteforce rather than assumed.
inline QpResult qp_characteristic(const DyadicWeight& weight, double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("qp_characteristic: p must lie in (1, infinity)");
    for (double v : weight.leaves)
        if (!(v > 0.0)) throw std::invalid_argument("qp_characteristic: nonpositive weight leaf");
    std::vector<double> dual(weight.leaves.size());
    const double conj = -1.0 / (p - 1.0);
    for (std::size_t i = 0; i < dual.size(); ++i) dual[i] = std::pow(weight.leaves[i], conj);
    const DyadicTree wt = tree_from_leaves(weight.leaves);
    const DyadicTree st = tree_from_leaves(std::move(dual));
    QpResult out;
    out.p = p;
    out.value = 0.0;
    for (int level = 0; level <= wt.depth; ++level) {
        const std::vector<double>& wl = wt.levels[static_cast<std::size_t>(level)];
        const std::vector<double>& sl = st.levels[static_cast<std::size_t>(level)];
        for (std::size_t i = 0; i < wl.size(); ++i) {
            const double a = wl[i] * std::pow(sl[i], p - 1.0);
            if (a > out.value) {
                out.value = a;
                out.argmax_level = level;
                out.argmax_index = i;
            }
        }
    }
    return out;
}

// Literal enumeration of the defining supremum over adapted stopping times.
// A stopping time is an antichain cover of the tree (the set of nodes where
// it stops); the count satisfies T(d) = 1 + T(d-1)^2, so depth 3 has 26.
// Enumerates stopping-region covers of the subtree rooted at (level, index)
// and returns, for each cover, the max over that subtree's leaves of
// avg(w) * avg(w^{-1/(p-1)})^{p-1} evaluated at the stopping node.
inline std::vector<double> qp_cover_values(const DyadicTree& wt, const DyadicTree& st,
                                           double p, int level, std::size_t index) {
    const double here = wt.node(level, index) *
                        std::pow(st.node(level, index), p - 1.0);
    if (level == wt.depth) return {here};
    const std::vector<double> left = qp_cover_values(wt, st, p, level + 1, 2 * index);
    const std::vector<double> right = qp_cover_values(wt, st, p, level + 1, 2 * index + 1);
    std::vector<double> out;
    out.reserve(1 + left.size() * right.size());
    out.push_back(here);  // stop at this node: E[.|F_tau] constant on the block
    for (double a : left)
        for (double b : right) out.push_back(std::max(a, b));
    return out;
}

inline double qp_bruteforce(const DyadicWeight& weight, double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("qp_bruteforce: p must lie in (1, infinity)");
    if (weight.depth > 3) throw std::invalid_argument("qp_bruteforce: depth capped at 3");
    for (double v : weight.leaves)
        if (!(v > 0.0)) throw std::invalid_argument("qp_bruteforce: nonpositive weight leaf");
    std::vector<double> dual(weight.leaves.size());
    const double conj = -1.0 / (p - 1.0);
    for (std::size_t i = 0; i < dual.size(); ++i) dual[i] = std::pow(weight.leaves[i], conj);
    const DyadicTree wt = tree_from_leaves(weight.leaves);
    const DyadicTree st = tree_from_leaves(std::move(dual));
    const std::vector<double> covers = qp_cover_values(wt, st, p, 0, 0);
    double best = 0.0;
    for (double v : covers) best = std::max(best, v);
    return best;
}

// ===== Square function =====

// Per leaf, sqrt of the sum of squared increments along the root-to-leaf
// path; increments are accumulated in level order (fixed order, bit-stable).
inline std::vector<double> square_function(const DyadicTree& tree) {
    const std::size_t count = tree.leaves().size();
    std::vector<double> s(count, 0.0);
    for (std::size_t w = 0; w < count; ++w) {
        double acc = 0.0;
        double prev = tree.node(0, 0);
        for (int k = 1; k <= tree.depth; ++k) {
            const double cur = tree.node(k, w >> (tree.depth - k));
            const double d = cur - prev;
            acc += d * d;
            prev = cur;
        }
        s[w] = std::sqrt(acc);
    }
    return s;
}

struct SquareRatio {
    double norm_s = 0.0;
    double norm_x = 0.0;
    double qp = 1.0;
    double normalized_ratio = 0.0;
};

// normalized_ratio = ||S|| / ( Q_p^{max(1, 1/(p-1))} ||X|| ), the empirical
// stand-in for the square-function constant.  norm_x = 0 forces norm_s = 0
// for any genuine martingale, so the contrary case is reported as a bug.
inline SquareRatio square_ratio(const std::vector<double>& leaves, const DyadicWeight& weight,
                                double p) {
    const DyadicTree tree = tree_from_leaves(leaves);
    const std::vector<double> s = square_function(tree);
    SquareRatio out;
    out.norm_s = weighted_norm(s, weight, p);
    out.norm_x = weighted_norm(leaves, weight, p);
    out.qp = qp_characteristic(weight, p).value;
    if (out.norm_x == 0.0) {
        if (out.norm_s > 0.0)
            throw std::logic_error("square_ratio: ||S|| > 0 with ||X|| = 0 (martingale construction bug)");
        out.normalized_ratio = 0.0;
        return out;
    }
    out.normalized_ratio =
        out.norm_s / (std::pow(out.qp, std::max(1.0, 1.0 / (p - 1.0))) * out.norm_x);
    return out;
}

// ===== CSV (one leaf per row) =====

inline void write_leaves_csv(std::span<const double> leaves, std::ostream& out) {
    for (double v : leaves) out << core::format_double(v) << '\n';
}

inline std::vector<double> read_leaves_csv(std::istream& in) {
    std::vector<double> leaves;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const std::size_t b = line.find_last_not_of(" \t");
        leaves.push_back(core::parse_double_field(line.substr(a, b - a + 1)));
    }
    if (leaves.empty()) throw std::invalid_argument("csv: no rows");
    return leaves;
}

}  // namespace varmart::dyadic
