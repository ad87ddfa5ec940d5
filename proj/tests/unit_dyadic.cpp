#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "varmart/core.hpp"
#include "varmart/dyadic.hpp"
#include "varmart/lepingle.hpp"
#include "varmart/rng.hpp"

using namespace varmart;

namespace {

std::vector<double> random_leaves(int depth, std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    std::vector<double> leaves(std::size_t{1} << depth);
    for (double& v : leaves) v = g.next_normal();
    return leaves;
}

dyadic::DyadicWeight random_weight(int depth, std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    std::vector<double> leaves(std::size_t{1} << depth);
    for (double& v : leaves) v = std::exp(1.5 * g.next_normal());
    return dyadic::weight_from_leaves(std::move(leaves));
}

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

TEST_SUITE("dyadic") {

TEST_CASE("trees from leaves") {
    const auto coin = dyadic::tree_from_leaves({1, -1});
    CHECK(coin.depth == 1);
    CHECK(coin.node(0, 0) == 0.0);
    CHECK(coin.leaves() == std::vector<double>{1, -1});

    const auto alt = dyadic::tree_from_leaves({1, -1, 1, -1});
    CHECK(alt.levels[1] == std::vector<double>{0, 0});
    CHECK(alt.node(0, 0) == 0.0);

    const auto skew = dyadic::tree_from_leaves({4, 0, 2, 2});
    CHECK(skew.levels[1] == std::vector<double>{2, 2});
    CHECK(skew.node(0, 0) == 2.0);

    CHECK_THROWS_AS(dyadic::tree_from_leaves({1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::tree_from_leaves({}), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::tree_from_leaves({1, std::nan("")}), std::invalid_argument);
}

TEST_CASE("every internal node averages its children exactly") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto tree = dyadic::tree_from_leaves(random_leaves(7, seed));
        for (int k = 0; k < tree.depth; ++k)
            for (std::size_t i = 0; i < tree.levels[static_cast<std::size_t>(k)].size(); ++i)
                CHECK(tree.node(k, i) ==
                      0.5 * (tree.node(k + 1, 2 * i) + tree.node(k + 1, 2 * i + 1)));
    }
}

TEST_CASE("martingale trajectories") {
    const auto skew = dyadic::tree_from_leaves({4, 0, 2, 2});
    const auto paths = dyadic::martingale_paths(skew);
    REQUIRE(paths.size() == 4);
    CHECK(paths[0].coords == std::vector<double>{2, 2, 4});
    CHECK(paths[1].coords == std::vector<double>{2, 2, 0});
    CHECK(paths[2].coords == std::vector<double>{2, 2, 2});
    CHECK(paths[3].coords == std::vector<double>{2, 2, 2});
    CHECK_THROWS_AS(dyadic::leaf_path(skew, 4), std::invalid_argument);
}

TEST_CASE("flat weights have unit characteristic") {
    for (int depth : {0, 1, 4}) {
        const auto w = dyadic::weight_from_leaves(
            std::vector<double>(std::size_t{1} << depth, 1.0));
        for (double p : {1.5, 2.0, 3.0}) {
            const auto q = dyadic::qp_characteristic(w, p);
            CHECK(q.value == 1.0);
            CHECK(q.argmax_level == 0);
            CHECK(q.argmax_index == 0);
        }
    }
}

TEST_CASE("characteristic of a two-leaf weight") {
    const auto w = dyadic::weight_from_leaves({1, 3});
    const auto q = dyadic::qp_characteristic(w, 2.0);
    CHECK(q.value == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(q.argmax_level == 0);
    CHECK(q.argmax_index == 0);
}

TEST_CASE("characteristic is scale invariant") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto w = random_weight(5, seed);
        for (double c : {0.1, 7.0}) {
            std::vector<double> scaled = w.leaves;
            for (double& v : scaled) v *= c;
            const auto ws = dyadic::weight_from_leaves(std::move(scaled));
            for (double p : {1.5, 3.0}) {
                CHECK(dyadic::qp_characteristic(ws, p).value ==
                      doctest::Approx(dyadic::qp_characteristic(w, p).value).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("characteristic equals the stopping-time enumeration") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const int depth = static_cast<int>(seed % 4);
        const auto w = random_weight(depth, 1000 + seed);
        for (double p : {1.5, 2.0, 3.0}) {
            const double fast = dyadic::qp_characteristic(w, p).value;
            const double slow = dyadic::qp_bruteforce(w, p);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
        }
    }
}

TEST_CASE("characteristic input validation") {
    CHECK_THROWS_AS(dyadic::qp_bruteforce(random_weight(4, 0), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::weight_from_leaves({1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::weight_from_leaves({1, 0}), std::invalid_argument);
    dyadic::DyadicWeight forged;
    forged.depth = 1;
    forged.leaves = {1, -1};
    CHECK_THROWS_AS(dyadic::qp_characteristic(forged, 2.0), std::invalid_argument);
    const auto w = dyadic::weight_from_leaves({1, 3});
    CHECK_THROWS_AS(dyadic::qp_characteristic(w, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::qp_characteristic(w, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::qp_characteristic(w, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("weighted norms") {
    const auto ones = dyadic::weight_from_leaves({1, 1});
    const std::vector<double> updown = {1, -1};
    CHECK(dyadic::weighted_norm(updown, ones, 2.0) == 1.0);

    const auto skew = dyadic::weight_from_leaves({1, 3});
    const std::vector<double> half = {2, 0};
    CHECK(dyadic::weighted_norm(half, skew, 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(dyadic::weighted_norm(updown, dyadic::weight_from_leaves({1, 1, 1, 1}), 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::weighted_norm(updown, ones, 0.5), std::invalid_argument);

    rng::SplitMix64 g(5);
    std::vector<double> values(256);
    for (double& v : values) v = g.next_normal();
    const auto flat = dyadic::weight_from_leaves(std::vector<double>(256, 1.0));
    long double acc = 0.0L;
    for (double v : values) acc += static_cast<long double>(v) * v;
    const double rms = std::sqrt(static_cast<double>(acc / 256.0L));
    CHECK(dyadic::weighted_norm(values, flat, 2.0) == doctest::Approx(rms).epsilon(1e-12));
}

TEST_CASE("pairwise summation is accurate") {
    rng::SplitMix64 g(11);
    for (std::size_t n : {1u, 2u, 7u, 8u, 9u, 100u, 1000u, 4096u}) {
        std::vector<double> v(n);
        long double ref = 0.0L;
        for (double& x : v) {
            x = g.next_unit();
            ref += static_cast<long double>(x);
        }
        const double got = dyadic::pairwise_sum(v);
        CHECK(std::fabs(got - static_cast<double>(ref)) <=
              1e-14 * static_cast<double>(ref));
    }
}

TEST_CASE("square function on tiny trees") {
    const auto coin = dyadic::tree_from_leaves({1, -1});
    CHECK(dyadic::square_function(coin) == std::vector<double>{1, 1});

    const auto skew = dyadic::tree_from_leaves({4, 0, 2, 2});
    CHECK(dyadic::square_function(skew) == std::vector<double>{2, 2, 0, 0});
}

TEST_CASE("square ratio") {
    const auto ones = dyadic::weight_from_leaves({1, 1});
    const auto unit = dyadic::square_ratio({1, -1}, ones, 2.0);
    CHECK(unit.norm_s == 1.0);
    CHECK(unit.norm_x == 1.0);
    CHECK(unit.qp == 1.0);
    CHECK(unit.normalized_ratio == 1.0);

    const auto flat4 = dyadic::weight_from_leaves({1, 1, 1, 1});
    const auto constant = dyadic::square_ratio({3, 3, 3, 3}, flat4, 2.0);
    CHECK(constant.norm_s == 0.0);
    CHECK(constant.normalized_ratio == 0.0);

    const auto zero = dyadic::square_ratio({0, 0}, ones, 2.0);
    CHECK(zero.norm_x == 0.0);
    CHECK(zero.normalized_ratio == 0.0);
}

TEST_CASE("greedy stopping times respect optional sampling") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int depth = 3 + static_cast<int>(seed % 4);
        const auto tree = dyadic::tree_from_leaves(random_leaves(depth, 300 + seed));
        const auto paths = dyadic::martingale_paths(tree);
        const std::size_t n = static_cast<std::size_t>(tree.depth);
        for (int m : {2, 3}) {
            std::vector<std::vector<std::size_t>> taus;
            std::size_t levels = 0;
            taus.reserve(paths.size());
            for (const auto& path : paths) {
                taus.push_back(lepingle::stopping_times(path, m).taus);
                levels = std::max(levels, taus.back().size());
            }
            auto capped = [&](std::size_t w, std::size_t j) {
                return j < taus[w].size() ? std::min(taus[w][j], n) : n;
            };
            for (std::size_t j = 0; j + 1 <= levels; ++j) {
                // Atoms of the stopped filtration: time plus tree node.
                std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> atoms;
                for (std::size_t w = 0; w < paths.size(); ++w) {
                    const std::size_t t = capped(w, j);
                    atoms[{t, w >> (n - t)}].push_back(w);
                }
                for (const auto& [key, members] : atoms) {
                    const double y_now = paths[members[0]].coords[key.first];
                    double mean_next = 0.0;
                    for (std::size_t w : members) {
                        CHECK(paths[w].coords[capped(w, j)] == y_now);
                        mean_next += paths[w].coords[capped(w, j + 1)];
                    }
                    mean_next /= static_cast<double>(members.size());
                    CHECK(std::fabs(mean_next - y_now) <=
                          1e-9 * std::max(1.0, std::fabs(y_now)));
                }
            }
        }
    }
}

TEST_CASE("leaf csv round trip preserves bits") {
    const std::vector<double> leaves = {0.1, 1.0 / 3.0, -0.0, 1e-300, -1e300,
                                        12345.678901234567, 2.0, -7.25};
    std::ostringstream out;
    dyadic::write_leaves_csv(leaves, out);
    std::istringstream in(out.str());
    const std::vector<double> back = dyadic::read_leaves_csv(in);
    REQUIRE(back.size() == leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) CHECK(same_bits(leaves[i], back[i]));

    std::istringstream messy("1.5\r\n\n 2.25 \n");
    CHECK(dyadic::read_leaves_csv(messy) == std::vector<double>{1.5, 2.25});

    std::istringstream words("abc\n");
    CHECK_THROWS_AS(dyadic::read_leaves_csv(words), std::invalid_argument);
    std::istringstream empty("");
    CHECK_THROWS_AS(dyadic::read_leaves_csv(empty), std::invalid_argument);
}

}  // TEST_SUITE
