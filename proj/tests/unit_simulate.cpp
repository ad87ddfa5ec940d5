#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "varmart/core.hpp"
#include "varmart/dyadic.hpp"
#include "varmart/rng.hpp"
#include "varmart/simulate.hpp"

using namespace varmart;

TEST_SUITE("simulate") {

TEST_CASE("generators are deterministic in the seed") {
    CHECK(simulate::gaussian_walk(100, 3).coords == simulate::gaussian_walk(100, 3).coords);
    CHECK(simulate::rademacher_walk(100, 3).coords == simulate::rademacher_walk(100, 3).coords);
    CHECK(simulate::gaussian_walk_euclid(50, 3, 9).coords ==
          simulate::gaussian_walk_euclid(50, 3, 9).coords);
    CHECK(simulate::dyadic_random_leaves(6, 4).leaves() ==
          simulate::dyadic_random_leaves(6, 4).leaves());
    CHECK(simulate::random_ap_weight(6, 4.0, 4).leaves ==
          simulate::random_ap_weight(6, 4.0, 4).leaves);
    CHECK(simulate::gaussian_walk(100, 3).coords != simulate::gaussian_walk(100, 4).coords);
}

TEST_CASE("walks start at the origin") {
    const auto trivial = simulate::gaussian_walk(0, 5);
    CHECK(trivial.coords == std::vector<double>{0.0});
    CHECK(simulate::gaussian_walk(10, 5).coords[0] == 0.0);
    CHECK(simulate::rademacher_walk(10, 5).coords[0] == 0.0);
    const auto origin = simulate::gaussian_walk_euclid(0, 4, 5);
    CHECK(origin.coords == std::vector<double>(4, 0.0));
}

TEST_CASE("gaussian increments have the right moments") {
    const auto walk = simulate::gaussian_walk(10000, 7);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 1; t < walk.length(); ++t) {
        const double inc = walk.coords[t] - walk.coords[t - 1];
        sum += inc;
        sum_sq += inc * inc;
    }
    const double mean = sum / 10000.0;
    const double var = sum_sq / 10000.0 - mean * mean;
    CHECK(std::fabs(mean) <= 0.05);
    CHECK(var >= 0.94);
    CHECK(var <= 1.06);
}

TEST_CASE("rademacher increments are signs") {
    const auto walk = simulate::rademacher_walk(10000, 11);
    double sum = 0.0;
    for (std::size_t t = 1; t < walk.length(); ++t) {
        const double inc = walk.coords[t] - walk.coords[t - 1];
        CHECK(std::fabs(inc) == 1.0);
        sum += inc;
    }
    CHECK(std::fabs(sum / 10000.0) <= 0.05);
}

TEST_CASE("euclidean walks") {
    CHECK_THROWS_AS(simulate::gaussian_walk_euclid(10, 0, 1), std::invalid_argument);

    const auto walk = simulate::gaussian_walk_euclid(10000, 3, 13);
    double sum_sq = 0.0;
    for (std::size_t t = 1; t < walk.length(); ++t) {
        const double d = walk.dist(t - 1, t);
        sum_sq += d * d;
    }
    const double mean_sq = sum_sq / 10000.0;
    CHECK(mean_sq >= 2.7);
    CHECK(mean_sq <= 3.3);

    // One dimension consumes the stream exactly like the scalar walk.
    CHECK(simulate::gaussian_walk_euclid(64, 1, 21).coords ==
          simulate::gaussian_walk(64, 21).coords);
}

TEST_CASE("power weights") {
    const auto flat = simulate::dyadic_power_weight(3, 0.0);
    CHECK(flat.leaves == std::vector<double>(8, 1.0));

    const auto linear = simulate::dyadic_power_weight(1, 1.0);
    CHECK(linear.leaves == std::vector<double>{0.25, 0.75});

    CHECK_THROWS_AS(simulate::dyadic_power_weight(3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(simulate::dyadic_power_weight(-1, 0.5), std::invalid_argument);

    // Stronger singularity at the origin raises the characteristic.
    double prev = 0.0;
    for (double alpha : {0.0, 0.5, 0.9}) {
        const double q =
            dyadic::qp_characteristic(simulate::dyadic_power_weight(10, alpha), 2.0).value;
        CHECK(q > prev);
        prev = q;
    }
    CHECK(dyadic::qp_characteristic(simulate::dyadic_power_weight(10, 0.0), 2.0).value == 1.0);
}

TEST_CASE("random weights") {
    const auto unit = simulate::random_ap_weight(4, 1.0, 8);
    CHECK(unit.leaves == std::vector<double>(16, 1.0));

    const auto spread4 = simulate::random_ap_weight(8, 4.0, 8);
    for (double v : spread4.leaves) {
        CHECK(v >= 0.25);
        CHECK(v <= 4.0);
    }

    CHECK_THROWS_AS(simulate::random_ap_weight(4, 0.5, 8), std::invalid_argument);
    CHECK_THROWS_AS(simulate::random_ap_weight(-2, 4.0, 8), std::invalid_argument);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto w = simulate::random_ap_weight(8, 4.0, seed);
        CHECK(dyadic::qp_characteristic(w, 2.0).value >= 1.0 - 1e-12);
    }
}

TEST_CASE("random dyadic martingales") {
    const auto point = simulate::dyadic_random_leaves(0, 9);
    CHECK(point.depth == 0);
    CHECK(point.leaves().size() == 1);
    CHECK(point.node(0, 0) == point.leaves()[0]);

    CHECK_THROWS_AS(simulate::dyadic_random_leaves(-1, 9), std::invalid_argument);

    // The root averages 2^12 independent standard normals, so it stays within
    // three standard deviations (3 * 2^-6) for nearly every seed.
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto tree = simulate::dyadic_random_leaves(12, seed);
        if (std::fabs(tree.node(0, 0)) <= 3.0 / 64.0) ++within;
    }
    CHECK(within >= 95);
}

TEST_CASE("kind strings") {
    CHECK(simulate::is_path_kind("gaussian-walk"));
    CHECK(simulate::is_path_kind("rademacher-walk"));
    CHECK(simulate::is_path_kind("constant-path"));
    CHECK(simulate::is_path_kind("gaussian-walk-euclid-3"));
    CHECK(!simulate::is_path_kind("dyadic-random-leaves"));
    CHECK(!simulate::is_path_kind("brownian"));

    int d = 0;
    CHECK(simulate::parse_euclid_kind("gaussian-walk-euclid-12", d));
    CHECK(d == 12);
    CHECK(!simulate::parse_euclid_kind("gaussian-walk-euclid-", d));
    CHECK(!simulate::parse_euclid_kind("gaussian-walk-euclid-3x", d));
    CHECK(!simulate::parse_euclid_kind("gaussian-walk", d));
}

TEST_CASE("path dispatch") {
    simulate::GeneratorSpec spec;
    spec.kind = "constant-path";
    spec.n = 5;
    spec.seed = 77;
    const auto flat = simulate::generate_path(spec);
    CHECK(flat.coords == std::vector<double>(6, 0.0));

    spec.kind = "gaussian-walk";
    CHECK(simulate::generate_path(spec).coords == simulate::gaussian_walk(5, 77).coords);

    spec.kind = "gaussian-walk-euclid-2";
    const auto planar = simulate::generate_path(spec);
    CHECK(planar.space.dim == 2);
    CHECK(planar.coords == simulate::gaussian_walk_euclid(5, 2, 77).coords);

    spec.kind = "levy-flight";
    CHECK_THROWS_AS(simulate::generate_path(spec), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
    simulate::GeneratorSpec spec;
    spec.kind = "random-ap-weight";
    spec.depth = 8;
    spec.spread = 4.0;
    spec.seed = 123;
    const auto j = simulate::spec_to_json(spec);
    CHECK(j.at("spread").get<double>() == 4.0);
    CHECK(j.at("seed").get<std::uint64_t>() == 123);
    const auto back = simulate::spec_from_json(j);
    CHECK(simulate::spec_to_json(back) == j);

    simulate::GeneratorSpec power;
    power.kind = "dyadic-power-weight";
    power.depth = 6;
    power.alpha = 0.5;
    power.seed = 999;
    const auto pj = simulate::spec_to_json(power);
    CHECK(!pj.contains("seed"));  // the family is deterministic
    CHECK(pj.at("alpha").get<double>() == 0.5);

    simulate::GeneratorSpec walk;
    walk.kind = "gaussian-walk-euclid-3";
    walk.n = 32;
    walk.seed = 5;
    const auto wj = simulate::spec_to_json(walk);
    CHECK(wj.at("n").get<std::size_t>() == 32);
    const auto wback = simulate::spec_from_json(wj);
    CHECK(wback.d == 3);
    CHECK(simulate::generate_path(wback).coords == simulate::generate_path(walk).coords);
}

}  // TEST_SUITE
