#pragma once

// Deterministic randomness for reproducible experiments.
//
// The generator is pinned: SplitMix64 (Steele/Lea/Vigna), a counter-based
// splittable generator with published reference vectors.  Normal variates
// come from the inverse-CDF method (Wichura's PPND16 rational minimax
// approximation, accurate to ~1e-15 relative), so the draw stream never
// depends on platform rejection behaviour.  Replicate k of a master seed
// draws from substream_seed(seed, k); mix64 is a bijection, so distinct k
// give distinct substream states under any fixed master seed.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace varmart::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) noexcept {
    return mix64(seed ^ mix64(k + kGolden));
}

// ===== Inverse normal CDF (PPND16) =====

namespace detail {

template <std::size_t N>
constexpr double poly(const double (&c)[N], double x) noexcept {
    double r = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
    return r;
}

}  // namespace detail

// Quantile of the standard normal at u in (0,1).
inline double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u outside (0,1)");
    static constexpr double A[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static constexpr double B[8] = {
        1.0,                      4.2313330701600911252e1, 6.8718700749205790830e2,
        5.3941960214247511077e3,  2.1213794301586595867e4, 3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static constexpr double C[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
        3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double D[8] = {
        1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double E[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double F[8] = {
        1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * detail::poly(A, r) / detail::poly(B, r);
    }
    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = detail::poly(C, r) / detail::poly(D, r);
    } else {
        r -= 5.0;
        x = detail::poly(E, r) / detail::poly(F, r);
    }
    return (q < 0.0) ? -x : x;
}

// ===== SplitMix64 =====

struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state(seed) {}

    constexpr std::uint64_t next() noexcept {
        state += kGolden;
        return mix64(state);
    }

    // Uniform on the open interval (0,1): 53-bit draw centered in its bin,
    // so 0 and 1 are unreachable and normal_quantile is always defined.
    double next_unit() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile(next_unit()); }

    // Rademacher sign from the top bit.
    double next_sign() noexcept { return (next() >> 63) ? 1.0 : -1.0; }
};

}  // namespace varmart::rng
