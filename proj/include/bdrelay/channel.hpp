// channel.hpp - block Rayleigh fading links and the five SNR regions.
//
// The instantaneous SNR pair (g1, g2) of the user1-relay and user2-relay links
// falls into one of five regions according to which transmissions decode at
// the fixed rate r0:
//
//   R1  g1 >= thr, g2 >= thr, g1 + g2 >= thr_sum   every mode decodes
//   R2  g1 >= thr, g2 >= thr, g1 + g2 <  thr_sum   all but multiple access
//   R3  g1 >= thr, g2 <  thr                       only link 1
//   R4  g1 <  thr, g2 >= thr                       only link 2
//   R5  g1 <  thr, g2 <  thr                       nothing decodes
//
// with thr = 2^r0 - 1 and thr_sum = 2^(2 r0) - 1. Equality counts as success.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "bdrelay/error.hpp"
#include "bdrelay/random.hpp"

namespace bdrelay {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct LinkConfig {
    double omega1 = 1.0;  // mean fading gain, user 1 <-> relay
    double omega2 = 1.0;  // mean fading gain, user 2 <-> relay
    double gamma = 10.0;  // transmit SNR, linear
    double r0 = 1.0;      // fixed rate, bits/symbol

    double gamma_thr() const { return std::exp2(r0) - 1.0; }
    double gamma_thr_sum() const { return std::exp2(2.0 * r0) - 1.0; }

    // Mean instantaneous SNR of each link.
    double mean_snr1() const { return omega1 * gamma; }
    double mean_snr2() const { return omega2 * gamma; }

    void validate() const {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(omega1)) throw ConfigError("omega1", "must be finite and > 0");
        if (!positive(omega2)) throw ConfigError("omega2", "must be finite and > 0");
        if (!positive(gamma)) throw ConfigError("gamma", "must be finite and > 0");
        if (!positive(r0)) throw ConfigError("r0", "must be finite and > 0");
    }
};

struct SnrPair {
    double g1 = 0.0;
    double g2 = 0.0;
};

enum class SnrRegion : std::uint8_t { R1 = 1, R2, R3, R4, R5 };

inline constexpr std::array<SnrRegion, 5> kAllSnrRegions = {
    SnrRegion::R1, SnrRegion::R2, SnrRegion::R3, SnrRegion::R4, SnrRegion::R5};

inline constexpr std::size_t region_index(SnrRegion r) { return static_cast<std::size_t>(r) - 1; }

// Probability of each SNR region, indexed by region_index.
struct RegionProbs {
    std::array<double, 5> p{};

    double operator[](SnrRegion r) const { return p[region_index(r)]; }
    double& operator[](SnrRegion r) { return p[region_index(r)]; }

    double r1() const { return p[0]; }
    double r2() const { return p[1]; }
    double r3() const { return p[2]; }
    double r4() const { return p[3]; }
    double r5() const { return p[4]; }

    double sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

    // Link-1 / link-2 success probabilities.
    double link1_up() const { return p[0] + p[1] + p[2]; }
    double link2_up() const { return p[0] + p[1] + p[3]; }
};

inline SnrRegion classify_region(const SnrPair& s, const LinkConfig& c) {
    const double thr = c.gamma_thr();
    const bool up1 = s.g1 >= thr;
    const bool up2 = s.g2 >= thr;
    if (up1 && up2) return (s.g1 + s.g2 >= c.gamma_thr_sum()) ? SnrRegion::R1 : SnrRegion::R2;
    if (up1) return SnrRegion::R3;
    if (up2) return SnrRegion::R4;
    return SnrRegion::R5;
}

inline SnrPair sample_snr(const LinkConfig& c, Rng& rng) {
    SnrPair s;
    s.g1 = exponential(rng, c.mean_snr1());
    s.g2 = exponential(rng, c.mean_snr2());
    return s;
}

namespace detail {

// (1 - exp(-d w)) / d, continuous through d = 0.
inline double one_minus_exp_over(double d, double w) {
    if (d == 0.0) return w;
    return -std::expm1(-d * w) / d;
}

}  // namespace detail

// Closed-form region probabilities for independent Rayleigh links.
//
// With rates l_j = 1 / (omega_j gamma) and tails p_j = exp(-l_j thr), the
// quadrant regions are products of tails. R2 is the triangle
// {g1 >= thr, g2 >= thr, g1 + g2 < thr_sum}; writing w = thr_sum - 2 thr and
// shifting both axes by thr,
//
//   P(R2) = l1 e^{-(l1+l2) thr} int_0^w e^{-l1 u} (1 - e^{-l2 (w-u)}) du
//         = e^{-(l1+l2) thr} [ (1 - e^{-l1 w}) - l1 e^{-l2 w} (1 - e^{-(l1-l2) w}) / (l1 - l2) ]
//
// and R1 takes the remainder of the upper quadrant.
inline RegionProbs region_probs_exact(const LinkConfig& c) {
    c.validate();
    const double thr = c.gamma_thr();
    const double w = c.gamma_thr_sum() - 2.0 * thr;
    const double l1 = 1.0 / c.mean_snr1();
    const double l2 = 1.0 / c.mean_snr2();

    const double p1 = std::exp(-l1 * thr);
    const double p2 = std::exp(-l2 * thr);
    const double q1 = -std::expm1(-l1 * thr);
    const double q2 = -std::expm1(-l2 * thr);

    // l1 (e^{-l2 w} - e^{-l1 w}) / (l1 - l2), factored around the smaller rate
    const double inner = -std::expm1(-l1 * w) -
                         l1 * std::exp(-std::min(l1, l2) * w) * detail::one_minus_exp_over(std::abs(l1 - l2), w);
    double pr2 = p1 * p2 * inner;
    if (pr2 < 0.0) pr2 = 0.0;

    RegionProbs out;
    out.p[1] = pr2;
    out.p[0] = p1 * p2 - pr2;
    out.p[2] = p1 * q2;
    out.p[3] = q1 * p2;
    out.p[4] = q1 * q2;
    return out;
}

// Empirical region frequencies over n fading draws.
inline RegionProbs region_probs_monte_carlo(const LinkConfig& c, std::uint64_t n, Rng& rng) {
    c.validate();
    if (n == 0) throw ConfigError("n", "sample count must be >= 1");
    std::array<std::uint64_t, 5> counts{};
    for (std::uint64_t i = 0; i < n; ++i) ++counts[region_index(classify_region(sample_snr(c, rng), c))];
    RegionProbs out;
    for (std::size_t m = 0; m < 5; ++m) out.p[m] = static_cast<double>(counts[m]) / static_cast<double>(n);
    return out;
}

}  // namespace bdrelay
