// asymptotics.hpp - high-SNR expansions for Rayleigh fading.
//
// Outage probabilities decay as coefficient / gamma; the structs below keep the
// coefficient and evaluate it at a given gamma on request.

#pragma once

#include <algorithm>
#include <cmath>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/mode_space.hpp"

namespace bdrelay {

// First-order region probabilities. Not normalised; for comparison only,
// never fed to the chain builders.
inline RegionProbs region_probs_asymptotic(const LinkConfig& c) {
    c.validate();
    const double thr = c.gamma_thr();
    const double sum = c.gamma_thr_sum();
    const double g = c.gamma;
    const double w1 = c.omega1, w2 = c.omega2;
    RegionProbs out;
    out.p[0] = 1.0 - (w1 + w2) * thr / (w1 * w2 * g);
    out.p[1] = (2.0 * thr * thr + sum * sum / 2.0 - 2.0 * thr * sum) / (w1 * w2 * g * g);
    out.p[2] = thr / (w2 * g);
    out.p[3] = thr / (w1 * g);
    out.p[4] = thr * thr / (w1 * w2 * g * g);
    return out;
}

struct AsymptoticMetrics {
    // F = coeff / gamma to first order.
    double f_sys_coeff = 0.0;
    double f12_coeff = 0.0;
    double f21_coeff = 0.0;
    double r_sum_limit = 0.0;
    double t1_limit = 1.0;
    double t2_limit = 1.0;
    double snr_gap_db = 0.0;

    double f_sys(double gamma) const { return f_sys_coeff / gamma; }
    double f12(double gamma) const { return f12_coeff / gamma; }
    double f21(double gamma) const { return f21_coeff / gamma; }
};

// SNR gap between the delay-efficient minimum-delay outage and the
// delay-unconstrained bound; at most 10 log10(2).
inline double snr_gap(const LinkConfig& c) {
    c.validate();
    const double lo = std::min(c.omega1, c.omega2);
    const double hi = std::max(c.omega1, c.omega2);
    return 10.0 * std::log10(1.0 + lo / hi);
}

// Outage coefficient of the delay-unconstrained bound: thr / Omega_min.
// Coincides with the throughput-efficient asymptote on symmetric links.
inline double unconstrained_outage_coeff(const LinkConfig& c) {
    c.validate();
    return c.gamma_thr() / std::min(c.omega1, c.omega2);
}

// Delay-efficient policy at thresholds (0,0).
inline AsymptoticMetrics high_snr_delay_efficient(const LinkConfig& c) {
    c.validate();
    const double thr = c.gamma_thr();
    const double w1 = c.omega1, w2 = c.omega2;
    AsymptoticMetrics out;
    out.f_sys_coeff = (w1 + w2) * thr / (w1 * w2);
    out.f12_coeff = (w1 + 3.0 * w2) * thr / (2.0 * w1 * w2);
    out.f21_coeff = (3.0 * w1 + w2) * thr / (2.0 * w1 * w2);
    out.r_sum_limit = c.r0;
    out.t1_limit = 1.0;
    out.t2_limit = 1.0;
    out.snr_gap_db = snr_gap(c);
    return out;
}

// Throughput-efficient policy at thresholds (0,0), symmetric links only.
// Delays are (l1max^2 + l2max - 1) / (l1max + l2max - 1) and its mirror.
inline AsymptoticMetrics high_snr_throughput_efficient(const LinkConfig& c, const BufferCaps& caps) {
    c.validate();
    caps.validate();
    if (c.omega1 != c.omega2)
        throw OutOfScopeError("throughput-efficient high-SNR expansion is stated for omega1 == omega2 only");
    const double l1 = caps.l1_max, l2 = caps.l2_max;
    AsymptoticMetrics out;
    out.f_sys_coeff = c.gamma_thr() / c.omega1;
    out.f12_coeff = out.f_sys_coeff;
    out.f21_coeff = out.f_sys_coeff;
    out.r_sum_limit = c.r0;
    out.t1_limit = (l1 * l1 + l2 - 1.0) / (l1 + l2 - 1.0);
    out.t2_limit = (l2 * l2 + l1 - 1.0) / (l1 + l2 - 1.0);
    out.snr_gap_db = 0.0;
    return out;
}

}  // namespace bdrelay
