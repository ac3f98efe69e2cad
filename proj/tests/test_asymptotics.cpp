#include <gtest/gtest.h>

#include <cmath>

#include "bdrelay/asymptotics.hpp"
#include "bdrelay/markov_engine.hpp"

using namespace bdrelay;

namespace {

LinkConfig at_db(double w1, double w2, double db) { return {w1, w2, db_to_linear(db), 1.0}; }

double chain_fsys(const LinkConfig& c, PolicyKind kind) {
    return analyze(region_probs_exact(c), {0, 0}, {10, 10}, kind, c.r0).f_sys;
}

}  // namespace

TEST(Asymptotics, RegionProbExamples) {
    const LinkConfig c{1, 1, 1e4, 1};
    const RegionProbs a = region_probs_asymptotic(c);
    EXPECT_DOUBLE_EQ(a.r3(), 1e-4);
    EXPECT_DOUBLE_EQ(a.r4(), 1e-4);
    EXPECT_DOUBLE_EQ(a.r5(), 1e-8);
    EXPECT_DOUBLE_EQ(a.r2(), 0.5e-8);  // (thr_sum - 2 thr)^2 / 2 = 1/2
    EXPECT_DOUBLE_EQ(a.r1(), 1 - 2e-4);
}

TEST(Asymptotics, RegionProbsAgainstExact) {
    for (const LinkConfig& c : {LinkConfig{1, 1, 1e4, 1}, LinkConfig{0.25, 1, 1e4, 1}, LinkConfig{1, 3, 1e5, 2}}) {
        const RegionProbs a = region_probs_asymptotic(c), e = region_probs_exact(c);
        for (std::size_t m = 0; m < 5; ++m) EXPECT_LT(std::abs(a.p[m] - e.p[m]) / e.p[m], 0.01) << m + 1;
    }
    // P_R3 relative error with gamma >= 1e4
    for (double g : {1e4, 1e5, 1e7}) {
        const LinkConfig c{0.5, 2, g, 1};
        const double lead = c.gamma_thr() / (c.omega2 * g);
        EXPECT_LT(std::abs(region_probs_exact(c).r3() - lead) / lead, 0.01);
    }
}

TEST(Asymptotics, DelayEfficientExamples) {
    const LinkConfig c{1, 1, 1e4, 1};
    const AsymptoticMetrics a = high_snr_delay_efficient(c);
    EXPECT_DOUBLE_EQ(a.f_sys(c.gamma), 2e-4);
    EXPECT_DOUBLE_EQ(a.r_sum_limit, 1.0);
    EXPECT_EQ(a.t1_limit, 1.0);
    EXPECT_EQ(a.t2_limit, 1.0);
    EXPECT_DOUBLE_EQ(a.f_sys_coeff, 0.5 * (a.f12_coeff + a.f21_coeff));

    const AsymptoticMetrics b = high_snr_delay_efficient({0.25, 1, 1, 1});
    EXPECT_DOUBLE_EQ(b.f12_coeff, 6.5);
    EXPECT_DOUBLE_EQ(b.f21_coeff, (0.75 + 1) / 0.5);
}

TEST(Asymptotics, DelayEfficientAgainstChain) {
    for (const LinkConfig& c : {at_db(1, 1, 40), at_db(0.25, 1, 40)}) {
        const AsymptoticMetrics a = high_snr_delay_efficient(c);
        const Metrics m = analyze(region_probs_exact(c), {0, 0}, {10, 10}, PolicyKind::DelayEfficient, 1.0);
        EXPECT_LT(std::abs(m.f_sys - a.f_sys(c.gamma)) / a.f_sys(c.gamma), 0.02);
        EXPECT_LT(std::abs(m.f12 - a.f12(c.gamma)) / a.f12(c.gamma), 0.02);
        EXPECT_LT(std::abs(m.f21 - a.f21(c.gamma)) / a.f21(c.gamma), 0.02);
    }
}

TEST(Asymptotics, Gap) {
    EXPECT_NEAR(snr_gap({1, 1, 1, 1}), 3.0102999566398120, 1e-12);
    EXPECT_NEAR(snr_gap({0.25, 1, 1, 1}), 0.969100130081, 1e-11);
    EXPECT_NEAR(snr_gap({1, 0.25, 1, 1}), 0.969100130081, 1e-11);
    EXPECT_LT(snr_gap({1e-9, 1, 1, 1}), 1e-8);
    for (double w : {0.01, 0.3, 0.9, 1.0, 5.0}) EXPECT_LE(snr_gap({w, 1, 1, 1}), 3.0103);
    // The gap is the ratio of the delay-efficient coefficient to thr / omega_min.
    const LinkConfig c{0.25, 1, 1, 1};
    EXPECT_NEAR(linear_to_db(high_snr_delay_efficient(c).f_sys_coeff / unconstrained_outage_coeff(c)), snr_gap(c),
                1e-12);
}

TEST(Asymptotics, ThroughputEfficient) {
    const LinkConfig c{1, 1, 1e4, 1};
    const AsymptoticMetrics a = high_snr_throughput_efficient(c, {10, 10});
    EXPECT_DOUBLE_EQ(a.f_sys(c.gamma), 1e-4);
    EXPECT_DOUBLE_EQ(a.t1_limit, 109.0 / 19.0);
    EXPECT_DOUBLE_EQ(a.t2_limit, 109.0 / 19.0);
    EXPECT_DOUBLE_EQ(high_snr_throughput_efficient(c, {1, 1}).t1_limit, 1.0);
    const AsymptoticMetrics b = high_snr_throughput_efficient(c, {4, 6});
    EXPECT_DOUBLE_EQ(b.t1_limit, 21.0 / 9.0);
    EXPECT_DOUBLE_EQ(b.t2_limit, 39.0 / 9.0);
    EXPECT_THROW(high_snr_throughput_efficient({0.25, 1, 1e4, 1}, {10, 10}), OutOfScopeError);
}

TEST(Asymptotics, ThroughputEfficientDelayAgainstChain) {
    const LinkConfig c = at_db(1, 1, 60);
    const Metrics m = analyze(region_probs_exact(c), {0, 0}, {10, 10}, PolicyKind::ThroughputEfficient, 1.0);
    EXPECT_NEAR(m.t1_bar, 109.0 / 19.0, 0.01 * 109.0 / 19.0);
    EXPECT_NEAR(m.t2_bar, 109.0 / 19.0, 0.01 * 109.0 / 19.0);
}

TEST(Asymptotics, ConvergenceMonotone) {
    double prev = INFINITY;
    for (double db : {30.0, 40.0, 50.0, 60.0}) {
        const LinkConfig c = at_db(1, 1, db);
        const double a = high_snr_delay_efficient(c).f_sys(c.gamma);
        const double err = std::abs(chain_fsys(c, PolicyKind::DelayEfficient) - a) / a;
        EXPECT_LT(err, prev) << db;
        prev = err;
    }
}

// With finite buffers the throughput-efficient chain sits a factor L / (L - 1),
// L = l1max + l2max, above thr / omega.
TEST(Asymptotics, ThroughputEfficientFiniteBufferOutage) {
    const LinkConfig c = at_db(1, 1, 60);
    for (int cap : {2, 3, 5, 10, 20}) {
        const double f = analyze(region_probs_exact(c), {0, 0}, {cap, cap}, PolicyKind::ThroughputEfficient, 1.0).f_sys;
        const double lead = high_snr_throughput_efficient(c, {cap, cap}).f_sys(c.gamma);
        const double l = 2.0 * cap;
        EXPECT_NEAR(f / lead, l / (l - 1.0), 1e-4) << cap;
    }
}
