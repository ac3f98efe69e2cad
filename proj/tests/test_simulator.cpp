#include <gtest/gtest.h>

#include <cmath>

#include "bdrelay/simulator.hpp"

using namespace bdrelay;

namespace {

SimConfig config(double db, PolicyKind kind, Thresholds t = {}, std::uint64_t n = 200'000) {
    SimConfig c;
    c.link = {1, 1, db_to_linear(db), 1};
    c.thresholds = t;
    c.kind = kind;
    c.n_slots = n;
    c.seed = 77;
    return c;
}

Metrics chain(const SimConfig& c) {
    return analyze(region_probs_exact(c.link), c.thresholds, c.caps, c.kind, c.link.r0);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Simulator, Deterministic) {
    const SimConfig c = config(10, PolicyKind::ThroughputEfficient, {1, 2}, 50'000);
    const SimResult a = run(c), b = run(c);
    EXPECT_EQ(a.state_visits, b.state_visits);
    EXPECT_EQ(a.delay_hist1, b.delay_hist1);
    EXPECT_EQ(a.delay_hist2, b.delay_hist2);
    EXPECT_EQ(a.metrics.r_sum, b.metrics.r_sum);
    EXPECT_EQ(a.metrics.t1_bar, b.metrics.t1_bar);
    SimConfig d = c;
    d.seed = 78;
    EXPECT_NE(run(d).metrics.r_sum, a.metrics.r_sum);
}

TEST(Simulator, ConservationAndBookkeeping) {
    for (auto kind : {PolicyKind::DelayEfficient, PolicyKind::ThroughputEfficient})
        for (Thresholds t : {Thresholds{0, 0}, Thresholds{3, 1}}) {
            const SimConfig c = config(7, kind, t, 100'000);
            const SimResult r = run(c);
            EXPECT_EQ(r.packets_in[0], r.packets_out[0] + static_cast<std::uint64_t>(r.final_queue.l1));
            EXPECT_EQ(r.packets_in[1], r.packets_out[1] + static_cast<std::uint64_t>(r.final_queue.l2));
            EXPECT_EQ(r.slots, c.n_slots - c.warmup_slots);
            double s = 0.0;
            for (double f : r.mode_freq) s += f;
            EXPECT_NEAR(s, 1.0, 1e-12);
            std::uint64_t visits = 0;
            for (auto v : r.state_visits) visits += v;
            EXPECT_EQ(visits, r.slots);
            EXPECT_GE(r.metrics.f_sys, 0.0);
            EXPECT_LE(r.metrics.f_sys, 1.0);
            ASSERT_FALSE(r.delay_hist1.empty());
            EXPECT_EQ(r.delay_hist1[0], 0u) << "minimum delay is one slot";
        }
}

TEST(Simulator, MinDelayAgreesWithChain) {
    const SimConfig c = config(10, PolicyKind::DelayEfficient, {}, 1'000'000);
    const SimResult s = run(c);
    const Metrics m = chain(c);
    EXPECT_LT(rel(s.metrics.r_sum, m.r_sum), 0.01);
    EXPECT_LT(rel(s.metrics.t1_bar, m.t1_bar), 0.02);
    EXPECT_LT(rel(s.metrics.t2_bar, m.t2_bar), 0.02);
}

TEST(Simulator, HighSnrLimit) {
    const SimConfig c = config(60, PolicyKind::DelayEfficient, {}, 200'000);
    const SimResult s = run(c);
    EXPECT_NEAR(s.metrics.t1_bar, 1.0, 0.01);
    EXPECT_NEAR(s.metrics.t2_bar, 1.0, 0.01);
    EXPECT_NEAR(s.metrics.r_sum, 1.0, 0.01);
}

TEST(Simulator, LittlesLawSelfConsistent) {
    for (auto kind : {PolicyKind::DelayEfficient, PolicyKind::ThroughputEfficient}) {
        const SimResult s = run(config(12, kind, {2, 2}, 500'000));
        const Metrics& m = s.metrics;
        EXPECT_LT(rel(m.t1_bar, m.q1_bar / m.r12), 0.02);
        EXPECT_LT(rel(m.t2_bar, m.q2_bar / m.r21), 0.02);
    }
}

TEST(Simulator, DelayFloor) {
    for (double db : {0.0, 5.0, 15.0})
        for (auto kind : {PolicyKind::DelayEfficient, PolicyKind::ThroughputEfficient}) {
            const SimConfig c = config(db, kind, {}, 200'000);
            const SimResult s = run(c);
            const MinDelays lo = lemma1_min_delays(region_probs_exact(c.link));
            // geometric delay: sd = sqrt(1 - p) / p per packet
            auto bound = [&](double t, std::uint64_t n) {
                const double p = 1.0 / t;
                return t - 3.0 * std::sqrt(1.0 - p) / p / std::sqrt(static_cast<double>(n));
            };
            std::uint64_t n1 = 0, n2 = 0;
            for (auto v : s.delay_hist1) n1 += v;
            for (auto v : s.delay_hist2) n2 += v;
            EXPECT_GE(s.metrics.t1_bar, bound(lo.t1, n1));
            EXPECT_GE(s.metrics.t2_bar, bound(lo.t2, n2));
        }
}

TEST(Simulator, QueueBoundsUnderFuzz) {
    Rng fuzz = make_stream(3, StreamTag::MonteCarlo);
    for (int i = 0; i < 30; ++i) {
        SimConfig c;
        c.caps = {1 + static_cast<int>(uniform_index(fuzz, 5)), 1 + static_cast<int>(uniform_index(fuzz, 5))};
        c.thresholds = {static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(c.caps.l1_max + 1))),
                        static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(c.caps.l2_max + 1)))};
        c.link = {0.2 + uniform01(fuzz), 0.2 + uniform01(fuzz), db_to_linear(-5 + 30 * uniform01(fuzz)), 1};
        c.kind = uniform_index(fuzz, 2) ? PolicyKind::DelayEfficient : PolicyKind::ThroughputEfficient;
        c.n_slots = 20'000;
        c.warmup_slots = 100;
        c.seed = i;
        EXPECT_NO_THROW(run(c));  // run() throws on a bound or feasibility violation
    }
}

TEST(Simulator, RejectsBadConfig) {
    SimConfig c = config(10, PolicyKind::DelayEfficient);
    c.warmup_slots = c.n_slots;
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Baseline, ConventionalDelayIsOne) {
    SimConfig c = config(10, PolicyKind::DelayEfficient, {}, 100'000);
    const SimResult r = run_baseline(BaselineKind::MabcConventional, c);
    EXPECT_EQ(r.metrics.t1_bar, 1.0);
    EXPECT_EQ(r.metrics.t2_bar, 1.0);
    std::uint64_t n = 0;
    for (std::size_t d = 0; d < r.delay_hist1.size(); ++d)
        if (d != 1) n += r.delay_hist1[d];
    EXPECT_EQ(n, 0u);
    EXPECT_EQ(r.packets_in[0], r.packets_out[0] + r.packets_dropped[0] + static_cast<std::uint64_t>(r.final_queue.l1));
    EXPECT_EQ(r.slots, c.n_slots);
    // Each flow: multiple access in R1 on odd slots, broadcast with both links up.
    const RegionProbs p = region_probs_exact(c.link);
    EXPECT_NEAR(r.metrics.r12, 0.5 * p.r1() * (p.r1() + p.r2()), 0.005);
}

TEST(Baseline, BufferedHorizon) {
    SimConfig c = config(20, PolicyKind::DelayEfficient, {}, 100'000);
    c.link.omega1 = 0.25;
    const SimResult r = run_baseline(BaselineKind::MabcBuffered, c);
    EXPECT_EQ(r.packets_in[0], r.packets_out[0] + static_cast<std::uint64_t>(r.final_queue.l1));
    EXPECT_EQ(r.packets_in[0], r.packets_in[1]);
    EXPECT_GT(r.metrics.t1_bar, 1000.0);
    c.n_slots = 99'999;
    EXPECT_THROW(run_baseline(BaselineKind::MabcBuffered, c), ConfigError);
}

TEST(Baseline, ProposedBeatsBufferedAsymmetric) {
    SimConfig c = config(20, PolicyKind::DelayEfficient, {}, 200'000);
    c.link.omega1 = 0.25;
    EXPECT_GT(run(c).metrics.r_sum, run_baseline(BaselineKind::MabcBuffered, c).metrics.r_sum);
}

TEST(Baseline, VanishingSnr) {
    SimConfig c = config(-40, PolicyKind::DelayEfficient, {}, 100'000);
    EXPECT_LT(run(c).metrics.r_sum, 1e-3);
    c.kind = PolicyKind::ThroughputEfficient;
    EXPECT_LT(run(c).metrics.r_sum, 1e-3);
    EXPECT_LT(run_baseline(BaselineKind::MabcConventional, c).metrics.r_sum, 1e-3);
    EXPECT_LT(run_baseline(BaselineKind::MabcBuffered, c).metrics.r_sum, 1e-3);
}
