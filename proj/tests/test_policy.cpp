#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bdrelay/policy.hpp"

using namespace bdrelay;

namespace {

const BufferCaps kCaps{10, 10};
constexpr auto kDelay = PolicyKind::DelayEfficient;
constexpr auto kThroughput = PolicyKind::ThroughputEfficient;

}  // namespace

TEST(Policy, UtilitiesExamples) {
    const Thresholds t{5, 5};
    EXPECT_EQ(utilities({0, 3}, t), (Utilities{5, 2, 2, 0, 0, 0, 0}));
    EXPECT_EQ(utilities({5, 5}, t), (Utilities{0, 0, 0, 0, 0, 0, 0}));
    EXPECT_EQ(utilities({6, 5}, t), (Utilities{-1, 0, -1, 0, 1, 1, 0}));
}

TEST(Policy, SelectExamples) {
    Rng rng = make_stream(1, StreamTag::TieBreak);
    const Thresholds t{5, 5};
    EXPECT_EQ(select_mode(SnrRegion::R2, {0, 3}, kCaps, t, kDelay, rng).chosen, 1);
    EXPECT_EQ(select_mode(SnrRegion::R1, {6, 5}, kCaps, t, kDelay, rng).chosen, 6);
    EXPECT_EQ(select_mode(SnrRegion::R1, {6, 5}, kCaps, t, kThroughput, rng).chosen, 6);

    const auto d = select_mode(SnrRegion::R1, {6, 5}, kCaps, t, kDelay, rng);
    EXPECT_EQ(d.tie_set, ModeSet{6});
    EXPECT_EQ(d.feasible, ModeSet::all());
    EXPECT_EQ(final_candidates(d.feasible, d.utilities, kThroughput), ModeSet{6});

    for (auto kind : {kDelay, kThroughput})
        for (int l1 = 0; l1 <= 10; ++l1) EXPECT_EQ(select_mode(SnrRegion::R5, {l1, 3}, kCaps, t, kind, rng).chosen, 7);
}

TEST(Policy, DistributionExamples) {
    const ModeDistribution d = selection_distribution(SnrRegion::R2, {0, 0}, kCaps, {0, 0}, kDelay);
    EXPECT_EQ(d, (ModeDistribution{0.5, 0.5, 0, 0, 0, 0, 0}));
    EXPECT_EQ(selection_distribution(SnrRegion::R5, {4, 4}, kCaps, {2, 2}, kThroughput),
              (ModeDistribution{0, 0, 0, 0, 0, 0, 1}));
}

TEST(Policy, NoDrawWithoutTie) {
    Rng a = make_stream(3, StreamTag::TieBreak), b = make_stream(3, StreamTag::TieBreak);
    select_mode(SnrRegion::R1, {6, 5}, kCaps, {5, 5}, kDelay, a);
    EXPECT_EQ(a(), b());
}

// Fuzz: chosen in tie set in feasible set; distribution support equals the
// tie set; sums to one.
TEST(Policy, FuzzInvariants) {
    Rng fuzz = make_stream(17, StreamTag::MonteCarlo), ties = make_stream(17, StreamTag::TieBreak);
    for (int i = 0; i < 20000; ++i) {
        const BufferCaps caps{1 + static_cast<int>(uniform_index(fuzz, 8)), 1 + static_cast<int>(uniform_index(fuzz, 8))};
        const QueueState q{static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(caps.l1_max + 1))),
                           static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(caps.l2_max + 1)))};
        const Thresholds t{static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(caps.l1_max + 1))),
                           static_cast<int>(uniform_index(fuzz, static_cast<std::size_t>(caps.l2_max + 1)))};
        const SnrRegion r = kAllSnrRegions[uniform_index(fuzz, 5)];
        const PolicyKind kind = uniform_index(fuzz, 2) ? kDelay : kThroughput;
        const SelectionOutcome s = select_mode(r, q, caps, t, kind, ties);
        ASSERT_TRUE(s.tie_set.contains(s.chosen));
        ASSERT_EQ(s.tie_set & s.feasible, s.tie_set);
        ASSERT_EQ(s.feasible, feasible_set(r, q, caps));

        const ModeDistribution d = selection_distribution(r, q, caps, t, kind);
        double sum = 0.0;
        for (int k = 1; k <= 7; ++k) {
            sum += d[static_cast<std::size_t>(k - 1)];
            ASSERT_EQ(d[static_cast<std::size_t>(k - 1)] > 0.0, s.tie_set.contains(k));
        }
        ASSERT_NEAR(sum, 1.0, 1e-15);
    }
}

TEST(Policy, ThresholdSteering) {
    for (const BufferCaps caps : {BufferCaps{3, 3}, BufferCaps{4, 2}, BufferCaps{5, 5}})
        for (int t1 = 0; t1 <= caps.l1_max; ++t1)
            for (int t2 = 0; t2 <= caps.l2_max; ++t2)
                for (int l1 = 0; l1 <= caps.l1_max; ++l1)
                    for (int l2 = 0; l2 <= caps.l2_max; ++l2)
                        for (SnrRegion r : kAllSnrRegions) {
                            if (l1 <= t1) continue;
                            const ModeSet f = feasible_set(r, {l1, l2}, caps);
                            if (!f.contains(5) && !f.contains(6)) continue;
                            const ModeSet u = final_candidates(f, utilities({l1, l2}, {t1, t2}), kDelay);
                            EXPECT_FALSE(u.contains(1) || u.contains(3));
                        }
}

TEST(Policy, ArgmaxShiftInvariant) {
    for (int l1 = 0; l1 <= 10; ++l1)
        for (int l2 = 0; l2 <= 10; ++l2)
            for (SnrRegion r : kAllSnrRegions)
                for (auto kind : {kDelay, kThroughput}) {
                    const ModeSet f = feasible_set(r, {l1, l2}, kCaps);
                    Utilities u = utilities({l1, l2}, {3, 6});
                    const ModeSet base = final_candidates(f, u, kind);
                    for (int& x : u) x += 17;
                    EXPECT_EQ(final_candidates(f, u, kind), base);
                }
}

// Sampled selections against the expanded die: chi-square, 0.001 level.
TEST(Policy, SamplesMatchDistribution) {
    Rng ties = make_stream(5, StreamTag::TieBreak);
    struct Case {
        SnrRegion r;
        QueueState q;
        Thresholds t;
        PolicyKind kind;
    };
    const Case cases[] = {
        {SnrRegion::R2, {0, 0}, {0, 0}, kDelay},
        {SnrRegion::R2, {0, 2}, {0, 2}, kDelay},
        {SnrRegion::R2, {0, 0}, {3, 3}, kThroughput},
        {SnrRegion::R3, {4, 4}, {4, 4}, kThroughput},
    };
    // chi-square 0.999 quantiles for 1..3 degrees of freedom
    const double crit[] = {0.0, 10.828, 13.816, 16.266};
    for (const Case& c : cases) {
        const ModeDistribution d = selection_distribution(c.r, c.q, kCaps, c.t, c.kind);
        std::map<int, int> counts;
        const int n = 10000;
        for (int i = 0; i < n; ++i) ++counts[select_mode(c.r, c.q, kCaps, c.t, c.kind, ties).chosen];
        double chi2 = 0.0;
        int support = 0;
        for (int k = 1; k <= 7; ++k) {
            const double e = d[static_cast<std::size_t>(k - 1)] * n;
            if (e == 0.0) {
                EXPECT_EQ(counts[k], 0);
                continue;
            }
            ++support;
            chi2 += (counts[k] - e) * (counts[k] - e) / e;
        }
        ASSERT_GE(support, 2);
        EXPECT_LT(chi2, crit[support - 1]);
    }
}

TEST(Policy, SeededReproducible) {
    Rng a = make_stream(8, StreamTag::TieBreak), b = make_stream(8, StreamTag::TieBreak);
    for (int i = 0; i < 1000; ++i)
        ASSERT_EQ(select_mode(SnrRegion::R2, {0, 0}, kCaps, {0, 0}, kDelay, a).chosen,
                  select_mode(SnrRegion::R2, {0, 0}, kCaps, {0, 0}, kDelay, b).chosen);
}

TEST(Policy, ThresholdValidate) {
    EXPECT_THROW((Thresholds{11, 0}.validate(kCaps)), ConfigError);
    EXPECT_THROW((Thresholds{0, -1}.validate(kCaps)), ConfigError);
    EXPECT_NO_THROW((Thresholds{10, 10}.validate(kCaps)));
}
