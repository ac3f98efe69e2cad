// policy.hpp - delay-aware mode selection.
//
// Each mode k gets an integer utility Lambda_k from the previous slot's queue
// lengths:
//
//   Lambda_1 = t1 - l1            Lambda_4 = [l2 - t2]^+
//   Lambda_2 = t2 - l2            Lambda_5 = [l1 - t1]^+
//   Lambda_3 = min(L1, L2)        Lambda_6 = max(L4, L5)
//   Lambda_7 = 0
//
// Selection narrows the feasible set in two stages: the delay-efficient policy
// keeps the argmax of Lambda and then the argmax of tau among the survivors;
// the throughput-efficient policy applies the two stages in the opposite
// order. Whatever remains is broken uniformly at random.

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <string_view>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/mode_space.hpp"
#include "bdrelay/random.hpp"

namespace bdrelay {

struct Thresholds {
    int l1_thr = 0;
    int l2_thr = 0;

    void validate(const BufferCaps& caps) const {
        if (l1_thr < 0 || l1_thr > caps.l1_max) throw ConfigError("l1_thr", "must lie in [0, l1_max]");
        if (l2_thr < 0 || l2_thr > caps.l2_max) throw ConfigError("l2_thr", "must lie in [0, l2_max]");
    }
    bool operator==(const Thresholds&) const = default;
};

enum class PolicyKind { DelayEfficient, ThroughputEfficient };

inline std::string_view to_string(PolicyKind k) {
    return k == PolicyKind::DelayEfficient ? "delay" : "throughput";
}

using Utilities = std::array<int, 7>;  // Lambda_1 .. Lambda_7

inline Utilities utilities(const QueueState& prev, const Thresholds& t) {
    Utilities u{};
    u[0] = t.l1_thr - prev.l1;
    u[1] = t.l2_thr - prev.l2;
    u[2] = std::min(u[0], u[1]);
    u[3] = std::max(prev.l2 - t.l2_thr, 0);
    u[4] = std::max(prev.l1 - t.l1_thr, 0);
    u[5] = std::max(u[3], u[4]);
    u[6] = 0;
    return u;
}

struct SelectionOutcome {
    int chosen = 7;
    ModeSet tie_set;
    ModeSet feasible;
    Utilities utilities{};
};

namespace detail {

template <typename Score>
ModeSet argmax_over(const ModeSet& candidates, Score&& score) {
    int best = std::numeric_limits<int>::min();
    candidates.for_each([&](int k) { best = std::max(best, score(k)); });
    ModeSet out;
    candidates.for_each([&](int k) {
        if (score(k) == best) out.insert(k);
    });
    return out;
}

}  // namespace detail

// Final candidate set U before the die roll.
inline ModeSet final_candidates(const ModeSet& feasible, const Utilities& u, PolicyKind kind) {
    auto by_lambda = [&](int k) { return u[static_cast<std::size_t>(k - 1)]; };
    auto by_tau = [](int k) { return mode(k).tau; };
    if (kind == PolicyKind::DelayEfficient)
        return detail::argmax_over(detail::argmax_over(feasible, by_lambda), by_tau);
    return detail::argmax_over(detail::argmax_over(feasible, by_tau), by_lambda);
}

inline SelectionOutcome select_mode(SnrRegion r, const QueueState& prev, const BufferCaps& caps,
                                    const Thresholds& t, PolicyKind kind, Rng& tie_rng) {
    SelectionOutcome out;
    out.feasible = feasible_set(r, prev, caps);
    out.utilities = utilities(prev, t);
    out.tie_set = final_candidates(out.feasible, out.utilities, kind);

    if (out.tie_set.size() == 1) {
        out.tie_set.for_each([&](int k) { out.chosen = k; });
        return out;
    }
    std::size_t face = uniform_index(tie_rng, out.tie_set.size());
    out.tie_set.for_each([&](int k) {
        if (face-- == 0) out.chosen = k;
    });
    return out;
}

using ModeDistribution = std::array<double, 7>;  // Pr{mode k}, k = 1..7

// The die expanded: uniform mass over the final candidate set.
inline ModeDistribution selection_distribution(SnrRegion r, const QueueState& prev, const BufferCaps& caps,
                                               const Thresholds& t, PolicyKind kind) {
    const ModeSet u = final_candidates(feasible_set(r, prev, caps), utilities(prev, t), kind);
    ModeDistribution d{};
    const double w = 1.0 / static_cast<double>(u.size());
    u.for_each([&](int k) { d[static_cast<std::size_t>(k - 1)] = w; });
    return d;
}

}  // namespace bdrelay
