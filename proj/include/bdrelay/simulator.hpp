// simulator.hpp - slot-level Monte Carlo of the protocol and the MABC baselines.
//
// Packets are tokens carrying their arrival slot. A packet that enters a
// buffer at the end of slot i and leaves at the end of slot j has delay j - i.
// Statistics cover slots warmup_slots + 1 .. n_slots; packets still queued at
// the end count towards the mean queue length but not the delay.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/markov_engine.hpp"
#include "bdrelay/mode_space.hpp"
#include "bdrelay/policy.hpp"
#include "bdrelay/random.hpp"

namespace bdrelay {

struct SimConfig {
    LinkConfig link;
    Thresholds thresholds;
    BufferCaps caps;
    PolicyKind kind = PolicyKind::DelayEfficient;
    std::uint64_t n_slots = 1'000'000;  // including warmup
    std::uint64_t seed = 1;
    std::uint64_t warmup_slots = 1'000;

    void validate() const {
        link.validate();
        caps.validate();
        thresholds.validate(caps);
        if (n_slots <= warmup_slots) throw ConfigError("n_slots", "must exceed warmup_slots");
    }
};

enum class BaselineKind { MabcConventional, MabcBuffered };

struct SimResult {
    Metrics metrics;
    std::uint64_t slots = 0;  // measured slots

    // hist[d] = packets delivered with delay d slots
    std::vector<std::uint64_t> delay_hist1;
    std::vector<std::uint64_t> delay_hist2;
    std::array<double, 7> mode_freq{};

    // Visits per state on the full grid, l2-major; empty for baselines.
    std::vector<std::uint64_t> state_visits;

    // Whole-horizon bookkeeping, warmup included.
    std::array<std::uint64_t, 2> packets_in{};
    std::array<std::uint64_t, 2> packets_out{};
    std::array<std::uint64_t, 2> packets_dropped{};
    QueueState final_queue;

    double visit_freq(const QueueState& q, const BufferCaps& caps) const {
        const auto i = static_cast<std::size_t>(q.l2) * static_cast<std::size_t>(caps.l1_max + 1) +
                       static_cast<std::size_t>(q.l1);
        return static_cast<double>(state_visits.at(i)) / static_cast<double>(slots);
    }
};

namespace detail {

// Running sums for one horizon.
class Tally {
public:
    explicit Tally(double r0) : r0_(r0) {}

    void slot(const QueueState& q, int k) {
        ++slots_;
        q1_ += q.l1;
        q2_ += q.l2;
        ++modes_[static_cast<std::size_t>(k - 1)];
    }

    void delivered(int flow, std::uint64_t delay) {
        auto& h = flow == 0 ? hist1_ : hist2_;
        if (h.size() <= delay) h.resize(delay + 1, 0);
        ++h[delay];
        ++out_[static_cast<std::size_t>(flow)];
        sum_delay_[static_cast<std::size_t>(flow)] += static_cast<double>(delay);
    }

    void finish(SimResult& r) const {
        const double n = static_cast<double>(slots_);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        Metrics& m = r.metrics;
        m.r12 = static_cast<double>(out_[0]) / n * r0_;
        m.r21 = static_cast<double>(out_[1]) / n * r0_;
        finish_throughput(m, r0_);
        m.q1_bar = q1_ / n;
        m.q2_bar = q2_ / n;
        m.t1_bar = out_[0] ? sum_delay_[0] / static_cast<double>(out_[0]) : nan;
        m.t2_bar = out_[1] ? sum_delay_[1] / static_cast<double>(out_[1]) : nan;
        r.slots = slots_;
        r.delay_hist1 = hist1_;
        r.delay_hist2 = hist2_;
        for (std::size_t k = 0; k < 7; ++k) r.mode_freq[k] = static_cast<double>(modes_[k]) / n;
    }

private:
    double r0_;
    std::uint64_t slots_ = 0;
    double q1_ = 0.0, q2_ = 0.0;
    std::array<std::uint64_t, 7> modes_{};
    std::array<std::uint64_t, 2> out_{};
    std::array<double, 2> sum_delay_{};
    std::vector<std::uint64_t> hist1_, hist2_;
};

}  // namespace detail

// One run of the adaptive protocol. Selection uses the queue lengths left by
// the previous slot; the chosen mode is then applied.
inline SimResult run(const SimConfig& cfg) {
    cfg.validate();
    Rng fading = make_stream(cfg.seed, StreamTag::Fading);
    Rng ties = make_stream(cfg.seed, StreamTag::TieBreak);

    SimResult res;
    res.state_visits.assign(static_cast<std::size_t>(cfg.caps.l1_max + 1) * static_cast<std::size_t>(cfg.caps.l2_max + 1),
                            0);
    detail::Tally tally(cfg.link.r0);
    std::array<std::deque<std::uint64_t>, 2> buf;
    QueueState q;

    for (std::uint64_t i = 1; i <= cfg.n_slots; ++i) {
        const SnrRegion r = classify_region(sample_snr(cfg.link, fading), cfg.link);
        const SelectionOutcome sel = select_mode(r, q, cfg.caps, cfg.thresholds, cfg.kind, ties);
        if (!sel.feasible.contains(sel.chosen)) throw std::logic_error("selected mode outside the feasible set");
        const Mode& m = mode(sel.chosen);
        const bool measured = i > cfg.warmup_slots;

        const std::array<int, 2> delta{m.delta_l1, m.delta_l2};
        for (int j = 0; j < 2; ++j) {
            auto& b = buf[static_cast<std::size_t>(j)];
            if (delta[static_cast<std::size_t>(j)] > 0) {
                b.push_back(i);
                ++res.packets_in[static_cast<std::size_t>(j)];
            } else if (delta[static_cast<std::size_t>(j)] < 0) {
                const std::uint64_t arrived = b.front();
                b.pop_front();
                ++res.packets_out[static_cast<std::size_t>(j)];
                if (measured) tally.delivered(j, i - arrived);
            }
        }
        q = apply(q, m);
        if (!in_bounds(q, cfg.caps)) throw std::logic_error("queue bound violated");

        if (measured) {
            tally.slot(q, sel.chosen);
            ++res.state_visits[static_cast<std::size_t>(q.l2) * static_cast<std::size_t>(cfg.caps.l1_max + 1) +
                               static_cast<std::size_t>(q.l1)];
        }
    }
    tally.finish(res);
    res.final_queue = q;
    return res;
}

// MABC baselines. Conventional: odd slots multiple access (M3, decodes in R1),
// even slots broadcast (M6, decodes when both links are up); a packet not
// broadcast in the following slot is dropped. Buffered: multiple access over
// the first half of the horizon, broadcast over the second, unlimited buffers.
// Baselines measure the whole horizon and ignore warmup_slots.
inline SimResult run_baseline(BaselineKind kind, const SimConfig& cfg) {
    cfg.link.validate();
    if (cfg.n_slots == 0) throw ConfigError("n_slots", "must be >= 1");
    if (kind == BaselineKind::MabcBuffered && cfg.n_slots % 2 != 0)
        throw ConfigError("n_slots", "buffered MABC needs an even horizon");
    Rng fading = make_stream(cfg.seed, StreamTag::Fading);

    SimResult res;
    detail::Tally tally(cfg.link.r0);
    std::array<std::deque<std::uint64_t>, 2> buf;
    const std::uint64_t half = cfg.n_slots / 2;

    auto receive = [&](std::uint64_t i) {
        for (std::size_t j = 0; j < 2; ++j) {
            buf[j].push_back(i);
            ++res.packets_in[j];
        }
    };
    auto broadcast = [&](std::uint64_t i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const std::uint64_t arrived = buf[j].front();
            buf[j].pop_front();
            ++res.packets_out[j];
            tally.delivered(static_cast<int>(j), i - arrived);
        }
    };

    for (std::uint64_t i = 1; i <= cfg.n_slots; ++i) {
        const SnrRegion r = classify_region(sample_snr(cfg.link, fading), cfg.link);
        const bool both_up = r == SnrRegion::R1 || r == SnrRegion::R2;
        int k = 7;
        if (kind == BaselineKind::MabcConventional) {
            if (i % 2 == 1) {
                if (r == SnrRegion::R1) {
                    receive(i);
                    k = 3;
                }
            } else if (!buf[0].empty()) {
                if (both_up) {
                    broadcast(i);
                    k = 6;
                } else {
                    for (std::size_t j = 0; j < 2; ++j) {
                        buf[j].clear();
                        ++res.packets_dropped[j];
                    }
                }
            }
        } else if (i <= half) {
            if (r == SnrRegion::R1) {
                receive(i);
                k = 3;
            }
        } else if (both_up && !buf[0].empty()) {
            broadcast(i);
            k = 6;
        }
        tally.slot({static_cast<int>(buf[0].size()), static_cast<int>(buf[1].size())}, k);
    }
    tally.finish(res);
    res.final_queue = {static_cast<int>(buf[0].size()), static_cast<int>(buf[1].size())};
    return res;
}

}  // namespace bdrelay
