// mode_space.hpp - transmission modes, queue regions and candidate sets.
//
//   mode  user1 user2 relay   buffer effect (B1, B2)   packets/slot
//   M1    T     S     R       (+1,  0)                 1
//   M2    S     T     R       ( 0, +1)                 1
//   M3    T     T     R       (+1, +1)                 2
//   M4    R     S     T       ( 0, -1)                 1
//   M5    S     R     T       (-1,  0)                 1
//   M6    R     R     T       (-1, -1)                 2
//   M7    S     S     S       ( 0,  0)                 0
//
// B1 holds user-1 data waiting for user 2, B2 the reverse; so relay->user 1
// (M4) drains B2 and relay->user 2 (M5) drains B1.

#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"

namespace bdrelay {

struct Mode {
    int index;     // 1..7
    int delta_l1;  // effect on B1
    int delta_l2;  // effect on B2
    int tau;       // spectral efficiency, packets per slot
};

inline constexpr std::array<Mode, 7> kModes = {{
    {1, +1, 0, 1},
    {2, 0, +1, 1},
    {3, +1, +1, 2},
    {4, 0, -1, 1},
    {5, -1, 0, 1},
    {6, -1, -1, 2},
    {7, 0, 0, 0},
}};

inline constexpr const Mode& mode(int k) { return kModes[static_cast<std::size_t>(k - 1)]; }

// Set of mode indices 1..7.
class ModeSet {
public:
    constexpr ModeSet() = default;
    ModeSet(std::initializer_list<int> ks) {
        for (int k : ks) insert(k);
    }

    static ModeSet all() { return ModeSet{1, 2, 3, 4, 5, 6, 7}; }

    void insert(int k) { bits_.set(static_cast<std::size_t>(k - 1)); }
    bool contains(int k) const { return bits_.test(static_cast<std::size_t>(k - 1)); }
    std::size_t size() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }

    ModeSet operator&(const ModeSet& o) const {
        ModeSet r;
        r.bits_ = bits_ & o.bits_;
        return r;
    }
    bool operator==(const ModeSet& o) const { return bits_ == o.bits_; }

    template <typename F>
    void for_each(F&& f) const {
        for (int k = 1; k <= 7; ++k)
            if (contains(k)) f(k);
    }

    std::string to_string() const {
        std::string s = "{";
        for_each([&](int k) {
            if (s.size() > 1) s += ",";
            s += std::to_string(k);
        });
        return s + "}";
    }

private:
    std::bitset<7> bits_;
};

struct BufferCaps {
    int l1_max = 10;
    int l2_max = 10;

    void validate() const {
        if (l1_max < 1) throw ConfigError("l1_max", "buffer capacity must be >= 1");
        if (l2_max < 1) throw ConfigError("l2_max", "buffer capacity must be >= 1");
    }
    bool operator==(const BufferCaps&) const = default;
};

struct QueueState {
    int l1 = 0;
    int l2 = 0;

    bool operator==(const QueueState&) const = default;
};

inline bool in_bounds(const QueueState& q, const BufferCaps& caps) {
    return q.l1 >= 0 && q.l1 <= caps.l1_max && q.l2 >= 0 && q.l2 <= caps.l2_max;
}

inline QueueState apply(const QueueState& q, const Mode& m) { return {q.l1 + m.delta_l1, q.l2 + m.delta_l2}; }

enum class QueueRegion : std::uint8_t { L1 = 1, L2, L3, L4, L5, L6, L7, L8, L9 };

inline ModeSet candidate_modes_snr(SnrRegion r) {
    switch (r) {
        case SnrRegion::R1: return ModeSet::all();
        case SnrRegion::R2: return ModeSet{1, 2, 4, 5, 6, 7};
        case SnrRegion::R3: return ModeSet{1, 4, 7};
        case SnrRegion::R4: return ModeSet{2, 5, 7};
        case SnrRegion::R5: return ModeSet{7};
    }
    return ModeSet{7};
}

// Each buffer is empty, partial (0 < l < max) or full.
inline QueueRegion classify_queue_region(const QueueState& q, const BufferCaps& caps) {
    enum Fill { Empty, Partial, Full };
    auto fill = [](int l, int max) { return l == 0 ? Empty : (l == max ? Full : Partial); };
    const Fill b1 = fill(q.l1, caps.l1_max);
    const Fill b2 = fill(q.l2, caps.l2_max);
    static constexpr QueueRegion table[3][3] = {
        // b2:  Empty            Partial          Full
        {QueueRegion::L2, QueueRegion::L9, QueueRegion::L8},  // b1 empty
        {QueueRegion::L3, QueueRegion::L1, QueueRegion::L7},  // b1 partial
        {QueueRegion::L4, QueueRegion::L5, QueueRegion::L6},  // b1 full
    };
    return table[b1][b2];
}

inline ModeSet candidate_modes_queue(QueueRegion n) {
    switch (n) {
        case QueueRegion::L1: return ModeSet::all();
        case QueueRegion::L2: return ModeSet{1, 2, 3, 7};
        case QueueRegion::L3: return ModeSet{1, 2, 3, 5, 7};
        case QueueRegion::L4: return ModeSet{2, 5, 7};
        case QueueRegion::L5: return ModeSet{2, 4, 5, 6, 7};
        case QueueRegion::L6: return ModeSet{4, 5, 6, 7};
        case QueueRegion::L7: return ModeSet{1, 4, 5, 6, 7};
        case QueueRegion::L8: return ModeSet{1, 4, 7};
        case QueueRegion::L9: return ModeSet{1, 2, 3, 4, 7};
    }
    return ModeSet{7};
}

// Modes that both decode under r and fit the buffers at q.
inline ModeSet feasible_set(SnrRegion r, const QueueState& q, const BufferCaps& caps) {
    return candidate_modes_snr(r) & candidate_modes_queue(classify_queue_region(q, caps));
}

}  // namespace bdrelay
