// markov_engine.hpp - queue-state Markov chain of the relay buffers.
//
// The chain state is the pair of buffer occupancies (l1, l2) at the end of a
// slot. Transition matrices are column-stochastic: column m holds the
// distribution of the next state given current state s(m). States are
// enumerated l2-major, (0,0), (1,0), ..., (l1_max,0), (0,1), ...
//
// Two independent routes produce the same matrices:
//   * build_generic sums region probability times the policy's mode
//     distribution over every state;
//   * build_prop1 / build_te_min transcribe the closed-form transition tables
//     for the delay-efficient policy and the throughput-efficient policy at
//     zero thresholds.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/mode_space.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay {

class StateSpace {
public:
    StateSpace() = default;

    static StateSpace full(const BufferCaps& caps) {
        std::vector<QueueState> states;
        states.reserve(static_cast<std::size_t>((caps.l1_max + 1) * (caps.l2_max + 1)));
        for (int l2 = 0; l2 <= caps.l2_max; ++l2)
            for (int l1 = 0; l1 <= caps.l1_max; ++l1) states.push_back({l1, l2});
        return StateSpace(caps, std::move(states), false);
    }

    // Subset of the full grid; kept in enumeration order.
    static StateSpace subset(const BufferCaps& caps, std::vector<QueueState> states) {
        std::sort(states.begin(), states.end(), [](const QueueState& a, const QueueState& b) {
            return std::pair(a.l2, a.l1) < std::pair(b.l2, b.l1);
        });
        states.erase(std::unique(states.begin(), states.end()), states.end());
        return StateSpace(caps, std::move(states), true);
    }

    std::size_t size() const { return states_.size(); }
    const QueueState& operator[](std::size_t i) const { return states_[i]; }
    const std::vector<QueueState>& states() const { return states_; }
    const BufferCaps& caps() const { return caps_; }
    bool reduced() const { return reduced_; }

    std::optional<std::size_t> index_of(const QueueState& q) const {
        if (!in_bounds(q, caps_)) return std::nullopt;
        const int pos = lookup_[grid_index(q)];
        if (pos < 0) return std::nullopt;
        return static_cast<std::size_t>(pos);
    }
    bool contains(const QueueState& q) const { return index_of(q).has_value(); }

private:
    StateSpace(const BufferCaps& caps, std::vector<QueueState> states, bool reduced)
        : caps_(caps), states_(std::move(states)), reduced_(reduced) {
        lookup_.assign(static_cast<std::size_t>((caps_.l1_max + 1) * (caps_.l2_max + 1)), -1);
        for (std::size_t i = 0; i < states_.size(); ++i) lookup_[grid_index(states_[i])] = static_cast<int>(i);
    }

    std::size_t grid_index(const QueueState& q) const {
        return static_cast<std::size_t>(q.l2 * (caps_.l1_max + 1) + q.l1);
    }

    BufferCaps caps_;
    std::vector<QueueState> states_;
    std::vector<int> lookup_;
    bool reduced_ = false;
};

struct TransitionMatrix {
    StateSpace space;
    Eigen::MatrixXd m;  // m(to, from)

    double prob(const QueueState& from, const QueueState& to) const {
        auto f = space.index_of(from);
        auto t = space.index_of(to);
        if (!f || !t) return 0.0;
        return m(static_cast<Eigen::Index>(*t), static_cast<Eigen::Index>(*f));
    }

    // Largest |column sum - 1|.
    double stochastic_defect() const {
        if (m.cols() == 0) return 0.0;
        return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
    }
};

// Entry (to, from) must be zero: a queue moves by two or more, or one queue
// grows while the other shrinks.
inline bool structurally_zero(const QueueState& from, const QueueState& to) {
    const int d1 = to.l1 - from.l1;
    const int d2 = to.l2 - from.l2;
    if (std::abs(d1) >= 2 || std::abs(d2) >= 2) return true;
    return d1 * d2 < 0;
}

struct StationaryDist {
    StateSpace space;
    Eigen::VectorXd pi;

    double at(const QueueState& q) const {
        auto i = space.index_of(q);
        return i ? pi(static_cast<Eigen::Index>(*i)) : 0.0;
    }
};

struct Metrics {
    double r12 = 0.0;  // bits/symbol, user 1 -> user 2
    double r21 = 0.0;
    double r_sum = 0.0;
    double f12 = 1.0;  // outage, 1 - r12 / (r0/2)
    double f21 = 1.0;
    double f_sys = 1.0;
    double q1_bar = 0.0;  // packets
    double q2_bar = 0.0;
    double t1_bar = std::numeric_limits<double>::quiet_NaN();  // slots
    double t2_bar = std::numeric_limits<double>::quiet_NaN();

    double t_sys() const { return 0.5 * (t1_bar + t2_bar); }
    bool delays_defined() const { return std::isfinite(t1_bar) && std::isfinite(t2_bar); }
};

// Fills outage fields and r_sum from r12, r21.
inline void finish_throughput(Metrics& out, double r0) {
    out.r_sum = out.r12 + out.r21;
    out.f12 = 1.0 - out.r12 / (0.5 * r0);
    out.f21 = 1.0 - out.r21 / (0.5 * r0);
    out.f_sys = 0.5 * (out.f12 + out.f21);
}

// ---------------------------------------------------------------------------
// Generic builder

inline TransitionMatrix build_generic(const RegionProbs& probs, const Thresholds& t, const BufferCaps& caps,
                                      PolicyKind kind) {
    caps.validate();
    t.validate(caps);
    TransitionMatrix out{StateSpace::full(caps), {}};
    const auto n = static_cast<Eigen::Index>(out.space.size());
    out.m = Eigen::MatrixXd::Zero(n, n);

    for (std::size_t col = 0; col < out.space.size(); ++col) {
        const QueueState from = out.space[col];
        for (SnrRegion r : kAllSnrRegions) {
            const double pr = probs[r];
            if (pr == 0.0) continue;
            const ModeDistribution d = selection_distribution(r, from, caps, t, kind);
            for (int k = 1; k <= 7; ++k) {
                const double w = d[static_cast<std::size_t>(k - 1)];
                if (w == 0.0) continue;
                const auto row = out.space.index_of(apply(from, mode(k)));
                // Feasibility guarantees the target is on the grid.
                out.m(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += pr * w;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form delay-efficient transitions

namespace prop1 {

// Region probabilities with the roles of the two users swapped.
inline RegionProbs mirrored(const RegionProbs& p) {
    RegionProbs q = p;
    std::swap(q.p[2], q.p[3]);
    return q;
}

// Pr{(l1,l2) -> (l1,l2)}
inline double stay(int l1, int l2, int t1, int t2, const RegionProbs& p) {
    if (l1 > t1 && l2 == 0) return p.r5() + p.r3();
    if (l1 == 0 && l2 > t2) return p.r5() + p.r4();
    return p.r5();
}

// Pr{(l1,l2) -> (l1+1,l2)}, mode M1.
inline double fill_first(int l1, int l2, int t1, int t2, const RegionProbs& p) {
    const double p1 = p.r1(), p2 = p.r2(), p3 = p.r3();
    if (l2 > t2 && l1 + l2 < t1 + t2) return p1 + p2 + p3;
    if (l2 <= t2 && l1 - l2 < t1 - t2) return p2 + p3;
    if ((l2 < t2 && l1 - l2 == t1 - t2) || (l1 == t1 && l2 == t2 && t1 == 0 && t2 == 0)) return p2 / 2 + p3;
    if (l1 == 0 && l2 == t2 && t1 == 0) return (p2 + p3) / 2;
    if ((l1 < t1 && l1 - l2 > t1 - t2) || (l1 == t1 && l2 == 0)) return p3;
    if ((l1 == t1 && 0 < l2 && l2 <= t2 && !(l1 == 0 && l2 == t2)) ||
        (l2 > t2 && l1 + l2 == t1 + t2 && !(l1 == 0 && l2 == t1 + t2)))
        return p3 / 2;
    if (l1 == 0 && l2 == t1 + t2 && (t1 != 0 || t2 != 0)) return (p1 + p2 + p3) / 2;
    return 0.0;
}

// Pr{(l1,l2) -> (l1,l2-1)}, mode M4.
inline double drain_second(int l1, int l2, int t1, int t2, const RegionProbs& p) {
    const double p1 = p.r1(), p2 = p.r2(), p3 = p.r3();
    if (l1 == 0 && l2 > t1 + t2) return p1 + p2 + p3;
    if (l1 == 0 && l2 == t2 && t1 == 0) return (p2 + p3) / 2;
    if ((l1 > t1 || l1 + l2 > t1 + t2) && l2 != 0) return p3;
    if ((l1 == t1 && 0 < l2 && l2 <= t2) ||
        (l2 > t2 && l1 + l2 == t1 + t2 && !(l1 == 0 && l2 == t1 + t2)))
        return p3 / 2;
    if (l1 == 0 && l2 == t1 + t2 && (t1 != 0 || t2 != 0)) return (p1 + p2 + p3) / 2;
    return 0.0;
}

// Pr{(l1,l2) -> (l1+1,l2+1)}, mode M3.
inline double fill_both(int l1, int l2, int t1, int t2, const RegionProbs& p) {
    if (l1 <= t1 && l2 <= t2 && (!(l1 == t1 && l2 == t2) || t1 == 0 || t2 == 0)) return p.r1();
    if (l1 == t1 && l2 == t2 && t1 != 0 && t2 != 0) return p.r1() / 2;
    return 0.0;
}

// Pr{(l1,l2) -> (l1-1,l2-1)}, mode M6.
inline double drain_both(int l1, int l2, int t1, int t2, const RegionProbs& p) {
    if (l1 + l2 >= t1 + t2 && l1 != 0 && l2 != 0 && !(l1 == t1 && l2 == t2)) return p.r1() + p.r2();
    if (l1 == t1 && l2 == t2 && t1 != 0 && t2 != 0) return p.r1() / 2 + p.r2();
    return 0.0;
}

}  // namespace prop1

inline TransitionMatrix build_prop1(const RegionProbs& probs, const Thresholds& t, const BufferCaps& caps) {
    caps.validate();
    t.validate(caps);
    TransitionMatrix out{StateSpace::full(caps), {}};
    const auto n = static_cast<Eigen::Index>(out.space.size());
    out.m = Eigen::MatrixXd::Zero(n, n);
    const RegionProbs swapped = prop1::mirrored(probs);
    const int t1 = t.l1_thr, t2 = t.l2_thr;

    for (std::size_t col = 0; col < out.space.size(); ++col) {
        const auto [l1, l2] = out.space[col];
        auto put = [&](QueueState to, double v) {
            if (v == 0.0) return;
            if (auto row = out.space.index_of(to))
                out.m(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += v;
        };
        put({l1, l2}, prop1::stay(l1, l2, t1, t2, probs));
        put({l1 + 1, l2}, prop1::fill_first(l1, l2, t1, t2, probs));
        put({l1, l2 + 1}, prop1::fill_first(l2, l1, t2, t1, swapped));
        put({l1, l2 - 1}, prop1::drain_second(l1, l2, t1, t2, probs));
        put({l1 - 1, l2}, prop1::drain_second(l2, l1, t2, t1, swapped));
        put({l1 + 1, l2 + 1}, prop1::fill_both(l1, l2, t1, t2, probs));
        put({l1 - 1, l2 - 1}, prop1::drain_both(l1, l2, t1, t2, probs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form throughput-efficient transitions at zero thresholds, per queue
// region.

inline TransitionMatrix build_te_min(const RegionProbs& p, const BufferCaps& caps) {
    caps.validate();
    TransitionMatrix out{StateSpace::full(caps), {}};
    const auto n = static_cast<Eigen::Index>(out.space.size());
    out.m = Eigen::MatrixXd::Zero(n, n);
    const double p1 = p.r1(), p2 = p.r2(), p3 = p.r3(), p4 = p.r4(), p5 = p.r5();

    for (std::size_t col = 0; col < out.space.size(); ++col) {
        const QueueState s = out.space[col];
        auto put = [&](int d1, int d2, double v) {
            auto row = out.space.index_of({s.l1 + d1, s.l2 + d2});
            out.m(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += v;
        };
        switch (classify_queue_region(s, caps)) {
            case QueueRegion::L2:
                put(0, 0, p5);
                put(1, 0, p2 / 2 + p3);
                put(0, 1, p2 / 2 + p4);
                put(1, 1, p1);
                break;
            case QueueRegion::L1:
            case QueueRegion::L5:
            case QueueRegion::L6:
            case QueueRegion::L7:
                put(-1, -1, p1 + p2);
                put(0, -1, p3);
                put(-1, 0, p4);
                put(0, 0, p5);
                break;
            case QueueRegion::L3:
                put(1, 0, p3);
                put(1, 1, p1);
                put(-1, 0, p2 + p4);
                put(0, 0, p5);
                break;
            case QueueRegion::L4:
                put(-1, 0, p1 + p2 + p4);
                put(0, 0, p3 + p5);
                break;
            case QueueRegion::L8:
                put(0, -1, p1 + p2 + p3);
                put(0, 0, p4 + p5);
                break;
            case QueueRegion::L9:
                put(0, 1, p4);
                put(1, 1, p1);
                put(0, -1, p2 + p3);
                put(0, 0, p5);
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reduction, stationary solve, metrics

// Restriction to the states reachable from (0,0) over non-zero transitions.
inline TransitionMatrix reduce(const TransitionMatrix& full) {
    const StateSpace& sp = full.space;
    const auto origin = sp.index_of({0, 0});
    if (!origin) throw NumericalError("state space does not contain (0,0)");

    std::vector<char> seen(sp.size(), 0);
    std::deque<std::size_t> frontier{*origin};
    seen[*origin] = 1;
    while (!frontier.empty()) {
        const std::size_t col = frontier.front();
        frontier.pop_front();
        for (std::size_t row = 0; row < sp.size(); ++row) {
            if (seen[row]) continue;
            if (full.m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) != 0.0) {
                seen[row] = 1;
                frontier.push_back(row);
            }
        }
    }

    std::vector<QueueState> kept;
    for (std::size_t i = 0; i < sp.size(); ++i)
        if (seen[i]) kept.push_back(sp[i]);
    TransitionMatrix out{StateSpace::subset(sp.caps(), kept), {}};
    const auto n = static_cast<Eigen::Index>(out.space.size());
    out.m.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto fc = static_cast<Eigen::Index>(*sp.index_of(out.space[static_cast<std::size_t>(c)]));
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto fr = static_cast<Eigen::Index>(*sp.index_of(out.space[static_cast<std::size_t>(r)]));
            out.m(r, c) = full.m(fr, fc);
        }
    }
    return out;
}

struct SolverOptions {
    double residual_tol = 1e-9;
    double sum_tol = 1e-10;
    std::size_t power_iterations = 1'000'000;
};

// ||M pi - pi||_inf
inline double stationary_residual(const TransitionMatrix& m, const Eigen::VectorXd& pi) {
    if (pi.size() == 0) return 0.0;
    return (m.m * pi - pi).cwiseAbs().maxCoeff();
}

namespace detail {

inline bool acceptable(const TransitionMatrix& m, const Eigen::VectorXd& pi, const SolverOptions& opt) {
    if (!pi.allFinite()) return false;
    if (pi.minCoeff() < -1e-12) return false;
    if (std::abs(pi.sum() - 1.0) > opt.sum_tol) return false;
    return stationary_residual(m, pi) < opt.residual_tol;
}

inline void clean(Eigen::VectorXd& pi) {
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
}

}  // namespace detail

// Solves M pi = pi, 1'pi = 1. Direct solve with one balance equation
// replaced by the normalisation; power iteration on the lazy chain (M + I)/2
// as fallback. Throws NumericalError when neither meets the tolerances,
// which signals a reducible or otherwise degenerate chain.
inline StationaryDist stationary(const TransitionMatrix& m, const SolverOptions& opt = {}) {
    const auto n = static_cast<Eigen::Index>(m.space.size());
    if (n == 0) throw NumericalError("empty state space");
    StationaryDist out{m.space, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
    if (n == 1) {
        out.pi(0) = 1.0;
        return out;
    }

    Eigen::MatrixXd a = m.m - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
        Eigen::VectorXd pi = lu.solve(b);
        detail::clean(pi);
        if (detail::acceptable(m, pi, opt)) {
            out.pi = std::move(pi);
            return out;
        }
    }

    const Eigen::MatrixXd lazy = 0.5 * (m.m + Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd pi = out.pi;
    for (std::size_t it = 0; it < opt.power_iterations; ++it) {
        pi = lazy * pi;
        if (it % 64 == 63) {
            pi /= pi.sum();
            if (detail::acceptable(m, pi, opt)) {
                out.pi = std::move(pi);
                return out;
            }
        }
    }
    throw NumericalError("stationary distribution did not converge (residual " +
                         std::to_string(stationary_residual(m, pi)) + "); chain is reducible or degenerate");
}

// Throughput, outage, mean queue length and mean delay from a solved chain.
// Delays use Little's law in slots: T_j = Q_j / (departures of flow j per slot).
inline Metrics metrics(const StationaryDist& pi, const TransitionMatrix& m, double r0) {
    Metrics out;
    double drain1 = 0.0, drain2 = 0.0;
    for (std::size_t i = 0; i < pi.space.size(); ++i) {
        const QueueState s = pi.space[i];
        const double w = pi.pi(static_cast<Eigen::Index>(i));
        out.q1_bar += s.l1 * w;
        out.q2_bar += s.l2 * w;
        if (s.l1 >= 1) drain1 += w * (m.prob(s, {s.l1 - 1, s.l2}) + m.prob(s, {s.l1 - 1, s.l2 - 1}));
        if (s.l2 >= 1) drain2 += w * (m.prob(s, {s.l1, s.l2 - 1}) + m.prob(s, {s.l1 - 1, s.l2 - 1}));
    }
    out.r12 = drain1 * r0;
    out.r21 = drain2 * r0;
    finish_throughput(out, r0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.t1_bar = drain1 > 0.0 ? out.q1_bar / drain1 : nan;
    out.t2_bar = drain2 > 0.0 ? out.q2_bar / drain2 : nan;
    return out;
}

inline Metrics metrics(const StationaryDist& pi, const TransitionMatrix& m, const LinkConfig& c) {
    return metrics(pi, m, c.r0);
}

// build -> reduce -> stationary -> metrics in one call.
inline Metrics analyze(const RegionProbs& probs, const Thresholds& t, const BufferCaps& caps, PolicyKind kind,
                       double r0) {
    const TransitionMatrix reduced = reduce(build_generic(probs, t, caps, kind));
    return metrics(stationary(reduced), reduced, r0);
}

// ---------------------------------------------------------------------------
// Closed forms at zero thresholds

struct MinDelays {
    double t1 = 0.0;
    double t2 = 0.0;
};

// Lower bound on the mean delay of any adaptive mode-selection protocol: a
// packet leaves as soon as the outgoing link supports r0, so the delay is
// geometric with success probability of that link.
inline MinDelays lemma1_min_delays(const RegionProbs& p) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double up2 = p.r1() + p.r2() + p.r4();
    const double up1 = p.r1() + p.r2() + p.r3();
    return {up2 > 0.0 ? 1.0 / up2 : nan, up1 > 0.0 ? 1.0 / up1 : nan};
}

// Delay-efficient policy at thresholds (0,0): the reduced chain lives on
// {(0,0), (1,0), (0,1), (1,1)} with occupancies (1, b, c, a) / (1 + a + b + c).
inline Metrics closed_form_min_delay(const RegionProbs& p, double r0) {
    const double p1 = p.r1(), p2 = p.r2(), p3 = p.r3(), p4 = p.r4(), p5 = p.r5();
    const double a = p1 / (1.0 - p5);
    const double b = (p3 + p2 / 2 + p1 * p3 / (1.0 - p5)) / (1.0 - p3 - p5);
    const double c = (p4 + p2 / 2 + p1 * p4 / (1.0 - p5)) / (1.0 - p4 - p5);
    const double norm = 1.0 + a + b + c;
    const double up2 = p1 + p2 + p4;
    const double up1 = p1 + p2 + p3;

    Metrics out;
    out.r12 = (a + b) / norm * up2 * r0;
    out.r21 = (a + c) / norm * up1 * r0;
    finish_throughput(out, r0);
    out.q1_bar = (a + b) / norm;
    out.q2_bar = (a + c) / norm;
    const MinDelays d = lemma1_min_delays(p);
    out.t1_bar = d.t1;
    out.t2_bar = d.t2;
    return out;
}

// Stationary occupancy of the throughput-efficient policy at zero thresholds,
// Pr{s} = f(s) x + g(s) y, from backward recursions along the two arms of the
// reduced chain: f lives on {(l1,0), (l1,1)}, g on {(0,l2), (1,l2)}.
inline StationaryDist prop3_occupancy(const RegionProbs& p, const BufferCaps& caps) {
    caps.validate();
    if (caps.l1_max < 3 || caps.l2_max < 3) throw OutOfScopeError("occupancy recursion needs both capacities >= 3");
    const double p1 = p.r1(), p2 = p.r2(), p3 = p.r3(), p4 = p.r4(), p5 = p.r5();
    const double s = 1.0 - p5;

    auto check = [](double denom, const char* what) {
        if (!(std::abs(denom) > std::numeric_limits<double>::min()))
            throw NumericalError(std::string("occupancy recursion: vanishing denominator in ") + what);
    };
    check(s, "1 - P5");
    check(p1, "P1");
    check(p3, "P3");
    check(p4, "P4");

    // f over the l1 arm, indexed f0[l1] = f(l1,0), f1[l1] = f(l1,1).
    auto arm = [&](int lmax, double pa, double pb, std::vector<double>& f0, std::vector<double>& f1) {
        // pa plays the role of P3 (fills this arm's buffer alone), pb of P4.
        f0.assign(static_cast<std::size_t>(lmax + 1), 0.0);
        f1.assign(static_cast<std::size_t>(lmax + 1), 0.0);
        auto F0 = [&](int l) -> double& { return f0[static_cast<std::size_t>(l)]; };
        auto F1 = [&](int l) -> double& { return f1[static_cast<std::size_t>(l)]; };
        const double lead = pa + p1 * pa / s;
        const double cross = p1 + p2 + pa * pb / s;

        F0(lmax) = 1.0;
        F1(lmax) = p1 * (1.0 - pa - p5) / (pa * (1.0 + p1 - p5));
        F0(lmax - 1) = s / p1 * F1(lmax);
        F0(lmax - 2) = (s * F0(lmax - 1) - (p1 + p2 + pb) - cross * F1(lmax)) / lead;
        for (int l = lmax - 1; l >= 2; --l) {
            F1(l) = (pb * F1(l + 1) + p1 * F0(l - 1)) / s;
            if (l - 2 >= 1) F0(l - 2) = (s * F0(l - 1) - (p2 + pb) * F0(l) - cross * F1(l)) / lead;
        }
    };

    std::vector<double> f0, f1, g0, g1;
    arm(caps.l1_max, p3, p4, f0, f1);
    arm(caps.l2_max, p4, p3, g0, g1);

    const double det = s * s - p1 * (p1 + p2);
    check(det, "(1 - P5)^2 - P1 (P1 + P2)");
    const double f00 = s / det * ((p2 + p4) * f0[1] + p4 * (p1 + p2) / s * f1[2]);
    const double g00 = s / det * ((p2 + p3) * g0[1] + p3 * (p1 + p2) / s * g1[2]);
    const double f11 = (p1 * f00 + p4 * f1[2]) / s;
    const double g11 = (p1 * g00 + p3 * g1[2]) / s;
    f1[1] = f11;
    g1[1] = g11;

    // Balance at (1,0) couples the two arms.
    const double znum = s * f0[1] - (p2 + p4) * f0[2] - (p1 + p2) * f1[2] - (p2 / 2 + p3) * f00 - p3 * f11;
    const double zden = (p2 / 2 + p3) * g00 + p3 * g11;
    check(zden, "arm coupling");
    const double z = znum / zden;

    std::vector<QueueState> states;
    std::vector<double> weight;
    auto add = [&](QueueState q, double w) {
        states.push_back(q);
        weight.push_back(w);
    };
    add({0, 0}, f00 + z * g00);
    add({1, 1}, f11 + z * g11);
    for (int l = 1; l <= caps.l1_max; ++l) add({l, 0}, f0[static_cast<std::size_t>(l)]);
    for (int l = 2; l <= caps.l1_max; ++l) add({l, 1}, f1[static_cast<std::size_t>(l)]);
    for (int l = 1; l <= caps.l2_max; ++l) add({0, l}, z * g0[static_cast<std::size_t>(l)]);
    for (int l = 2; l <= caps.l2_max; ++l) add({1, l}, z * g1[static_cast<std::size_t>(l)]);

    double total = 0.0;
    for (double w : weight) total += w;
    check(total, "normalisation");
    if (!std::isfinite(total)) throw NumericalError("occupancy recursion overflowed");

    StationaryDist out{StateSpace::subset(caps, states), {}};
    out.pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.space.size()));
    for (std::size_t i = 0; i < states.size(); ++i)
        out.pi(static_cast<Eigen::Index>(*out.space.index_of(states[i]))) = weight[i] / total;
    return out;
}

}  // namespace bdrelay
