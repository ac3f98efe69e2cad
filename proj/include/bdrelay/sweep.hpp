// sweep.hpp - evaluate a SweepSpec over its SNR grid, write CSV, self-check.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "bdrelay/asymptotics.hpp"
#include "bdrelay/config.hpp"
#include "bdrelay/markov_engine.hpp"
#include "bdrelay/simulator.hpp"

namespace bdrelay {

inline constexpr const char* kVersion = "0.1.0";

struct ResultRow {
    double snr_db = 0.0;
    Backend backend = Backend::Analytical;
    std::string policy;  // "delay", "throughput" or "mabc"
    Thresholds thresholds;
    Metrics metrics;
    std::optional<std::uint64_t> seed;
    std::string status = "ok";  // ok, undefined_delay, out_of_scope, error: ...

    bool failed() const { return status.rfind("error", 0) == 0; }
};

namespace detail {

inline Metrics nan_metrics() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan, nan, nan, nan, nan, nan, nan};
}

inline Metrics asymptotic_metrics(const AsymptoticMetrics& a, double gamma, double r0) {
    Metrics m;
    m.f12 = a.f12(gamma);
    m.f21 = a.f21(gamma);
    m.r12 = 0.5 * r0 * (1.0 - m.f12);
    m.r21 = 0.5 * r0 * (1.0 - m.f21);
    m.r_sum = m.r12 + m.r21;
    m.f_sys = 0.5 * (m.f12 + m.f21);
    m.t1_bar = a.t1_limit;
    m.t2_bar = a.t2_limit;
    m.q1_bar = m.t1_bar * m.r12 / r0;
    m.q2_bar = m.t2_bar * m.r21 / r0;
    return m;
}

inline void evaluate(const SweepSpec& spec, ResultRow& row, std::optional<PolicyKind> kind) {
    const LinkConfig link = spec.link_at(row.snr_db);
    try {
        switch (row.backend) {
            case Backend::Analytical:
                row.metrics = analyze(region_probs_exact(link), spec.thresholds, spec.caps, *kind, link.r0);
                break;
            case Backend::Simulation: {
                SimConfig c{link, spec.thresholds, spec.caps, *kind, spec.n_slots, spec.seed, spec.warmup_slots};
                row.metrics = run(c).metrics;
                row.seed = spec.seed;
                break;
            }
            case Backend::Asymptotic: {
                if (!(spec.thresholds == Thresholds{}))
                    throw OutOfScopeError("high-SNR expansions are stated for thresholds (0,0)");
                const AsymptoticMetrics a = *kind == PolicyKind::DelayEfficient
                                                ? high_snr_delay_efficient(link)
                                                : high_snr_throughput_efficient(link, spec.caps);
                row.metrics = asymptotic_metrics(a, link.gamma, link.r0);
                break;
            }
            case Backend::BaselineConventional:
            case Backend::BaselineBuffered: {
                SimConfig c{link, spec.thresholds, spec.caps, PolicyKind::DelayEfficient, spec.n_slots, spec.seed,
                            0};
                const auto k = row.backend == Backend::BaselineConventional ? BaselineKind::MabcConventional
                                                                            : BaselineKind::MabcBuffered;
                row.metrics = run_baseline(k, c).metrics;
                row.seed = spec.seed;
                break;
            }
        }
        if (!row.metrics.delays_defined()) row.status = "undefined_delay";
    } catch (const OutOfScopeError& e) {
        row.metrics = nan_metrics();
        row.status = "out_of_scope";
    } catch (const NumericalError& e) {
        row.metrics = nan_metrics();
        row.status = std::string("error: ") + e.what();
    }
}

// Runs jobs [0, n) on a bounded pool of threads.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& job) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < n; i = next++) job(i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Rows in sweep order: SNR, then backend, then policy. Baselines get one row
// per SNR point with policy "mabc".
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<ResultRow> rows;
    std::vector<std::optional<PolicyKind>> kinds;
    for (double db : spec.snr_grid_db()) {
        for (Backend b : spec.backends) {
            if (b == Backend::BaselineConventional || b == Backend::BaselineBuffered) {
                rows.push_back({db, b, "mabc", spec.thresholds, {}, {}, "ok"});
                kinds.emplace_back();
                continue;
            }
            for (PolicyKind k : spec.policies) {
                rows.push_back({db, b, std::string(to_string(k)), spec.thresholds, {}, {}, "ok"});
                kinds.emplace_back(k);
            }
        }
    }
    detail::parallel_for(rows.size(), spec.workers, [&](std::size_t i) { detail::evaluate(spec, rows[i], kinds[i]); });
    return rows;
}

inline std::string format_cell(double x) {
    if (!std::isfinite(x)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, const SweepSpec& spec) {
    out << "# bdrelay " << kVersion << " seed=" << spec.seed << "\n";
    out << "snr_db,backend,policy,l1_thr,l2_thr,r12,r21,r_sum,f12,f21,f_sys,q1_bar,q2_bar,t1_bar,t2_bar,t_sys,seed,"
           "status\n";
    for (const ResultRow& r : rows) {
        const Metrics& m = r.metrics;
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << format_cell(r.snr_db) << ',' << to_string(r.backend) << ',' << r.policy << ',' << r.thresholds.l1_thr
            << ',' << r.thresholds.l2_thr;
        for (double x : {m.r12, m.r21, m.r_sum, m.f12, m.f21, m.f_sys, m.q1_bar, m.q2_bar, m.t1_bar, m.t2_bar,
                         m.t_sys()})
            out << ',' << format_cell(x);
        out << ',' << (r.seed ? std::to_string(*r.seed) : "") << ',' << status << '\n';
    }
}

// ---------------------------------------------------------------------------
// Self-check

struct Check {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

struct Diagnostics {
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    bool numerical_failure = false;

    bool ok() const {
        return !numerical_failure &&
               std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

namespace detail {

inline double max_abs_diff(const TransitionMatrix& a, const TransitionMatrix& b) {
    return (a.m - b.m).cwiseAbs().maxCoeff();
}

inline double zero_structure_violation(const TransitionMatrix& t) {
    double worst = 0.0;
    for (std::size_t c = 0; c < t.space.size(); ++c)
        for (std::size_t r = 0; r < t.space.size(); ++r)
            if (structurally_zero(t.space[c], t.space[r]))
                worst = std::max(worst, std::abs(t.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    return worst;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace detail

// Cross-backend invariants at every SNR point of the spec.
inline Diagnostics validate(const SweepSpec& spec) {
    spec.validate();
    Diagnostics d;
    auto check = [&](std::string name, double residual, double tol) {
        d.checks.push_back({std::move(name), residual <= tol, residual, tol});
    };
    const bool zero_thr = spec.thresholds == Thresholds{};

    for (double db : spec.snr_grid_db()) {
        const LinkConfig link = spec.link_at(db);
        const RegionProbs p = region_probs_exact(link);
        const std::string at = " @" + format_cell(db) + "dB";
        check("region probabilities sum to 1" + at, std::abs(p.sum() - 1.0), 1e-12);
        if (p.r5() > 0.9) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "near-degenerate chain%s: P_R5 = %.4g, the chain rarely moves", at.c_str(),
                          p.r5());
            d.warnings.emplace_back(buf);
        }

        for (PolicyKind kind : spec.policies) {
            const std::string tag = std::string(" [") + std::string(to_string(kind)) + "]" + at;
            const TransitionMatrix full = build_generic(p, spec.thresholds, spec.caps, kind);
            check("column-stochastic" + tag, full.stochastic_defect(), 1e-12);
            check("zero structure" + tag, detail::zero_structure_violation(full), 0.0);

            if (kind == PolicyKind::DelayEfficient)
                check("closed-form delay-efficient transitions" + tag,
                      detail::max_abs_diff(build_prop1(p, spec.thresholds, spec.caps), full), 1e-12);
            if (kind == PolicyKind::ThroughputEfficient && zero_thr)
                check("closed-form throughput-efficient transitions" + tag,
                      detail::max_abs_diff(build_te_min(p, spec.caps), full), 1e-12);

            const TransitionMatrix red = reduce(full);
            Metrics m;
            try {
                const StationaryDist pi = stationary(red);
                check("stationary residual" + tag, stationary_residual(red, pi.pi), 1e-9);
                m = metrics(pi, red, link.r0);

                if (kind == PolicyKind::DelayEfficient && zero_thr) {
                    const Metrics cf = closed_form_min_delay(p, link.r0);
                    check("minimum-delay closed form" + tag,
                          std::max({std::abs(cf.r12 - m.r12), std::abs(cf.r21 - m.r21),
                                    std::abs(cf.t1_bar - m.t1_bar), std::abs(cf.t2_bar - m.t2_bar)}),
                          1e-10);
                }
                if (kind == PolicyKind::ThroughputEfficient && zero_thr && spec.caps.l1_max >= 3 &&
                    spec.caps.l2_max >= 3) {
                    try {
                        const StationaryDist occ = prop3_occupancy(p, spec.caps);
                        double worst = 0.0;
                        for (std::size_t i = 0; i < pi.space.size(); ++i)
                            worst = std::max(worst, std::abs(occ.at(pi.space[i]) - pi.pi(static_cast<Eigen::Index>(i))));
                        check("throughput-efficient occupancy recursion" + tag, worst, 1e-9);
                    } catch (const NumericalError& e) {
                        d.warnings.push_back("occupancy recursion" + tag + ": " + e.what());
                    }
                }
                const MinDelays floor = lemma1_min_delays(p);
                if (m.delays_defined())
                    check("delay floor" + tag,
                          std::max({0.0, floor.t1 - m.t1_bar - 1e-9, floor.t2 - m.t2_bar - 1e-9}), 0.0);
            } catch (const NumericalError& e) {
                d.numerical_failure = true;
                d.warnings.push_back("stationary solve failed" + tag + ": " + e.what());
                continue;
            }

            if (spec.has(Backend::Simulation)) {
                SimConfig c{link, spec.thresholds, spec.caps, kind, spec.n_slots, spec.seed, spec.warmup_slots};
                const Metrics s = run(c).metrics;
                if (m.r_sum > 0.0) check("simulated sum throughput (relative)" + tag, detail::rel(s.r_sum, m.r_sum), 0.01);
                if (m.delays_defined() && s.delays_defined())
                    check("simulated mean delay (relative)" + tag,
                          std::max(detail::rel(s.t1_bar, m.t1_bar), detail::rel(s.t2_bar, m.t2_bar)), 0.02);
            }
        }
    }
    return d;
}

}  // namespace bdrelay
