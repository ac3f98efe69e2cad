// bdrelay - sweep, self-check or inspect the buffer-aided relay models.
//
//   bdrelay sweep    [--config F] [overrides]   CSV table over the SNR grid
//   bdrelay validate [--config F] [overrides]   invariant checks, PASS/FAIL
//   bdrelay single   [--config F] --snr-db X    every backend at one point
//
// Exit status: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bdrelay/sweep.hpp"

using namespace bdrelay;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2 };

struct Overrides {
    std::string config;
    std::optional<std::string> output, backends, policies, thresholds, caps;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config, "key = value configuration file");
    app->add_option("-o,--output", o.output, "CSV output path, - for stdout");
    app->add_option("--seed", o.seed, "simulation seed");
    app->add_option("--backends", o.backends, "comma list: analytical,simulation,asymptotic,"
                                              "baseline-conventional,baseline-buffered");
    app->add_option("--policies", o.policies, "comma list: delay,throughput");
    app->add_option("--thresholds", o.thresholds, "queue thresholds l1_thr,l2_thr");
    app->add_option("--caps", o.caps, "buffer capacities l1_max,l2_max");
    app->add_option("--workers", o.workers, "worker threads, 0 = hardware");
}

void set_pair(SweepSpec& s, const std::string& flag, const std::string& v, const char* k1, const char* k2) {
    const auto c = v.find(',');
    if (c == std::string::npos) throw ConfigError(flag, "expected two comma-separated integers");
    apply_setting(s, k1, v.substr(0, c));
    apply_setting(s, k2, v.substr(c + 1));
}

SweepSpec resolve(const Overrides& o) {
    SweepSpec s = o.config.empty() ? SweepSpec{} : load_config(o.config);
    if (o.output) apply_setting(s, "output", *o.output);
    if (o.seed) s.seed = *o.seed;
    if (o.workers) s.workers = *o.workers;
    if (o.backends) apply_setting(s, "backends", *o.backends);
    if (o.policies) apply_setting(s, "policies", *o.policies);
    if (o.thresholds) set_pair(s, "thresholds", *o.thresholds, "l1_thr", "l2_thr");
    if (o.caps) set_pair(s, "caps", *o.caps, "l1_max", "l2_max");
    s.validate();
    return s;
}

int do_sweep(const SweepSpec& s) {
    const auto rows = run_sweep(s);
    if (s.output == "-") {
        write_csv(std::cout, rows, s);
    } else {
        std::ofstream out(s.output);
        if (!out) throw ConfigError("output", "cannot write '" + s.output + "'");
        write_csv(out, rows, s);
    }
    for (const auto& r : rows)
        if (r.failed()) return kNumerical;
    return kOk;
}

int do_validate(const SweepSpec& s) {
    const Diagnostics d = validate(s);
    for (const Check& c : d.checks)
        std::printf("%s %s (residual %.3g, tol %.3g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.residual,
                    c.tolerance);
    for (const auto& w : d.warnings) std::printf("WARN %s\n", w.c_str());
    std::size_t failed = 0;
    for (const Check& c : d.checks) failed += !c.passed;
    std::printf("%zu checks, %zu failed, %zu warnings\n", d.checks.size(), failed, d.warnings.size());
    return d.ok() ? kOk : kNumerical;
}

int do_single(SweepSpec s, double snr_db) {
    s.snr_start_db = s.snr_stop_db = snr_db;
    s.validate();
    const LinkConfig link = s.link_at(snr_db);
    const RegionProbs p = region_probs_exact(link);
    std::printf("snr_db      %g (gamma %g)\n", snr_db, link.gamma);
    std::printf("omega       %g %g\n", link.omega1, link.omega2);
    std::printf("r0          %g (thr %g, thr_sum %g)\n", link.r0, link.gamma_thr(), link.gamma_thr_sum());
    std::printf("caps        %d %d\n", s.caps.l1_max, s.caps.l2_max);
    std::printf("thresholds  %d %d\n", s.thresholds.l1_thr, s.thresholds.l2_thr);
    std::printf("P_R1..P_R5  %.10g %.10g %.10g %.10g %.10g\n", p.r1(), p.r2(), p.r3(), p.r4(), p.r5());
    const MinDelays floor = lemma1_min_delays(p);
    std::printf("delay floor %.10g %.10g\n", floor.t1, floor.t2);
    int rc = kOk;
    for (const ResultRow& r : run_sweep(s)) {
        const Metrics& m = r.metrics;
        std::printf("\n[%s / %s] %s", std::string(to_string(r.backend)).c_str(), r.policy.c_str(), r.status.c_str());
        if (r.seed) std::printf(" seed=%llu", static_cast<unsigned long long>(*r.seed));
        std::printf("\n");
        std::printf("  r12 %s  r21 %s  r_sum %s\n", format_cell(m.r12).c_str(), format_cell(m.r21).c_str(),
                    format_cell(m.r_sum).c_str());
        std::printf("  f12 %s  f21 %s  f_sys %s\n", format_cell(m.f12).c_str(), format_cell(m.f21).c_str(),
                    format_cell(m.f_sys).c_str());
        std::printf("  q1  %s  q2  %s\n", format_cell(m.q1_bar).c_str(), format_cell(m.q2_bar).c_str());
        std::printf("  t1  %s  t2  %s  t_sys %s\n", format_cell(m.t1_bar).c_str(), format_cell(m.t2_bar).c_str(),
                    format_cell(m.t_sys()).c_str());
        if (r.failed()) rc = kNumerical;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-constrained mode selection for buffer-aided bidirectional relaying"};
    app.require_subcommand(1);

    Overrides o;
    double snr_db = 10.0;
    auto* sweep = app.add_subcommand("sweep", "evaluate the configured backends over the SNR grid, write CSV");
    auto* check = app.add_subcommand("validate", "run the cross-backend invariant checks");
    auto* single = app.add_subcommand("single", "verbose metrics at one SNR point");
    for (auto* sub : {sweep, check, single}) add_common(sub, o);
    single->add_option("--snr-db", snr_db, "transmit SNR in dB")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        const SweepSpec spec = resolve(o);
        if (*sweep) return do_sweep(spec);
        if (*check) return do_validate(spec);
        return do_single(spec, snr_db);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const OutOfScopeError& e) {
        std::fprintf(stderr, "out of scope: %s\n", e.what());
        return kConfig;
    }
}
