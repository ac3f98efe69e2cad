// config.hpp - sweep specification and its key = value file format.
//
// Grammar: one `key = value` per line; `#` starts a comment; blank lines are
// ignored; keys are case-sensitive and may appear once. Lists are
// comma-separated. SNR values are in dB and converted to linear once, when a
// sweep point is built.
//
//   omega1, omega2              mean fading gains                 1, 1
//   r0                          rate, bits/symbol                 1
//   l1_max, l2_max              buffer capacities                 10, 10
//   l1_thr, l2_thr              queue thresholds                  0, 0
//   policies                    delay, throughput                 delay,throughput
//   backends                    analytical, simulation, asymptotic,
//                               baseline-conventional, baseline-buffered
//                                                                 analytical
//   snr_start_db, snr_stop_db   sweep range                       0, 40
//   snr_step_db                                                   1
//   n_slots, warmup_slots       simulation horizon                1000000, 1000
//   seed                                                          1
//   workers                     worker threads, 0 = hardware      0
//   output                      CSV path, - = stdout              -

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/mode_space.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay {

enum class Backend { Analytical, Simulation, Asymptotic, BaselineConventional, BaselineBuffered };

inline std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Analytical: return "analytical";
        case Backend::Simulation: return "simulation";
        case Backend::Asymptotic: return "asymptotic";
        case Backend::BaselineConventional: return "baseline-conventional";
        case Backend::BaselineBuffered: return "baseline-buffered";
    }
    return "?";
}

struct SweepSpec {
    double omega1 = 1.0;
    double omega2 = 1.0;
    double r0 = 1.0;
    BufferCaps caps;
    Thresholds thresholds;
    std::vector<PolicyKind> policies{PolicyKind::DelayEfficient, PolicyKind::ThroughputEfficient};
    std::vector<Backend> backends{Backend::Analytical};
    double snr_start_db = 0.0;
    double snr_stop_db = 40.0;
    double snr_step_db = 1.0;
    std::uint64_t n_slots = 1'000'000;
    std::uint64_t warmup_slots = 1'000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string output = "-";

    // Sweep grid, computed as start + k step so it does not drift.
    std::vector<double> snr_grid_db() const {
        std::vector<double> g;
        const auto n = static_cast<std::size_t>(std::floor((snr_stop_db - snr_start_db) / snr_step_db + 1e-9)) + 1;
        for (std::size_t k = 0; k < n; ++k) g.push_back(snr_start_db + static_cast<double>(k) * snr_step_db);
        return g;
    }

    LinkConfig link_at(double snr_db) const { return {omega1, omega2, db_to_linear(snr_db), r0}; }

    bool has(Backend b) const {
        for (Backend x : backends)
            if (x == b) return true;
        return false;
    }

    void validate() const {
        link_at(snr_start_db).validate();
        caps.validate();
        thresholds.validate(caps);
        if (!std::isfinite(snr_start_db)) throw ConfigError("snr_start_db", "must be finite");
        if (!std::isfinite(snr_stop_db)) throw ConfigError("snr_stop_db", "must be finite");
        if (!(snr_step_db > 0.0) || !std::isfinite(snr_step_db)) throw ConfigError("snr_step_db", "must be > 0");
        if (snr_start_db > snr_stop_db) throw ConfigError("snr_stop_db", "must be >= snr_start_db");
        if (backends.empty()) throw ConfigError("backends", "at least one backend required");
        if (policies.empty()) throw ConfigError("policies", "at least one policy required");
        if (has(Backend::Simulation) && n_slots <= warmup_slots)
            throw ConfigError("n_slots", "must exceed warmup_slots");
        if (has(Backend::BaselineBuffered) && n_slots % 2 != 0)
            throw ConfigError("n_slots", "buffered MABC needs an even horizon");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    while (true) {
        const auto c = v.find(',');
        const auto item = trim(v.substr(0, c));
        if (!item.empty()) out.emplace_back(item);
        if (c == std::string_view::npos) break;
        v.remove_prefix(c + 1);
    }
    return out;
}

inline double parse_double(const std::string& key, std::string_view v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
    return x;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view v) {
    Int x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
    return x;
}

inline PolicyKind parse_policy(const std::string& key, std::string_view v) {
    if (v == "delay") return PolicyKind::DelayEfficient;
    if (v == "throughput") return PolicyKind::ThroughputEfficient;
    throw ConfigError(key, "unknown policy '" + std::string(v) + "' (delay, throughput)");
}

inline Backend parse_backend(const std::string& key, std::string_view v) {
    for (Backend b : {Backend::Analytical, Backend::Simulation, Backend::Asymptotic, Backend::BaselineConventional,
                      Backend::BaselineBuffered})
        if (v == to_string(b)) return b;
    throw ConfigError(key, "unknown backend '" + std::string(v) + "'");
}

}  // namespace detail

// Sets one key. Shared by the file parser and the command-line overrides.
inline void apply_setting(SweepSpec& s, const std::string& key, std::string_view value) {
    using namespace detail;
    value = trim(value);
    if (value.empty()) throw ConfigError(key, "missing value");
    if (key == "omega1") s.omega1 = parse_double(key, value);
    else if (key == "omega2") s.omega2 = parse_double(key, value);
    else if (key == "r0") s.r0 = parse_double(key, value);
    else if (key == "l1_max") s.caps.l1_max = parse_int<int>(key, value);
    else if (key == "l2_max") s.caps.l2_max = parse_int<int>(key, value);
    else if (key == "l1_thr") s.thresholds.l1_thr = parse_int<int>(key, value);
    else if (key == "l2_thr") s.thresholds.l2_thr = parse_int<int>(key, value);
    else if (key == "snr_start_db") s.snr_start_db = parse_double(key, value);
    else if (key == "snr_stop_db") s.snr_stop_db = parse_double(key, value);
    else if (key == "snr_step_db") s.snr_step_db = parse_double(key, value);
    else if (key == "n_slots") s.n_slots = parse_int<std::uint64_t>(key, value);
    else if (key == "warmup_slots") s.warmup_slots = parse_int<std::uint64_t>(key, value);
    else if (key == "seed") s.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "workers") s.workers = parse_int<unsigned>(key, value);
    else if (key == "output") s.output = std::string(value);
    else if (key == "policies") {
        s.policies.clear();
        std::set<PolicyKind> seen;
        for (const auto& v : split_list(value))
            if (seen.insert(parse_policy(key, v)).second) s.policies.push_back(parse_policy(key, v));
    } else if (key == "backends") {
        s.backends.clear();
        std::set<Backend> seen;
        for (const auto& v : split_list(value))
            if (seen.insert(parse_backend(key, v)).second) s.backends.push_back(parse_backend(key, v));
    } else {
        throw ConfigError(key, "unknown key");
    }
}

// Parses settings on top of `base`. Does not validate the result.
inline SweepSpec parse_config(std::istream& in, SweepSpec base = {}) {
    std::set<std::string> seen;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        std::string_view v = line;
        if (const auto h = v.find('#'); h != std::string_view::npos) v = v.substr(0, h);
        v = detail::trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(v), "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(detail::trim(v.substr(0, eq)));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second) throw ConfigError(key, "line " + std::to_string(lineno) + ": duplicate key");
        apply_setting(base, key, v.substr(eq + 1));
    }
    return base;
}

inline SweepSpec parse_config_text(const std::string& text, SweepSpec base = {}) {
    std::istringstream in(text);
    return parse_config(in, std::move(base));
}

inline SweepSpec load_config(const std::string& path, SweepSpec base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    return parse_config(in, std::move(base));
}

}  // namespace bdrelay
