#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "kfplab/solver.hpp"

namespace kfplab {

/// Outcome of a scripted boundary experiment. Reports are reproducible from
/// (config, seed): content_hash covers everything except wall time.
struct ExperimentReport {
    std::string experiment;
    std::string verdict;  // "pass" | "fail" | "degenerate" | "certificate-fail"
    std::string claim;    // plain-language statement of the checked behaviour
    std::uint64_t seed = 0;
    nlohmann::json inputs;       // configuration echo
    nlohmann::json fitted;       // fitted quantities and fit quality
    nlohmann::json certificate;  // embedded barrier certificate verdict
    double wall_ms = 0.0;

    nlohmann::json to_json(bool include_volatile = true) const;
    std::uint64_t content_hash() const;
    int exit_code() const;  // 0 pass, 2 band fail, 3 certificate fail, 4 degenerate
};

/// Exponential decay of the boundary trace: fits log|f(0, x, vd)| against
/// 1/|x| per incoming velocity, then the power of the decay coefficient in
/// |vd|. Modes: "exact" (closed-form stationary field) and "solver".
ExperimentReport run_vanishing_experiment(const KeyValueConfig& cfg, std::uint64_t seed);

/// Linear vanishing at an incoming boundary point: exponents of |f| along the
/// x-ray and of the increments along the v- and t-rays anchored at the first
/// resolved interior node.
ExperimentReport run_gradient_experiment(const KeyValueConfig& cfg, std::uint64_t seed);

/// Oscillation decay towards the grazing point and the sharp kinetic Holder
/// exponent of the closed-form field.
ExperimentReport run_oscillation_decay(const KeyValueConfig& cfg, std::uint64_t seed);

/// Smoothness sanity scan: finite-difference quotients of the solved field,
/// bounded away from grazing, reported (not asserted) near it; plus the
/// closed-form Holder fit.
ExperimentReport run_holder_sanity(const KeyValueConfig& cfg, std::uint64_t seed);

/// Writes report.json (and report.csv with one row per fitted point) into dir.
void write_report(const ExperimentReport& rep, const std::string& format,
                  const std::string& dir);

}  // namespace kfplab
