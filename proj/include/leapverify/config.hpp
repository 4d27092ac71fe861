// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a flat `key = value` text file, overridable from
// the command line, validated as a whole before anything runs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leapverify/engine.hpp"
#include "leapverify/predict.hpp"
#include "leapverify/regime.hpp"
#include "leapverify/tasks.hpp"
#include "leapverify/verify.hpp"

namespace leapverify {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Which quadratic predictors to sweep: the printed coefficient, the exact one, or both.
enum class QuadVariant : std::uint8_t { paper, exact, both };
std::string_view to_string(QuadVariant q);
QuadVariant parse_quad_variant(std::string_view name);

struct RunConfig {
    TaskParams task;
    std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46};
    std::uint64_t total_steps = 2000;
    std::uint64_t delta = 50;

    /// Unset means the task default (see default_lr).
    std::optional<double> lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double weight_decay = 0.01;
    double eps = 1e-8;
    std::uint64_t warmup = 100;

    std::optional<double> tau_low;
    std::optional<double> tau_high;
    CalibrationQuantiles calib_quantiles;
    /// Empty means "calibrate on the experiment seeds".
    std::vector<std::uint64_t> calib_seeds;
    /// 0 means total_steps.
    std::uint64_t calib_steps = 0;

    std::vector<std::uint64_t> k_set{5, 10, 25, 50, 75, 100};
    double epsilon = 0.05;
    std::size_t adaptive_window = 5;
    Criterion criterion = Criterion::strict;
    std::vector<CascadeConfig> cascades{{4, 25}, {2, 50}, {10, 10}};
    MomentumVariant momentum_variant = MomentumVariant::paper;
    QuadVariant quad_variant = QuadVariant::paper;
    FastForwardPolicy ff_policy = FastForwardPolicy::carry;
    bool regime_gating = true;

    PredictorId live_predictor = PredictorId::linear;
    std::uint64_t live_k = 5;

    std::filesystem::path out = "leapverify_out";
    std::size_t jobs = 1;

    /// Throws ConfigError on any out-of-range field.
    void validate() const;

    double effective_lr() const;
    std::optional<Thresholds> explicit_thresholds() const;
    EngineConfig engine() const;
    /// momentum, linear, then the quadratic variant(s) selected.
    std::vector<PredictorId> predictors() const;
    std::vector<std::uint64_t> calibration_seeds() const;

    /// Applies one `key = value` setting. Throws ConfigError on unknown keys
    /// or unparsable values.
    void set(std::string_view key, std::string_view value);

    /// Serialises every field; parse_config(to_text()) reproduces *this.
    std::string to_text() const;

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        return a.to_text() == b.to_text();
    }
};

/// Task-specific default base learning rate.
double default_lr(std::string_view task);

/// Parses `key = value` lines ('#' starts a comment) on top of the defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// All keys accepted by RunConfig::set, in serialisation order.
std::vector<std::string> config_keys();

std::vector<std::uint64_t> parse_u64_list(std::string_view text);
std::vector<CascadeConfig> parse_cascades(std::string_view text);

}  // namespace leapverify
