// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Training-regime labels from the cosine similarity of consecutive
// activation fingerprints.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leapverify {

struct Checkpoint;

/// Ordered chaotic < transition < stable; unknown sorts outside that order.
enum class RegimeLabel : std::uint8_t { unknown = 0, chaotic = 1, transition = 2, stable = 3 };

std::string_view to_string(RegimeLabel label);
/// Throws std::invalid_argument on an unrecognised name.
RegimeLabel parse_regime(std::string_view name);
/// Throws std::invalid_argument on a code outside the enum.
RegimeLabel regime_from_code(std::uint8_t code);

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Thresholds {
    double tau_low = 0.0;
    double tau_high = 0.0;

    /// Throws std::invalid_argument unless -1 <= tau_low < tau_high <= 1.
    void validate() const;
};

/// Quantiles used to derive thresholds from a similarity trace.
struct CalibrationQuantiles {
    double low = 0.25;
    double high = 0.75;
};

/// Cosine similarity of two checkpoints' fingerprints. Requires
/// curr.step - prev.step == delta.
double similarity_at(const Checkpoint& curr, const Checkpoint& prev, std::uint64_t delta);

/// stable if s > tau_high, chaotic if s < tau_low, otherwise transition.
RegimeLabel classify(double similarity, const Thresholds& th);

/// Per-trace quantile thresholds averaged across traces. Throws
/// CalibrationError for empty input, traces shorter than two values, or a
/// degenerate result (tau_low >= tau_high).
Thresholds calibrate(std::span<const std::vector<double>> traces,
                     const CalibrationQuantiles& q = {});

/// Similarities s_t between each checkpoint and its predecessor; entry i
/// corresponds to checkpoint i + 1.
std::vector<double> similarity_trace(std::span<const Checkpoint> run);

/// Labels for a run: the first checkpoint is unknown, the rest are
/// classified from similarity_trace.
std::vector<RegimeLabel> label_run(std::span<const Checkpoint> run, const Thresholds& th);

struct RegimeCounts {
    std::size_t chaotic = 0;
    std::size_t transition = 0;
    std::size_t stable = 0;
    std::size_t unknown = 0;

    std::size_t total() const { return chaotic + transition + stable + unknown; }
    std::size_t of(RegimeLabel label) const;
    friend bool operator==(const RegimeCounts&, const RegimeCounts&) = default;
};

RegimeCounts regime_breakdown(std::span<const Checkpoint> run);

/// Step of the first transition/stable checkpoint whose predecessor is
/// chaotic (the first chaotic -> non-chaotic boundary). Labels before any
/// chaotic checkpoint do not count. Empty if there is no such boundary.
std::optional<std::uint64_t> chaotic_exit_step(std::span<const Checkpoint> run);

}  // namespace leapverify
