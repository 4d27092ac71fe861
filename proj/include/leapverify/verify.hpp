// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance criteria for a predicted validation loss.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace leapverify {

enum class Criterion : std::uint8_t { strict, adaptive, proximity };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

struct Decision {
    bool strict = false;
    /// nullopt when no loss spread is available (fewer than two losses).
    std::optional<bool> adaptive;
    bool proximity = false;
    double predicted_loss = 0.0;
    double current_loss = 0.0;
    std::optional<double> sigma;
    double epsilon = 0.05;
    /// Empty unless the prediction was rejected outright.
    std::string reason;

    /// Verdict under one criterion; nullopt if that criterion is not
    /// evaluable.
    std::optional<bool> passes(Criterion c) const;
};

/// strict: L_hat < L_t
/// adaptive: L_hat < L_t + sigma
/// proximity: |L_hat - L_t| < epsilon * L_t
///
/// A non-finite L_hat fails every criterion. Throws std::invalid_argument if
/// L_t is not finite and positive or epsilon is outside (0, 1).
Decision decide(double predicted_loss, double current_loss, std::optional<double> sigma,
                double epsilon);

}  // namespace leapverify
