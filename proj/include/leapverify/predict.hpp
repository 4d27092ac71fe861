// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Analytic weight predictors. All are pure functions of the checkpoint
// history (or optimizer moments) and the horizon K.

#pragma once

#include <cstdint>
#include <string_view>

#include "leapverify/core.hpp"

namespace leapverify {

/// quadratic_exact is not one of the published predictors; it uses the
/// interpolation-exact curvature coefficient and is always reported
/// separately from quadratic.
enum class PredictorId : std::uint8_t { momentum, linear, quadratic, quadratic_exact };

std::string_view to_string(PredictorId id);
/// Throws std::invalid_argument on unknown names.
PredictorId parse_predictor(std::string_view name);

/// Number of spaced checkpoints the predictor needs (1, 2 or 3).
std::size_t required_history(PredictorId id);

enum class MomentumVariant : std::uint8_t {
    paper,    ///< theta + K * m / (sqrt(v) + eps), raw moments, no lr, additive sign
    descent,  ///< theta - K * lr * m_hat / (sqrt(v_hat) + eps), bias-corrected
};

std::string_view to_string(MomentumVariant v);
MomentumVariant parse_momentum_variant(std::string_view name);

struct Prediction {
    PredictorId predictor = PredictorId::linear;
    std::uint64_t horizon = 0;
    ParamVector params;
    double displacement_norm = 0.0;
    bool finite = true;
};

/// theta + K * m / (sqrt(v) + eps), elementwise, with the raw moments.
Prediction predict_momentum(const ParamVector& theta, const ParamVector& m, const ParamVector& v,
                            std::uint64_t horizon, double eps);

/// Descent-signed, learning-rate-scaled alternative. `adam_step` is the
/// number of updates already taken (for bias correction); lr is the rate in
/// effect at the checkpoint.
Prediction predict_momentum_descent(const ParamVector& theta, const ParamVector& m,
                                    const ParamVector& v, std::uint64_t horizon, double eps,
                                    double lr, double beta1, double beta2, std::uint64_t adam_step);

/// theta_t + (K/delta) (theta_t - theta_prev)
Prediction predict_linear(const ParamVector& theta, const ParamVector& prev, std::uint64_t delta,
                          std::uint64_t horizon);

/// Linear term plus K(K - delta)/(2 delta^2) times the second difference.
Prediction predict_quadratic(const ParamVector& theta, const ParamVector& prev,
                             const ParamVector& prev2, std::uint64_t delta, std::uint64_t horizon);

/// Linear term plus K(K + delta)/(2 delta^2) times the second difference;
/// exact for trajectories quadratic in the step index.
Prediction predict_quadratic_exact(const ParamVector& theta, const ParamVector& prev,
                                   const ParamVector& prev2, std::uint64_t delta,
                                   std::uint64_t horizon);

}  // namespace leapverify
