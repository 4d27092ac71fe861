// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/predict.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace leapverify {

std::string_view to_string(PredictorId id) {
    switch (id) {
        case PredictorId::momentum: return "momentum";
        case PredictorId::linear: return "linear";
        case PredictorId::quadratic: return "quadratic";
        case PredictorId::quadratic_exact: return "quadratic_exact";
    }
    return "?";
}

PredictorId parse_predictor(std::string_view name) {
    if (name == "momentum") return PredictorId::momentum;
    if (name == "linear") return PredictorId::linear;
    if (name == "quadratic") return PredictorId::quadratic;
    if (name == "quadratic_exact") return PredictorId::quadratic_exact;
    throw std::invalid_argument("unknown predictor '" + std::string(name) + "'");
}

std::size_t required_history(PredictorId id) {
    switch (id) {
        case PredictorId::momentum: return 1;
        case PredictorId::linear: return 2;
        case PredictorId::quadratic:
        case PredictorId::quadratic_exact: return 3;
    }
    return 3;
}

std::string_view to_string(MomentumVariant v) {
    return v == MomentumVariant::paper ? "paper" : "descent";
}

MomentumVariant parse_momentum_variant(std::string_view name) {
    if (name == "paper") return MomentumVariant::paper;
    if (name == "descent") return MomentumVariant::descent;
    throw std::invalid_argument("unknown momentum variant '" + std::string(name) + "'");
}

namespace {

void check_args(std::uint64_t delta, std::uint64_t horizon) {
    if (horizon == 0) throw std::invalid_argument("predictor: horizon K must be >= 1");
    if (delta == 0) throw std::invalid_argument("predictor: delta must be >= 1");
}

Prediction finish(PredictorId id, std::uint64_t horizon, const ParamVector& theta,
                  ParamVector predicted) {
    Prediction p;
    p.predictor = id;
    p.horizon = horizon;
    p.finite = predicted.is_finite();
    p.displacement_norm = l2_distance(predicted, theta);
    p.params = std::move(predicted);
    return p;
}

Prediction second_order(PredictorId id, const ParamVector& theta, const ParamVector& prev,
                        const ParamVector& prev2, std::uint64_t delta, std::uint64_t horizon,
                        double curvature_coeff) {
    require_same_length(theta.view(), prev.view(), "quadratic predictor");
    require_same_length(theta.view(), prev2.view(), "quadratic predictor");
    const double lin = static_cast<double>(horizon) / static_cast<double>(delta);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double velocity = theta[i] - prev[i];
        const double accel = theta[i] - 2.0 * prev[i] + prev2[i];
        out[i] = theta[i] + lin * velocity + curvature_coeff * accel;
    }
    return finish(id, horizon, theta, ParamVector(std::move(out)));
}

}  // namespace

Prediction predict_momentum(const ParamVector& theta, const ParamVector& m, const ParamVector& v,
                            std::uint64_t horizon, double eps) {
    check_args(1, horizon);
    if (!(eps > 0.0)) throw std::invalid_argument("predict_momentum: eps must be > 0");
    require_same_length(theta.view(), m.view(), "predict_momentum");
    require_same_length(theta.view(), v.view(), "predict_momentum");
    const double k = static_cast<double>(horizon);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = theta[i] + k * (m[i] / (std::sqrt(v[i]) + eps));
    }
    return finish(PredictorId::momentum, horizon, theta, ParamVector(std::move(out)));
}

Prediction predict_momentum_descent(const ParamVector& theta, const ParamVector& m,
                                    const ParamVector& v, std::uint64_t horizon, double eps,
                                    double lr, double beta1, double beta2,
                                    std::uint64_t adam_step) {
    check_args(1, horizon);
    if (!(eps > 0.0)) throw std::invalid_argument("predict_momentum_descent: eps must be > 0");
    require_same_length(theta.view(), m.view(), "predict_momentum_descent");
    require_same_length(theta.view(), v.view(), "predict_momentum_descent");
    const double k = static_cast<double>(horizon);
    const double t = static_cast<double>(adam_step == 0 ? 1 : adam_step);
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = theta[i] - k * lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
    return finish(PredictorId::momentum, horizon, theta, ParamVector(std::move(out)));
}

Prediction predict_linear(const ParamVector& theta, const ParamVector& prev, std::uint64_t delta,
                          std::uint64_t horizon) {
    check_args(delta, horizon);
    require_same_length(theta.view(), prev.view(), "predict_linear");
    const double lin = static_cast<double>(horizon) / static_cast<double>(delta);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = theta[i] + lin * (theta[i] - prev[i]);
    }
    return finish(PredictorId::linear, horizon, theta, ParamVector(std::move(out)));
}

Prediction predict_quadratic(const ParamVector& theta, const ParamVector& prev,
                             const ParamVector& prev2, std::uint64_t delta, std::uint64_t horizon) {
    check_args(delta, horizon);
    const double k = static_cast<double>(horizon);
    const double d = static_cast<double>(delta);
    return second_order(PredictorId::quadratic, theta, prev, prev2, delta, horizon,
                        k * (k - d) / (2.0 * d * d));
}

Prediction predict_quadratic_exact(const ParamVector& theta, const ParamVector& prev,
                                   const ParamVector& prev2, std::uint64_t delta,
                                   std::uint64_t horizon) {
    check_args(delta, horizon);
    const double k = static_cast<double>(horizon);
    const double d = static_cast<double>(delta);
    return second_order(PredictorId::quadratic_exact, theta, prev, prev2, delta, horizon,
                        k * (k + d) / (2.0 * d * d));
}

}  // namespace leapverify
