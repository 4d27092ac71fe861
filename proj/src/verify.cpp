// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace leapverify {

std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::strict: return "strict";
        case Criterion::adaptive: return "adaptive";
        case Criterion::proximity: return "proximity";
    }
    return "?";
}

Criterion parse_criterion(std::string_view name) {
    if (name == "strict") return Criterion::strict;
    if (name == "adaptive") return Criterion::adaptive;
    if (name == "proximity") return Criterion::proximity;
    throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

std::optional<bool> Decision::passes(Criterion c) const {
    switch (c) {
        case Criterion::strict: return strict;
        case Criterion::adaptive: return adaptive;
        case Criterion::proximity: return proximity;
    }
    return std::nullopt;
}

Decision decide(double predicted_loss, double current_loss, std::optional<double> sigma,
                double epsilon) {
    if (!std::isfinite(current_loss) || !(current_loss > 0.0)) {
        throw std::invalid_argument("decide: current loss must be finite and > 0");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("decide: epsilon must be in (0, 1)");
    }
    if (sigma && !(*sigma >= 0.0)) {
        throw std::invalid_argument("decide: sigma must be >= 0");
    }
    Decision d;
    d.predicted_loss = predicted_loss;
    d.current_loss = current_loss;
    d.sigma = sigma;
    d.epsilon = epsilon;
    if (!std::isfinite(predicted_loss)) {
        d.reason = "non-finite prediction";
        if (sigma) d.adaptive = false;
        return d;
    }
    d.strict = predicted_loss < current_loss;
    if (sigma) d.adaptive = predicted_loss < current_loss + *sigma;
    d.proximity = std::abs(predicted_loss - current_loss) < epsilon * current_loss;
    return d;
}

}  // namespace leapverify
