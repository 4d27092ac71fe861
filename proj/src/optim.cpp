// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leapverify {

void AdamHyper::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be finite and >= 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must be in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in (0,1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (total_steps == 0) throw std::invalid_argument("total_steps must be > 0");
    if (warmup_steps > total_steps) throw std::invalid_argument("warmup_steps exceeds total_steps");
}

double lr_at(const AdamHyper& hyper, std::uint64_t step) {
    if (hyper.warmup_steps > 0 && step < hyper.warmup_steps) {
        return hyper.lr * static_cast<double>(step + 1) / static_cast<double>(hyper.warmup_steps);
    }
    if (step >= hyper.total_steps) {
        return 0.0;
    }
    const double span = static_cast<double>(hyper.total_steps - hyper.warmup_steps);
    const double progress = static_cast<double>(step - hyper.warmup_steps) / span;
    return 0.5 * hyper.lr * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamState AdamState::fresh(std::size_t dim) {
    return AdamState{ParamVector::zeros(dim), ParamVector::zeros(dim), 0};
}

AdamUpdate apply_update(const AdamHyper& hyper, const AdamState& state, const ParamVector& params,
                        const ParamVector& grad) {
    require_same_length(params.view(), grad.view(), "apply_update");
    require_same_length(params.view(), state.m.view(), "apply_update");
    require_same_length(params.view(), state.v.view(), "apply_update");
    if (!grad.is_finite()) {
        throw NonFiniteError("apply_update: non-finite gradient at step " +
                             std::to_string(state.step));
    }

    const double lr = lr_at(hyper, state.step);
    const std::uint64_t t = state.step + 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));

    const std::size_t n = params.size();
    std::vector<double> m(n), v(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
        v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        const double decayed = params[i] * (1.0 - lr * hyper.weight_decay);
        p[i] = decayed - lr * mhat / (std::sqrt(vhat) + hyper.eps);
    }
    return AdamUpdate{AdamState{ParamVector(std::move(m)), ParamVector(std::move(v)), t},
                      ParamVector(std::move(p))};
}

Moments snapshot_moments(const AdamState& state) { return Moments{state.m, state.v}; }

}  // namespace leapverify
