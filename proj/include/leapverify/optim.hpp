// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// AdamW with linear warmup followed by cosine decay to zero.

#pragma once

#include <cstdint>
#include <utility>

#include "leapverify/core.hpp"

namespace leapverify {

struct AdamHyper {
    double lr = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double weight_decay = 0.01;
    double eps = 1e-8;
    std::uint64_t warmup_steps = 100;
    std::uint64_t total_steps = 2000;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Learning rate used by the update taken at `step` (0-based).
///
/// Warmup: lr * (step + 1) / warmup_steps, so the first update is already
/// nonzero and step == warmup_steps lands exactly on lr. Afterwards the rate
/// follows 0.5 * lr * (1 + cos(pi * progress)) down to 0 at total_steps.
double lr_at(const AdamHyper& hyper, std::uint64_t step);

struct AdamState {
    ParamVector m;
    ParamVector v;
    std::uint64_t step = 0;

    static AdamState fresh(std::size_t dim);
};

struct Moments {
    ParamVector m;
    ParamVector v;

    friend bool operator==(const Moments&, const Moments&) = default;
};

struct AdamUpdate {
    AdamState state;
    ParamVector params;
};

/// One AdamW step (decoupled weight decay, bias-corrected moments). Throws
/// NonFiniteError on a non-finite gradient and DimensionError on mismatched
/// lengths.
AdamUpdate apply_update(const AdamHyper& hyper, const AdamState& state, const ParamVector& params,
                        const ParamVector& grad);

/// Copies of the raw (uncorrected) moments.
Moments snapshot_moments(const AdamState& state);

}  // namespace leapverify
