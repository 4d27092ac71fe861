// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Small trainable systems with analytic gradients. Each task owns a fixed
// held-out validation set and a fixed probe set; the minibatch stream is a
// pure function of (run seed, global step).

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "leapverify/core.hpp"

namespace leapverify {

/// One minibatch: row indices into the task's training pool plus a key for
/// any per-batch noise the task injects.
struct Batch {
    std::uint64_t step = 0;
    std::uint64_t key = 0;
    std::vector<std::uint32_t> rows;
};

struct TaskGradient {
    double loss = 0.0;
    ParamVector grad;
};

/// Tunables for the built-in tasks. Only the fields of the selected task are
/// read.
struct TaskParams {
    std::string name = "mlp-reg";
    std::uint64_t data_seed = 1234;
    std::size_t batch_size = 32;
    std::size_t probe_count = 100;

    // quad-bowl
    std::size_t bowl_dim = 64;
    double bowl_curv_min = 0.01;
    double bowl_curv_max = 1.0;
    double bowl_noise = 0.1;
    double bowl_init_scale = 1.0;

    // mlp-reg
    std::size_t mlp_input = 16;
    std::size_t mlp_hidden = 512;
    std::size_t mlp_output = 4;
    std::size_t mlp_train_size = 4096;
    std::size_t mlp_val_size = 512;
    double mlp_label_noise = 0.1;

    // char-seq
    std::size_t seq_vocab = 16;
    std::size_t seq_context = 2;
    std::size_t seq_embed = 8;
    std::size_t seq_hidden = 64;
    std::size_t seq_train_size = 8192;
    std::size_t seq_val_size = 1024;
};

/// Names accepted by make_task.
std::vector<std::string> builtin_task_names();

class Task {
public:
    virtual ~Task() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t param_dim() const = 0;
    virtual std::size_t fingerprint_dim() const = 0;

    /// Initial parameters for a run; depends only on the run seed.
    virtual ParamVector initial_params(std::uint64_t seed) const = 0;

    /// Minibatch used at a given global step of a run.
    virtual Batch batch(std::uint64_t seed, std::uint64_t step) const = 0;

    /// Minibatch loss and its gradient. Throws NonFiniteError on non-finite
    /// parameters.
    virtual TaskGradient loss_and_grad(const ParamVector& params, const Batch& batch) const = 0;

    /// Minibatch loss only (used by gradient checks).
    virtual double batch_loss(const ParamVector& params, const Batch& batch) const = 0;

    /// Mean loss over the fixed held-out set. Non-finite parameters yield a
    /// non-finite result rather than an exception.
    virtual double validation_loss(const ParamVector& params) const = 0;

    /// Final-layer outputs over the probe set, concatenated in probe order.
    virtual std::vector<double> fingerprint(const ParamVector& params) const = 0;
};

/// Throws std::invalid_argument for unknown task names or bad sizes.
std::unique_ptr<Task> make_task(const TaskParams& params);

/// quad-bowl with an explicit curvature spectrum and minimiser.
std::unique_ptr<Task> make_quad_bowl(std::vector<double> curvature, std::vector<double> target,
                                     double noise = 0.0);

/// SplitMix64 mix of two words; used to derive independent RNG streams.
std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace leapverify
