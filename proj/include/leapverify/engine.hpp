// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// The training loop with speculative leaps. At a checkpoint the engine
// predicts parameters K steps ahead, scores them on the held-out set and
// either fast-forwards to them or carries on untouched.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leapverify/optim.hpp"
#include "leapverify/predict.hpp"
#include "leapverify/regime.hpp"
#include "leapverify/tasks.hpp"
#include "leapverify/trajectory.hpp"
#include "leapverify/verify.hpp"

namespace leapverify {

/// What happens to the Adam state when a leap is accepted.
enum class FastForwardPolicy : std::uint8_t {
    carry,  ///< moments unchanged, step counter advances by K
    decay,  ///< moments scaled by beta^K, step counter advances by K
};

std::string_view to_string(FastForwardPolicy p);
FastForwardPolicy parse_ff_policy(std::string_view name);

struct EngineConfig {
    AdamHyper hyper;
    std::uint64_t delta = 50;
    std::size_t adaptive_window = 5;
    double epsilon = 0.05;
    MomentumVariant momentum_variant = MomentumVariant::paper;
    bool regime_gating = true;
    Criterion criterion = Criterion::strict;
    FastForwardPolicy ff_policy = FastForwardPolicy::carry;
};

struct Speculation {
    bool eligible = false;
    std::string ineligible_reason;
    Prediction prediction;
    double predicted_loss = 0.0;
};

/// Predicts K steps past the newest checkpoint of `window` and evaluates the
/// validation loss there. Never touches training state. Ineligible when the
/// window is too short for the predictor, or (with gating) when `regime` is
/// chaotic or unknown.
Speculation speculate(const Task& task, const HistoryWindow& window, PredictorId predictor,
                      std::uint64_t horizon, const EngineConfig& cfg,
                      std::optional<RegimeLabel> regime = std::nullopt);

/// Prediction only (no loss evaluation); nullopt when the window is too
/// short.
std::optional<Prediction> predict_from_window(const HistoryWindow& window, PredictorId predictor,
                                              std::uint64_t horizon, const EngineConfig& cfg);

struct LeapEvent {
    std::uint64_t step_from = 0;
    std::uint64_t horizon = 0;
    PredictorId predictor = PredictorId::linear;
    bool eligible = false;
    std::string ineligible_reason;
    Decision decision;
    double displacement_norm = 0.0;
    bool applied = false;
    Criterion criterion_used = Criterion::strict;
    RegimeLabel regime_at_leap = RegimeLabel::unknown;
};

/// Leap attempted at every checkpoint of a live run.
struct LeapPlan {
    PredictorId predictor = PredictorId::linear;
    std::uint64_t horizon = 50;
    /// Evaluate and log, but never apply.
    bool force_reject = false;
};

/// One training run: parameters, optimizer state, checkpoint store and the
/// skipped-step ledger. Single writer.
class TrainingRun {
public:
    TrainingRun(const Task& task, std::uint64_t seed, EngineConfig cfg,
                std::optional<Thresholds> thresholds = std::nullopt,
                std::optional<std::filesystem::path> persist_dir = std::nullopt);

    /// One gradient step on batch(seed, step).
    void train_step();

    /// Evaluates and stores a checkpoint at the current step, labelling its
    /// regime when thresholds are known. Requires step % delta == 0.
    const Checkpoint& record_checkpoint();

    /// Speculates from the newest checkpoint and applies the leap if the
    /// configured criterion passes. On rejection the run state is untouched.
    LeapEvent leap_or_continue(const LeapPlan& plan);

    /// Trains until total_steps, recording a checkpoint whenever the step
    /// counter hits a multiple of delta and, if a plan is given, attempting a
    /// leap after each checkpoint.
    void run(const std::optional<LeapPlan>& plan = std::nullopt,
             const std::function<void(const LeapEvent&)>& on_event = {});

    const Task& task() const noexcept { return task_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const EngineConfig& config() const noexcept { return cfg_; }
    std::uint64_t step() const noexcept { return step_; }
    const ParamVector& params() const noexcept { return params_; }
    const AdamState& adam() const noexcept { return adam_; }
    const TrajectoryStore& trajectory() const noexcept { return store_; }
    /// Minibatch loss of every gradient step taken, in order.
    const std::vector<double>& train_losses() const noexcept { return train_losses_; }
    std::uint64_t skipped_steps() const noexcept { return skipped_; }
    const std::vector<LeapEvent>& events() const noexcept { return events_; }

private:
    const Task& task_;
    std::uint64_t seed_;
    EngineConfig cfg_;
    std::optional<Thresholds> thresholds_;
    ParamVector params_;
    AdamState adam_;
    std::uint64_t step_ = 0;
    TrajectoryStore store_;
    std::vector<double> train_losses_;
    std::uint64_t skipped_ = 0;
    std::vector<LeapEvent> events_;
};

struct CascadeConfig {
    std::uint64_t depth = 1;
    std::uint64_t horizon = 1;

    std::uint64_t max_advance() const { return depth * horizon; }
    friend bool operator==(const CascadeConfig&, const CascadeConfig&) = default;
};

struct CascadeStage {
    std::uint64_t stage = 0;  ///< 1-based
    PredictorId predictor_used = PredictorId::linear;
    double predicted_loss = 0.0;
    double reference_loss = 0.0;
    double displacement_norm = 0.0;
    Decision decision;
    bool accepted = false;
};

struct CascadeResult {
    bool eligible = false;
    std::string ineligible_reason;
    std::uint64_t start_step = 0;
    CascadeConfig config;
    PredictorId predictor = PredictorId::linear;
    Criterion criterion = Criterion::strict;
    std::vector<CascadeStage> stages;
    std::uint64_t accepted_depth = 0;
};

/// Chains `depth` predictions of `horizon` steps each from the newest
/// checkpoint of `window`, stopping at the first rejected stage. Stage j is
/// judged against the loss of stage j-1 (the start checkpoint for j = 1).
///
/// Stage 1 uses the real window. Later finite-difference stages use the
/// chain of states spaced `horizon` apart: the real window joins the chain
/// only when horizon == delta; with too few chain states the highest order
/// available is used. Momentum stages reuse the start checkpoint's moments.
///
/// `losses` is the validation-loss log up to and including the start
/// checkpoint (for the adaptive criterion).
CascadeResult run_cascade(const Task& task, const HistoryWindow& window,
                          std::span<const double> losses, const CascadeConfig& cascade,
                          PredictorId predictor, Criterion criterion, const EngineConfig& cfg);

}  // namespace leapverify
