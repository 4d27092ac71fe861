// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace leapverify {

std::string_view to_string(FastForwardPolicy p) {
    return p == FastForwardPolicy::carry ? "carry" : "decay";
}

FastForwardPolicy parse_ff_policy(std::string_view name) {
    if (name == "carry") return FastForwardPolicy::carry;
    if (name == "decay") return FastForwardPolicy::decay;
    throw std::invalid_argument("unknown fast-forward policy '" + std::string(name) + "'");
}

namespace {

Prediction momentum_prediction(const ParamVector& theta, const Moments& mom, std::uint64_t adam_step,
                               std::uint64_t horizon, const EngineConfig& cfg) {
    if (cfg.momentum_variant == MomentumVariant::paper) {
        return predict_momentum(theta, mom.m, mom.v, horizon, cfg.hyper.eps);
    }
    return predict_momentum_descent(theta, mom.m, mom.v, horizon, cfg.hyper.eps,
                                    lr_at(cfg.hyper, adam_step), cfg.hyper.beta1,
                                    cfg.hyper.beta2, adam_step);
}

Prediction finite_difference(PredictorId id, std::span<const ParamVector* const> newest_first,
                             std::uint64_t spacing, std::uint64_t horizon) {
    switch (id) {
        case PredictorId::linear:
            return predict_linear(*newest_first[0], *newest_first[1], spacing, horizon);
        case PredictorId::quadratic:
            return predict_quadratic(*newest_first[0], *newest_first[1], *newest_first[2], spacing,
                                     horizon);
        case PredictorId::quadratic_exact:
            return predict_quadratic_exact(*newest_first[0], *newest_first[1], *newest_first[2],
                                           spacing, horizon);
        case PredictorId::momentum: break;
    }
    throw std::logic_error("finite_difference: momentum is not a finite-difference predictor");
}

}  // namespace

std::optional<Prediction> predict_from_window(const HistoryWindow& window, PredictorId predictor,
                                              std::uint64_t horizon, const EngineConfig& cfg) {
    if (window.size() < required_history(predictor)) {
        return std::nullopt;
    }
    const Checkpoint& now = window.back(0);
    if (predictor == PredictorId::momentum) {
        return momentum_prediction(now.params, now.moments, now.step, horizon, cfg);
    }
    std::vector<const ParamVector*> hist;
    for (std::size_t age = 0; age < window.size(); ++age) {
        hist.push_back(&window.back(age).params);
    }
    return finite_difference(predictor, hist, window.delta(), horizon);
}

Speculation speculate(const Task& task, const HistoryWindow& window, PredictorId predictor,
                      std::uint64_t horizon, const EngineConfig& cfg,
                      std::optional<RegimeLabel> regime) {
    Speculation s;
    if (window.empty()) {
        s.ineligible_reason = "empty history window";
        return s;
    }
    if (cfg.regime_gating) {
        const RegimeLabel r = regime.value_or(window.back().regime);
        if (r == RegimeLabel::chaotic || r == RegimeLabel::unknown) {
            s.ineligible_reason = "regime " + std::string(to_string(r));
            return s;
        }
    }
    auto pred = predict_from_window(window, predictor, horizon, cfg);
    if (!pred) {
        s.ineligible_reason = "insufficient history (" + std::to_string(window.size()) + " of " +
                              std::to_string(required_history(predictor)) + " checkpoints)";
        return s;
    }
    s.eligible = true;
    s.prediction = std::move(*pred);
    s.predicted_loss = task.validation_loss(s.prediction.params);
    return s;
}

// --- TrainingRun ------------------------------------------------------------

TrainingRun::TrainingRun(const Task& task, std::uint64_t seed, EngineConfig cfg,
                         std::optional<Thresholds> thresholds,
                         std::optional<std::filesystem::path> persist_dir)
    : task_(task),
      seed_(seed),
      cfg_(std::move(cfg)),
      thresholds_(thresholds),
      params_(task.initial_params(seed)),
      adam_(AdamState::fresh(task.param_dim())),
      store_(cfg_.delta, std::move(persist_dir)) {
    cfg_.hyper.validate();
    if (thresholds_) thresholds_->validate();
}

void TrainingRun::train_step() {
    const Batch batch = task_.batch(seed_, step_);
    TaskGradient lg = task_.loss_and_grad(params_, batch);
    if (!std::isfinite(lg.loss)) {
        throw NonFiniteError("training diverged at step " + std::to_string(step_) +
                             " (seed " + std::to_string(seed_) + ")");
    }
    AdamUpdate up = apply_update(cfg_.hyper, adam_, params_, lg.grad);
    adam_ = std::move(up.state);
    params_ = std::move(up.params);
    train_losses_.push_back(lg.loss);
    ++step_;
}

const Checkpoint& TrainingRun::record_checkpoint() {
    Checkpoint c = make_checkpoint(task_, step_, params_, adam_, seed_);
    const auto& prior = store_.checkpoints();
    if (thresholds_ && !prior.empty()) {
        const Checkpoint& prev = prior.back();
        // After a leap the predecessor is further than delta away; the
        // similarity is still taken against it.
        const double s = (c.step - prev.step == cfg_.delta)
                             ? similarity_at(c, prev, cfg_.delta)
                             : cosine_similarity(c.fingerprint, prev.fingerprint);
        c.regime = classify(s, *thresholds_);
    }
    return store_.record(std::move(c));
}

LeapEvent TrainingRun::leap_or_continue(const LeapPlan& plan) {
    LeapEvent ev;
    ev.step_from = step_;
    ev.horizon = plan.horizon;
    ev.predictor = plan.predictor;
    ev.criterion_used = cfg_.criterion;
    const HistoryWindow& window = store_.window();
    if (window.empty() || window.back().step != step_) {
        ev.ineligible_reason = "not at a checkpoint";
        events_.push_back(ev);
        return ev;
    }
    ev.regime_at_leap = window.back().regime;
    if (step_ + plan.horizon > cfg_.hyper.total_steps) {
        ev.ineligible_reason = "leap would pass the end of the schedule";
        events_.push_back(ev);
        return ev;
    }
    Speculation spec = speculate(task_, window, plan.predictor, plan.horizon, cfg_);
    if (!spec.eligible) {
        ev.ineligible_reason = spec.ineligible_reason;
        events_.push_back(ev);
        return ev;
    }
    ev.eligible = true;
    ev.displacement_norm = spec.prediction.displacement_norm;
    ev.decision = decide(spec.predicted_loss, window.back().val_loss,
                         try_recent_loss_std(store_.loss_log(), cfg_.adaptive_window),
                         cfg_.epsilon);
    const bool pass = ev.decision.passes(cfg_.criterion).value_or(false);
    if (pass && !plan.force_reject && spec.prediction.finite) {
        params_ = std::move(spec.prediction.params);
        step_ += plan.horizon;
        adam_.step += plan.horizon;
        if (cfg_.ff_policy == FastForwardPolicy::decay) {
            const double k = static_cast<double>(plan.horizon);
            const double f1 = std::pow(cfg_.hyper.beta1, k);
            const double f2 = std::pow(cfg_.hyper.beta2, k);
            std::vector<double> m(adam_.m.values()), v(adam_.v.values());
            for (auto& x : m) x *= f1;
            for (auto& x : v) x *= f2;
            adam_.m = ParamVector(std::move(m));
            adam_.v = ParamVector(std::move(v));
        }
        skipped_ += plan.horizon;
        store_.reset_window();
        ev.applied = true;
    }
    events_.push_back(ev);
    return ev;
}

void TrainingRun::run(const std::optional<LeapPlan>& plan,
                      const std::function<void(const LeapEvent&)>& on_event) {
    const std::uint64_t total = cfg_.hyper.total_steps;
    while (step_ < total) {
        train_step();
        if (step_ % cfg_.delta == 0) {
            record_checkpoint();
            if (plan && step_ < total) {
                LeapEvent ev = leap_or_continue(*plan);
                if (on_event) on_event(ev);
            }
        }
    }
}

// --- cascades ---------------------------------------------------------------

CascadeResult run_cascade(const Task& task, const HistoryWindow& window,
                          std::span<const double> losses, const CascadeConfig& cascade,
                          PredictorId predictor, Criterion criterion, const EngineConfig& cfg) {
    CascadeResult res;
    res.config = cascade;
    res.predictor = predictor;
    res.criterion = criterion;
    if (cascade.depth == 0 || cascade.horizon == 0) {
        throw std::invalid_argument("run_cascade: depth and horizon must be >= 1");
    }
    if (window.empty()) {
        res.ineligible_reason = "empty history window";
        return res;
    }
    const Checkpoint& start = window.back();
    res.start_step = start.step;
    if (start.regime != RegimeLabel::stable) {
        res.ineligible_reason = "start checkpoint is " + std::string(to_string(start.regime)) +
                                ", not stable";
        return res;
    }
    if (window.size() < required_history(predictor)) {
        res.ineligible_reason = "insufficient history";
        return res;
    }
    res.eligible = true;

    const auto sigma = try_recent_loss_std(losses, cfg.adaptive_window);
    // States spaced `horizon` apart, oldest first.
    std::vector<ParamVector> chain;
    if (cascade.horizon == window.delta()) {
        for (std::size_t age = window.size(); age-- > 0;) chain.push_back(window.back(age).params);
    } else {
        chain.push_back(start.params);
    }

    double reference = start.val_loss;
    for (std::uint64_t j = 1; j <= cascade.depth; ++j) {
        Prediction pred;
        PredictorId used = predictor;
        if (j == 1) {
            pred = *predict_from_window(window, predictor, cascade.horizon, cfg);
        } else if (predictor == PredictorId::momentum) {
            pred = momentum_prediction(chain.back(), start.moments, start.step, cascade.horizon, cfg);
        } else {
            const std::size_t want = required_history(predictor);
            const std::size_t have = std::min(want, chain.size());
            if (have < 2) {
                throw std::logic_error("run_cascade: chain shorter than two states");
            }
            if (have < want) used = PredictorId::linear;
            std::vector<const ParamVector*> hist;
            for (std::size_t age = 0; age < have; ++age) hist.push_back(&chain[chain.size() - 1 - age]);
            pred = finite_difference(used, hist, cascade.horizon, cascade.horizon);
        }

        CascadeStage st;
        st.stage = j;
        st.predictor_used = used;
        st.displacement_norm = pred.displacement_norm;
        st.predicted_loss = task.validation_loss(pred.params);
        st.reference_loss = reference;
        st.decision = decide(st.predicted_loss, reference, sigma, cfg.epsilon);
        st.accepted = pred.finite && st.decision.passes(criterion).value_or(false);
        res.stages.push_back(st);
        if (!st.accepted) break;
        res.accepted_depth = j;
        reference = st.predicted_loss;
        chain.push_back(std::move(pred.params));
    }
    return res;
}

}  // namespace leapverify
