// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/regime.hpp"

#include <string>

#include "leapverify/core.hpp"
#include "leapverify/trajectory.hpp"

namespace leapverify {

std::string_view to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::unknown: return "unknown";
        case RegimeLabel::chaotic: return "chaotic";
        case RegimeLabel::transition: return "transition";
        case RegimeLabel::stable: return "stable";
    }
    return "unknown";
}

RegimeLabel parse_regime(std::string_view name) {
    if (name == "unknown") return RegimeLabel::unknown;
    if (name == "chaotic") return RegimeLabel::chaotic;
    if (name == "transition") return RegimeLabel::transition;
    if (name == "stable") return RegimeLabel::stable;
    throw std::invalid_argument("unknown regime '" + std::string(name) + "'");
}

RegimeLabel regime_from_code(std::uint8_t code) {
    if (code > static_cast<std::uint8_t>(RegimeLabel::stable)) {
        throw std::invalid_argument("invalid regime code " + std::to_string(code));
    }
    return static_cast<RegimeLabel>(code);
}

void Thresholds::validate() const {
    if (!(tau_low >= -1.0 && tau_high <= 1.0 && tau_low < tau_high)) {
        throw std::invalid_argument("thresholds must satisfy -1 <= tau_low < tau_high <= 1 (got " +
                                    std::to_string(tau_low) + ", " + std::to_string(tau_high) + ")");
    }
}

double similarity_at(const Checkpoint& curr, const Checkpoint& prev, std::uint64_t delta) {
    if (curr.step < prev.step || curr.step - prev.step != delta) {
        throw std::invalid_argument("similarity_at: checkpoints " + std::to_string(prev.step) +
                                    " and " + std::to_string(curr.step) + " are not " +
                                    std::to_string(delta) + " steps apart");
    }
    return cosine_similarity(curr.fingerprint, prev.fingerprint);
}

RegimeLabel classify(double s, const Thresholds& th) {
    if (s > th.tau_high) return RegimeLabel::stable;
    if (s < th.tau_low) return RegimeLabel::chaotic;
    return RegimeLabel::transition;
}

Thresholds calibrate(std::span<const std::vector<double>> traces, const CalibrationQuantiles& q) {
    if (traces.empty()) {
        throw CalibrationError("calibrate: no similarity traces");
    }
    if (!(q.low >= 0.0 && q.high <= 1.0 && q.low < q.high)) {
        throw CalibrationError("calibrate: quantiles must satisfy 0 <= low < high <= 1");
    }
    double low_sum = 0.0;
    double high_sum = 0.0;
    for (const auto& trace : traces) {
        if (trace.size() < 2) {
            throw CalibrationError("calibrate: each trace needs at least 2 similarities");
        }
        low_sum += quantile(trace, q.low);
        high_sum += quantile(trace, q.high);
    }
    const auto n = static_cast<double>(traces.size());
    Thresholds th{low_sum / n, high_sum / n};
    if (!(th.tau_low < th.tau_high)) {
        throw CalibrationError("calibrate: degenerate thresholds (tau_low " +
                               std::to_string(th.tau_low) + " >= tau_high " +
                               std::to_string(th.tau_high) + "); widen the quantiles or the traces");
    }
    return th;
}

std::vector<double> similarity_trace(std::span<const Checkpoint> run) {
    std::vector<double> out;
    for (std::size_t i = 1; i < run.size(); ++i) {
        out.push_back(cosine_similarity(run[i].fingerprint, run[i - 1].fingerprint));
    }
    return out;
}

std::vector<RegimeLabel> label_run(std::span<const Checkpoint> run, const Thresholds& th) {
    std::vector<RegimeLabel> labels;
    if (run.empty()) return labels;
    labels.push_back(RegimeLabel::unknown);
    for (double s : similarity_trace(run)) {
        labels.push_back(classify(s, th));
    }
    return labels;
}

std::size_t RegimeCounts::of(RegimeLabel label) const {
    switch (label) {
        case RegimeLabel::unknown: return unknown;
        case RegimeLabel::chaotic: return chaotic;
        case RegimeLabel::transition: return transition;
        case RegimeLabel::stable: return stable;
    }
    return 0;
}

RegimeCounts regime_breakdown(std::span<const Checkpoint> run) {
    RegimeCounts c;
    for (const auto& ck : run) {
        switch (ck.regime) {
            case RegimeLabel::unknown: ++c.unknown; break;
            case RegimeLabel::chaotic: ++c.chaotic; break;
            case RegimeLabel::transition: ++c.transition; break;
            case RegimeLabel::stable: ++c.stable; break;
        }
    }
    return c;
}

std::optional<std::uint64_t> chaotic_exit_step(std::span<const Checkpoint> run) {
    for (std::size_t i = 1; i < run.size(); ++i) {
        const RegimeLabel r = run[i].regime;
        if (run[i - 1].regime == RegimeLabel::chaotic &&
            (r == RegimeLabel::transition || r == RegimeLabel::stable)) {
            return run[i].step;
        }
    }
    return std::nullopt;
}

}  // namespace leapverify
