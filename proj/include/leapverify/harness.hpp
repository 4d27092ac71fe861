// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-seed experiment protocol: train with checkpoints, sweep every
// (checkpoint, predictor, K) offline, run cascades from stable checkpoints,
// then aggregate per-seed statistics across seeds.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leapverify/config.hpp"
#include "leapverify/engine.hpp"
#include "leapverify/regime.hpp"
#include "leapverify/trajectory.hpp"

namespace leapverify {

/// Output of one training pass.
struct RunRecord {
    std::string task;
    std::uint64_t seed = 0;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> train_losses;
};

/// Trains one seed for cfg.hyper.total_steps, checkpointing every delta
/// steps. Labels regimes when thresholds are given (otherwise all unknown;
/// see apply_thresholds).
RunRecord pass1_train(const Task& task, std::uint64_t seed, const EngineConfig& cfg,
                      const std::optional<Thresholds>& thresholds = std::nullopt);

/// Relabels every checkpoint from its fingerprint trace.
void apply_thresholds(RunRecord& run, const Thresholds& th);

/// Writes ckpt_<step>.lpv files and train_losses.csv / val_losses.csv into
/// the run directory under root.
void write_run(const RunRecord& run, const std::filesystem::path& root);
RunRecord read_run(const std::filesystem::path& root, std::string_view task, std::uint64_t seed);

struct SweepCell {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    RegimeLabel regime = RegimeLabel::unknown;
    PredictorId predictor = PredictorId::linear;
    std::uint64_t horizon = 0;
    bool eligible = false;
    double predicted_loss = 0.0;
    double current_loss = 0.0;
    Decision decision;
    double displacement_norm = 0.0;
};

/// Offline K-sweep over every transition/stable checkpoint. Ineligible
/// (predictor, K) combinations are emitted with eligible == false. Throws
/// std::runtime_error when the checkpoint sequence has gaps.
std::vector<SweepCell> pass2_ksweep(const Task& task, const RunRecord& run,
                                    std::span<const std::uint64_t> k_set,
                                    std::span<const PredictorId> predictors,
                                    const EngineConfig& cfg);

struct CascadeRow {
    std::uint64_t seed = 0;
    CascadeResult result;
};

/// Cascades from every stable checkpoint for each config and predictor.
std::vector<CascadeRow> pass3_cascades(const Task& task, const RunRecord& run,
                                       std::span<const CascadeConfig> configs,
                                       std::span<const PredictorId> predictors,
                                       Criterion criterion, const EngineConfig& cfg);

// --- aggregation ------------------------------------------------------------

struct SeedRate {
    std::uint64_t seed = 0;
    std::size_t accepted = 0;
    std::size_t denominator = 0;
    /// 100 * accepted / denominator; nullopt when denominator == 0.
    std::optional<double> rate;
};

/// mean / sample std / CoV of per-seed values.
struct SeedStats {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;
    /// 100 * std / mean; nullopt when mean == 0 or n == 0.
    std::optional<double> cov;
    bool single_seed = false;
};

SeedStats seed_stats(std::span<const double> per_seed);

/// Regime filter for acceptance tables: "transition", "stable" or
/// "non-chaotic" (both).
struct RateEntry {
    std::string regime;
    PredictorId predictor = PredictorId::linear;
    std::uint64_t horizon = 0;
    Criterion criterion = Criterion::strict;
    std::vector<SeedRate> per_seed;
    SeedStats stats;
    std::size_t accepted = 0;
    std::size_t denominator = 0;
    std::size_t ineligible = 0;
    std::size_t not_evaluable = 0;
};

struct LossRatioRow {
    std::uint64_t horizon = 0;
    double mean_predicted = 0.0;
    double mean_actual = 0.0;
    /// mean_predicted / mean_actual
    double ratio = 0.0;
    std::size_t n = 0;
    std::size_t nonfinite_excluded = 0;
};

/// Mean predicted loss over mean current loss per K for one predictor,
/// over eligible cells; non-finite predictions are excluded and counted.
std::vector<LossRatioRow> loss_ratio_table(std::span<const SweepCell> cells, PredictorId predictor);
std::vector<LossRatioRow> momentum_ratio_table(std::span<const SweepCell> cells);

struct SeedRegimeSummary {
    std::uint64_t seed = 0;
    RegimeCounts counts;
    std::optional<std::uint64_t> chaotic_exit_step;
    std::size_t checkpoints = 0;
};

struct CascadeSummary {
    CascadeConfig config;
    PredictorId predictor = PredictorId::linear;
    std::size_t starts = 0;
    double mean_accepted_depth = 0.0;
    /// histogram[d] = number of starts with accepted depth d.
    std::vector<std::size_t> depth_histogram;
};

struct ExperimentReport {
    std::string task;
    std::vector<std::uint64_t> seeds;
    bool single_seed = false;
    std::optional<Thresholds> thresholds;
    std::vector<SeedRegimeSummary> regimes;
    std::map<std::string, SeedStats> regime_stats;
    std::vector<RateEntry> rates;
    std::map<std::string, std::vector<LossRatioRow>> loss_ratios;
    std::vector<CascadeSummary> cascades;
    std::size_t cascade_starts = 0;
    std::size_t total_cells = 0;
    std::size_t eligible_cells = 0;

    const RateEntry* find_rate(std::string_view regime, PredictorId p, std::uint64_t k,
                               Criterion c) const;
};

/// Per-seed rates first, then mean/std/CoV across seeds. Output does not
/// depend on the order of cells, regimes or cascades.
ExperimentReport aggregate(std::span<const SweepCell> cells,
                           std::span<const SeedRegimeSummary> regimes,
                           std::span<const CascadeRow> cascades, std::string task = {},
                           std::optional<Thresholds> thresholds = std::nullopt);

SeedRegimeSummary summarize_regimes(const RunRecord& run);

// --- serialisation ----------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "seed,step,regime,predictor,K,L_hat,L_t,strict,adaptive,proximity,displacement_norm,eligible";

std::string sweep_to_csv(std::span<const SweepCell> cells);
/// Inverse of sweep_to_csv (epsilon is not stored and is set from the
/// argument). Throws std::runtime_error on malformed input.
std::vector<SweepCell> sweep_from_csv(std::string_view text, double epsilon = 0.05);

std::string cascades_to_csv(std::span<const CascadeRow> rows);

nlohmann::json to_json(const Decision& d);
nlohmann::json to_json(const LeapEvent& ev);
nlohmann::json to_json(const ExperimentReport& r);

/// Plain-text tables: regime breakdown, strict and proximity acceptance,
/// loss ratios, CoV, cascades.
std::string format_report(const ExperimentReport& r);

// --- full protocol ----------------------------------------------------------

struct ExperimentResult {
    std::optional<Thresholds> thresholds;
    std::vector<RunRecord> runs;
    std::vector<SweepCell> cells;
    std::vector<CascadeRow> cascades;
    ExperimentReport report;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Calibrates thresholds from the pass-1 traces of the calibration seeds
/// (training extra seeds only if they differ from the experiment seeds).
Thresholds calibrate_from_runs(std::span<const RunRecord> runs, const CalibrationQuantiles& q);

/// Trains calibration seeds and returns thresholds.
Thresholds run_calibration(const RunConfig& cfg, const ProgressFn& progress = {});

/// Passes 1-3 for every seed plus aggregation. Seeds run on up to cfg.jobs
/// threads; results are identical for any job count. When `root` is given
/// run directories, sweep CSVs and reports are written under it.
ExperimentResult run_experiment(const RunConfig& cfg,
                                const std::optional<std::filesystem::path>& root = std::nullopt,
                                const ProgressFn& progress = {});

/// Writes report.json, report.txt, effective_config.txt into root.
void write_report(const ExperimentReport& report, const RunConfig& cfg,
                  const std::filesystem::path& root);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// exception.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace leapverify
