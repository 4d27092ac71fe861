// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoints, the rolling three-deep history window, the validation-loss
// log, and the binary checkpoint format.

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "leapverify/core.hpp"
#include "leapverify/optim.hpp"
#include "leapverify/regime.hpp"
#include "leapverify/tasks.hpp"

namespace leapverify {

struct Checkpoint {
    std::uint64_t step = 0;
    ParamVector params;
    Moments moments;
    double val_loss = 0.0;
    std::vector<double> fingerprint;
    RegimeLabel regime = RegimeLabel::unknown;
    std::uint64_t seed = 0;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Evaluates validation loss and fingerprint at `params`. Throws
/// NonFiniteError if the parameters or the resulting loss are not finite.
Checkpoint make_checkpoint(const Task& task, std::uint64_t step, const ParamVector& params,
                           const AdamState& adam, std::uint64_t seed);

class InsufficientHistoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Up to three most recent checkpoints, exactly `delta` steps apart.
/// Index 0 is the newest.
class HistoryWindow {
public:
    static constexpr std::size_t kCapacity = 3;

    explicit HistoryWindow(std::uint64_t delta);

    /// Appends, dropping the oldest entry beyond capacity. Throws
    /// std::invalid_argument if the spacing to the newest entry is not delta.
    void push(Checkpoint ckpt);
    void clear() noexcept { entries_.clear(); }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::uint64_t delta() const noexcept { return delta_; }

    /// back(0) is the newest checkpoint, back(1) the one before, ...
    const Checkpoint& back(std::size_t age = 0) const;

    std::vector<std::uint64_t> steps() const;

private:
    std::uint64_t delta_;
    std::deque<Checkpoint> entries_;
};

/// Sample standard deviation of the last `window` losses (all of them if the
/// log is shorter). Throws InsufficientHistoryError with fewer than two.
double recent_loss_std(std::span<const double> losses, std::size_t window);

/// Same, but returns nullopt instead of throwing.
std::optional<double> try_recent_loss_std(std::span<const double> losses, std::size_t window);

/// Bad magic bytes or unsupported version.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Truncated file or inconsistent payload lengths.
class CorruptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes atomically (temp file + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

/// runs/<task>/<seed>/ckpt_<step>.lpv, relative to `root`.
std::filesystem::path checkpoint_path(const std::filesystem::path& root, std::string_view task,
                                      std::uint64_t seed, std::uint64_t step);
std::filesystem::path run_directory(const std::filesystem::path& root, std::string_view task,
                                    std::uint64_t seed);

/// All ckpt_*.lpv files in a run directory, ordered by step.
std::vector<Checkpoint> load_run(const std::filesystem::path& run_dir);

/// Checkpoint store for one training run: full history, rolling window and
/// validation-loss log. Optionally persists every recorded checkpoint.
class TrajectoryStore {
public:
    explicit TrajectoryStore(std::uint64_t delta,
                             std::optional<std::filesystem::path> persist_dir = std::nullopt);

    /// Appends a checkpoint. Throws std::invalid_argument if its step is not a
    /// multiple of delta.
    const Checkpoint& record(Checkpoint ckpt);

    /// Drops the finite-difference window (after a leap). The full history
    /// and the loss log are kept.
    void reset_window() noexcept { window_.clear(); }

    std::uint64_t delta() const noexcept { return delta_; }
    const HistoryWindow& window() const noexcept { return window_; }
    const std::vector<Checkpoint>& checkpoints() const noexcept { return all_; }
    const std::vector<double>& loss_log() const noexcept { return losses_; }

private:
    std::uint64_t delta_;
    std::optional<std::filesystem::path> persist_dir_;
    HistoryWindow window_;
    std::vector<Checkpoint> all_;
    std::vector<double> losses_;
};

/// Write-temp-then-rename for text artifacts.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace leapverify
