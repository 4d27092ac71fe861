// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/trajectory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace leapverify {

Checkpoint make_checkpoint(const Task& task, std::uint64_t step, const ParamVector& params,
                           const AdamState& adam, std::uint64_t seed) {
    if (!params.is_finite()) {
        throw NonFiniteError("checkpoint at step " + std::to_string(step) +
                             ": non-finite parameters");
    }
    Checkpoint c;
    c.step = step;
    c.params = params;
    c.moments = snapshot_moments(adam);
    c.val_loss = task.validation_loss(params);
    if (!std::isfinite(c.val_loss)) {
        throw NonFiniteError("checkpoint at step " + std::to_string(step) +
                             ": non-finite validation loss");
    }
    c.fingerprint = task.fingerprint(params);
    c.seed = seed;
    return c;
}

// --- HistoryWindow ----------------------------------------------------------

HistoryWindow::HistoryWindow(std::uint64_t delta) : delta_(delta) {
    if (delta == 0) {
        throw std::invalid_argument("HistoryWindow: delta must be > 0");
    }
}

void HistoryWindow::push(Checkpoint ckpt) {
    if (!entries_.empty() && ckpt.step != entries_.back().step + delta_) {
        throw std::invalid_argument("HistoryWindow: checkpoint at step " +
                                    std::to_string(ckpt.step) + " is not " +
                                    std::to_string(delta_) + " steps after " +
                                    std::to_string(entries_.back().step));
    }
    entries_.push_back(std::move(ckpt));
    if (entries_.size() > kCapacity) {
        entries_.pop_front();
    }
}

const Checkpoint& HistoryWindow::back(std::size_t age) const {
    if (age >= entries_.size()) {
        throw InsufficientHistoryError("HistoryWindow: requested age " + std::to_string(age) +
                                       " with " + std::to_string(entries_.size()) + " entries");
    }
    return entries_[entries_.size() - 1 - age];
}

std::vector<std::uint64_t> HistoryWindow::steps() const {
    std::vector<std::uint64_t> out;
    for (const auto& c : entries_) out.push_back(c.step);
    return out;
}

// --- loss statistics --------------------------------------------------------

std::optional<double> try_recent_loss_std(std::span<const double> losses, std::size_t window) {
    const std::size_t n = std::min(window, losses.size());
    if (n < 2) {
        return std::nullopt;
    }
    return sample_stddev(losses.subspan(losses.size() - n));
}

double recent_loss_std(std::span<const double> losses, std::size_t window) {
    auto s = try_recent_loss_std(losses, window);
    if (!s) {
        throw InsufficientHistoryError("recent_loss_std: need at least 2 losses");
    }
    return *s;
}

// --- binary format ----------------------------------------------------------
//
// "LPVF" | u32 version | u64 step | u64 param_count | f64 theta[n] | f64 m[n]
// | f64 v[n] | f64 val_loss | u64 fp_len | f64 fp[fp_len] | u8 regime | u64 seed
//
// All integers and doubles little-endian.

namespace {

constexpr std::array<char, 4> kMagic{'L', 'P', 'V', 'F'};

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(std::span<const double> vs) {
        for (double v : vs) f64(v);
    }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::vector<double> f64s(std::uint64_t n) {
        if (n > remaining() / 8) {
            throw CorruptionError("checkpoint: payload shorter than declared length " +
                                  std::to_string(n));
        }
        std::vector<double> out(n);
        for (auto& v : out) v = f64();
        return out;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw CorruptionError("checkpoint: truncated file");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
    const std::size_t n = c.params.size();
    if (c.moments.m.size() != n || c.moments.v.size() != n) {
        throw DimensionError("encode_checkpoint: moment length differs from parameter length");
    }
    Writer w;
    for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
    w.u32(kCheckpointVersion);
    w.u64(c.step);
    w.u64(n);
    w.f64s(c.params.view());
    w.f64s(c.moments.m.view());
    w.f64s(c.moments.v.view());
    w.f64(c.val_loss);
    w.u64(c.fingerprint.size());
    w.f64s(c.fingerprint);
    w.u8(static_cast<std::uint8_t>(c.regime));
    w.u64(c.seed);
    return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (bytes.size() < kMagic.size()) {
        throw FormatError("checkpoint: file too short for magic");
    }
    for (char ch : kMagic) {
        if (r.u8() != static_cast<std::uint8_t>(ch)) {
            throw FormatError("checkpoint: bad magic bytes");
        }
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint c;
    c.step = r.u64();
    const std::uint64_t n = r.u64();
    if (n == 0) {
        throw CorruptionError("checkpoint: zero parameter count");
    }
    c.params = ParamVector(r.f64s(n));
    c.moments.m = ParamVector(r.f64s(n));
    c.moments.v = ParamVector(r.f64s(n));
    c.val_loss = r.f64();
    c.fingerprint = r.f64s(r.u64());
    try {
        c.regime = regime_from_code(r.u8());
    } catch (const std::invalid_argument& e) {
        throw CorruptionError(std::string("checkpoint: ") + e.what());
    }
    c.seed = r.u64();
    if (r.remaining() != 0) {
        throw CorruptionError("checkpoint: " + std::to_string(r.remaining()) +
                              " trailing bytes after payload");
    }
    return c;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(ckpt);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

std::filesystem::path run_directory(const std::filesystem::path& root, std::string_view task,
                                    std::uint64_t seed) {
    return root / "runs" / std::string(task) / std::to_string(seed);
}

std::filesystem::path checkpoint_path(const std::filesystem::path& root, std::string_view task,
                                      std::uint64_t seed, std::uint64_t step) {
    return run_directory(root, task, seed) / ("ckpt_" + std::to_string(step) + ".lpv");
}

std::vector<Checkpoint> load_run(const std::filesystem::path& run_dir) {
    if (!std::filesystem::is_directory(run_dir)) {
        throw std::runtime_error("run directory not found: " + run_dir.string());
    }
    std::vector<Checkpoint> out;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("ckpt_") && name.ends_with(".lpv")) {
            out.push_back(load_checkpoint(entry.path()));
        }
    }
    std::sort(out.begin(), out.end(), [](const Checkpoint& a, const Checkpoint& b) { return a.step < b.step; });
    return out;
}

// --- TrajectoryStore --------------------------------------------------------

TrajectoryStore::TrajectoryStore(std::uint64_t delta, std::optional<std::filesystem::path> persist_dir)
    : delta_(delta), persist_dir_(std::move(persist_dir)), window_(delta) {}

const Checkpoint& TrajectoryStore::record(Checkpoint ckpt) {
    if (ckpt.step % delta_ != 0) {
        throw std::invalid_argument("record: step " + std::to_string(ckpt.step) +
                                    " is not a multiple of delta " + std::to_string(delta_));
    }
    if (persist_dir_) {
        save_checkpoint(ckpt, *persist_dir_ / ("ckpt_" + std::to_string(ckpt.step) + ".lpv"));
    }
    losses_.push_back(ckpt.val_loss);
    window_.push(ckpt);
    all_.push_back(std::move(ckpt));
    return all_.back();
}

}  // namespace leapverify
