// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace leapverify {

std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::string> builtin_task_names() { return {"quad-bowl", "mlp-reg", "char-seq"}; }

namespace {

constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamBatch = 2;
constexpr std::uint64_t kStreamNoise = 3;

void require_finite(const ParamVector& p, const char* what) {
    if (!p.is_finite()) {
        throw NonFiniteError(std::string(what) + ": non-finite parameters");
    }
}

void require_dim(const ParamVector& p, std::size_t dim, const char* what) {
    if (p.size() != dim) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(dim) +
                             " parameters, got " + std::to_string(p.size()));
    }
}

std::vector<std::uint32_t> sample_rows(std::uint64_t seed, std::uint64_t step,
                                       std::size_t batch_size, std::size_t pool) {
    std::mt19937_64 rng(derive_seed(derive_seed(seed, kStreamBatch), step));
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(pool - 1));
    std::vector<std::uint32_t> rows(batch_size);
    for (auto& r : rows) {
        r = pick(rng);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// quad-bowl: 0.5 * sum_i c_i (x_i - x*_i)^2 + <noise, x>. The noise term is
// drawn per batch, so the stochastic gradient is the exact gradient of the
// batch loss. Validation is the noiseless bowl.

class QuadBowl final : public Task {
public:
    explicit QuadBowl(const TaskParams& p) : p_(p) {
        if (p.bowl_dim == 0) {
            throw std::invalid_argument("quad-bowl: bowl_dim must be > 0");
        }
        if (!(p.bowl_curv_min > 0.0) || p.bowl_curv_max < p.bowl_curv_min) {
            throw std::invalid_argument("quad-bowl: need 0 < curv_min <= curv_max");
        }
        const std::size_t n = p.bowl_dim;
        curv_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            curv_[i] = p.bowl_curv_min * std::pow(p.bowl_curv_max / p.bowl_curv_min, f);
        }
        std::mt19937_64 rng(p.data_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        target_.resize(n);
        for (auto& t : target_) {
            t = normal(rng);
        }
    }

    /// Explicit curvature and minimum; used by tests with hand-picked bowls.
    QuadBowl(std::vector<double> curvature, std::vector<double> target, double noise)
        : curv_(std::move(curvature)), target_(std::move(target)) {
        p_.bowl_dim = curv_.size();
        p_.bowl_noise = noise;
    }

    std::string_view name() const override { return "quad-bowl"; }
    std::size_t param_dim() const override { return curv_.size(); }
    std::size_t fingerprint_dim() const override { return curv_.size(); }

    ParamVector initial_params(std::uint64_t seed) const override {
        std::mt19937_64 rng(derive_seed(seed, kStreamInit));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> x(target_);
        for (auto& v : x) {
            v += p_.bowl_init_scale * normal(rng);
        }
        return ParamVector(std::move(x));
    }

    Batch batch(std::uint64_t seed, std::uint64_t step) const override {
        Batch b;
        b.step = step;
        b.key = derive_seed(derive_seed(seed, kStreamNoise), step);
        return b;
    }

    TaskGradient loss_and_grad(const ParamVector& x, const Batch& b) const override {
        require_dim(x, param_dim(), "quad-bowl");
        require_finite(x, "quad-bowl loss_and_grad");
        const auto noise = noise_for(b);
        std::vector<double> g(x.size());
        double loss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - target_[i];
            loss += 0.5 * curv_[i] * d * d + noise[i] * x[i];
            g[i] = curv_[i] * d + noise[i];
        }
        return {loss, ParamVector(std::move(g))};
    }

    double batch_loss(const ParamVector& x, const Batch& b) const override {
        return loss_and_grad(x, b).loss;
    }

    double validation_loss(const ParamVector& x) const override {
        require_dim(x, param_dim(), "quad-bowl");
        double loss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - target_[i];
            loss += 0.5 * curv_[i] * d * d;
        }
        return loss;
    }

    std::vector<double> fingerprint(const ParamVector& x) const override {
        require_dim(x, param_dim(), "quad-bowl");
        require_finite(x, "quad-bowl fingerprint");
        return x.values();
    }

private:
    std::vector<double> noise_for(const Batch& b) const {
        std::vector<double> noise(curv_.size(), 0.0);
        if (p_.bowl_noise > 0.0) {
            std::mt19937_64 rng(b.key);
            std::normal_distribution<double> normal(0.0, p_.bowl_noise);
            for (auto& v : noise) {
                v = normal(rng);
            }
        }
        return noise;
    }

    TaskParams p_;
    std::vector<double> curv_;
    std::vector<double> target_;
};

// ---------------------------------------------------------------------------
// mlp-reg: one tanh hidden layer, linear output, 0.5*||y - t||^2 averaged over
// the batch. Targets come from a fixed random teacher network plus noise.
//
// Parameter layout: W1[H x D], b1[H], W2[O x H], b2[O].

class MlpRegression final : public Task {
public:
    explicit MlpRegression(const TaskParams& p)
        : p_(p), in_(p.mlp_input), hid_(p.mlp_hidden), out_(p.mlp_output) {
        if (in_ == 0 || hid_ == 0 || out_ == 0 || p.mlp_train_size == 0 ||
            p.mlp_val_size == 0 || p.batch_size == 0 || p.probe_count == 0) {
            throw std::invalid_argument("mlp-reg: sizes must be > 0");
        }
        std::mt19937_64 rng(p.data_seed);
        std::normal_distribution<double> normal(0.0, 1.0);

        constexpr std::size_t teacher_hidden = 32;
        std::vector<double> tw1(teacher_hidden * in_), tb1(teacher_hidden), tw2(out_ * teacher_hidden);
        for (auto& w : tw1) w = normal(rng) * 1.5 / std::sqrt(static_cast<double>(in_));
        for (auto& b : tb1) b = 0.5 * normal(rng);
        for (auto& w : tw2) w = normal(rng) / std::sqrt(static_cast<double>(teacher_hidden));

        auto make_inputs = [&](std::size_t n) {
            std::vector<double> xs(n * in_);
            for (auto& v : xs) v = normal(rng);
            return xs;
        };
        auto make_targets = [&](const std::vector<double>& xs, std::size_t n, double noise) {
            std::vector<double> ts(n * out_);
            std::vector<double> h(teacher_hidden);
            for (std::size_t s = 0; s < n; ++s) {
                const double* x = &xs[s * in_];
                for (std::size_t j = 0; j < teacher_hidden; ++j) {
                    double z = tb1[j];
                    for (std::size_t k = 0; k < in_; ++k) z += tw1[j * in_ + k] * x[k];
                    h[j] = std::tanh(z);
                }
                for (std::size_t o = 0; o < out_; ++o) {
                    double y = 0.0;
                    for (std::size_t j = 0; j < teacher_hidden; ++j) y += tw2[o * teacher_hidden + j] * h[j];
                    ts[s * out_ + o] = y + noise * normal(rng);
                }
            }
            return ts;
        };

        train_x_ = make_inputs(p.mlp_train_size);
        train_t_ = make_targets(train_x_, p.mlp_train_size, p.mlp_label_noise);
        val_x_ = make_inputs(p.mlp_val_size);
        val_t_ = make_targets(val_x_, p.mlp_val_size, p.mlp_label_noise);
        probe_x_ = make_inputs(p.probe_count);
    }

    std::string_view name() const override { return "mlp-reg"; }
    std::size_t param_dim() const override { return hid_ * in_ + hid_ + out_ * hid_ + out_; }
    std::size_t fingerprint_dim() const override { return p_.probe_count * out_; }

    ParamVector initial_params(std::uint64_t seed) const override {
        std::mt19937_64 rng(derive_seed(seed, kStreamInit));
        std::vector<double> w(param_dim());
        const double a1 = 1.0 / std::sqrt(static_cast<double>(in_));
        const double a2 = 1.0 / std::sqrt(static_cast<double>(hid_));
        std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
        std::size_t i = 0;
        for (std::size_t k = 0; k < hid_ * in_ + hid_; ++k) w[i++] = u1(rng);
        for (std::size_t k = 0; k < out_ * hid_ + out_; ++k) w[i++] = u2(rng);
        return ParamVector(std::move(w));
    }

    Batch batch(std::uint64_t seed, std::uint64_t step) const override {
        Batch b;
        b.step = step;
        b.key = derive_seed(seed, step);
        b.rows = sample_rows(seed, step, p_.batch_size, p_.mlp_train_size);
        return b;
    }

    TaskGradient loss_and_grad(const ParamVector& w, const Batch& b) const override {
        require_dim(w, param_dim(), "mlp-reg");
        require_finite(w, "mlp-reg loss_and_grad");
        std::vector<double> g(param_dim(), 0.0);
        const double loss = run(w, b.rows, train_x_, train_t_, &g);
        return {loss, ParamVector(std::move(g))};
    }

    double batch_loss(const ParamVector& w, const Batch& b) const override {
        require_dim(w, param_dim(), "mlp-reg");
        require_finite(w, "mlp-reg batch_loss");
        return run(w, b.rows, train_x_, train_t_, nullptr);
    }

    double validation_loss(const ParamVector& w) const override {
        require_dim(w, param_dim(), "mlp-reg");
        if (!w.is_finite()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        std::vector<std::uint32_t> rows(p_.mlp_val_size);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
        return run(w, rows, val_x_, val_t_, nullptr);
    }

    std::vector<double> fingerprint(const ParamVector& w) const override {
        require_dim(w, param_dim(), "mlp-reg");
        require_finite(w, "mlp-reg fingerprint");
        std::vector<double> fp(fingerprint_dim());
        std::vector<double> h(hid_);
        for (std::size_t s = 0; s < p_.probe_count; ++s) {
            forward(w, &probe_x_[s * in_], h.data(), &fp[s * out_]);
        }
        return fp;
    }

private:
    const double* w1(const ParamVector& w) const { return w.view().data(); }
    const double* b1(const ParamVector& w) const { return w1(w) + hid_ * in_; }
    const double* w2(const ParamVector& w) const { return b1(w) + hid_; }
    const double* b2(const ParamVector& w) const { return w2(w) + out_ * hid_; }

    void forward(const ParamVector& w, const double* x, double* h, double* y) const {
        const double* W1 = w1(w);
        const double* B1 = b1(w);
        const double* W2 = w2(w);
        const double* B2 = b2(w);
        for (std::size_t j = 0; j < hid_; ++j) {
            double z = B1[j];
            const double* row = W1 + j * in_;
            for (std::size_t k = 0; k < in_; ++k) z += row[k] * x[k];
            h[j] = std::tanh(z);
        }
        for (std::size_t o = 0; o < out_; ++o) {
            double z = B2[o];
            const double* row = W2 + o * hid_;
            for (std::size_t j = 0; j < hid_; ++j) z += row[j] * h[j];
            y[o] = z;
        }
    }

    // Mean 0.5*||y - t||^2 over rows; accumulates the gradient when grad != nullptr.
    double run(const ParamVector& w, const std::vector<std::uint32_t>& rows,
               const std::vector<double>& xs, const std::vector<double>& ts,
               std::vector<double>* grad) const {
        std::vector<double> h(hid_), y(out_), dy(out_), dz(hid_);
        const double inv_n = 1.0 / static_cast<double>(rows.size());
        double loss = 0.0;
        const double* W2 = w2(w);
        for (std::uint32_t r : rows) {
            const double* x = &xs[r * in_];
            const double* t = &ts[r * out_];
            forward(w, x, h.data(), y.data());
            for (std::size_t o = 0; o < out_; ++o) {
                const double d = y[o] - t[o];
                loss += 0.5 * d * d;
                dy[o] = d * inv_n;
            }
            if (grad == nullptr) continue;
            double* G = grad->data();
            double* gW1 = G;
            double* gB1 = gW1 + hid_ * in_;
            double* gW2 = gB1 + hid_;
            double* gB2 = gW2 + out_ * hid_;
            std::fill(dz.begin(), dz.end(), 0.0);
            for (std::size_t o = 0; o < out_; ++o) {
                gB2[o] += dy[o];
                double* grow = gW2 + o * hid_;
                const double* wrow = W2 + o * hid_;
                for (std::size_t j = 0; j < hid_; ++j) {
                    grow[j] += dy[o] * h[j];
                    dz[j] += dy[o] * wrow[j];
                }
            }
            for (std::size_t j = 0; j < hid_; ++j) {
                const double dzj = dz[j] * (1.0 - h[j] * h[j]);
                gB1[j] += dzj;
                double* grow = gW1 + j * in_;
                for (std::size_t k = 0; k < in_; ++k) grow[k] += dzj * x[k];
            }
        }
        return loss * inv_n;
    }

    TaskParams p_;
    std::size_t in_, hid_, out_;
    std::vector<double> train_x_, train_t_, val_x_, val_t_, probe_x_;
};

// ---------------------------------------------------------------------------
// char-seq: next-token prediction over a synthetic alphabet generated by a
// sparse order-2 Markov source. Model: token embeddings for the context
// window, concatenated, one tanh layer, softmax output, cross-entropy.
//
// Parameter layout: E[V x e], W1[H x (C*e)], b1[H], W2[V x H], b2[V].

class CharSequence final : public Task {
public:
    explicit CharSequence(const TaskParams& p)
        : p_(p), vocab_(p.seq_vocab), ctx_(p.seq_context), emb_(p.seq_embed), hid_(p.seq_hidden) {
        if (vocab_ < 2 || ctx_ == 0 || emb_ == 0 || hid_ == 0 || p.seq_train_size == 0 ||
            p.seq_val_size == 0 || p.batch_size == 0 || p.probe_count == 0) {
            throw std::invalid_argument("char-seq: bad sizes");
        }
        std::mt19937_64 rng(p.data_seed);
        // Each context prefers a handful of successors.
        std::size_t n_ctx = 1;
        for (std::size_t c = 0; c < ctx_; ++c) n_ctx *= vocab_;
        std::gamma_distribution<double> gamma(0.3, 1.0);
        table_.resize(n_ctx * vocab_);
        for (std::size_t c = 0; c < n_ctx; ++c) {
            double sum = 0.0;
            for (std::size_t v = 0; v < vocab_; ++v) {
                table_[c * vocab_ + v] = gamma(rng) + 1e-3;
                sum += table_[c * vocab_ + v];
            }
            for (std::size_t v = 0; v < vocab_; ++v) table_[c * vocab_ + v] /= sum;
        }
        generate(rng, p.seq_train_size, train_ctx_, train_next_);
        generate(rng, p.seq_val_size, val_ctx_, val_next_);
        std::vector<std::uint32_t> unused;
        generate(rng, p.probe_count, probe_ctx_, unused);
    }

    std::string_view name() const override { return "char-seq"; }
    std::size_t param_dim() const override {
        return vocab_ * emb_ + hid_ * ctx_ * emb_ + hid_ + vocab_ * hid_ + vocab_;
    }
    std::size_t fingerprint_dim() const override { return p_.probe_count * vocab_; }

    ParamVector initial_params(std::uint64_t seed) const override {
        std::mt19937_64 rng(derive_seed(seed, kStreamInit));
        std::vector<double> w(param_dim());
        std::normal_distribution<double> ne(0.0, 1.0);
        const double a1 = 1.0 / std::sqrt(static_cast<double>(ctx_ * emb_));
        const double a2 = 1.0 / std::sqrt(static_cast<double>(hid_));
        std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
        std::size_t i = 0;
        for (std::size_t k = 0; k < vocab_ * emb_; ++k) w[i++] = ne(rng);
        for (std::size_t k = 0; k < hid_ * ctx_ * emb_ + hid_; ++k) w[i++] = u1(rng);
        for (std::size_t k = 0; k < vocab_ * hid_ + vocab_; ++k) w[i++] = u2(rng);
        return ParamVector(std::move(w));
    }

    Batch batch(std::uint64_t seed, std::uint64_t step) const override {
        Batch b;
        b.step = step;
        b.key = derive_seed(seed, step);
        b.rows = sample_rows(seed, step, p_.batch_size, p_.seq_train_size);
        return b;
    }

    TaskGradient loss_and_grad(const ParamVector& w, const Batch& b) const override {
        require_dim(w, param_dim(), "char-seq");
        require_finite(w, "char-seq loss_and_grad");
        std::vector<double> g(param_dim(), 0.0);
        const double loss = run(w, b.rows, train_ctx_, train_next_, &g);
        return {loss, ParamVector(std::move(g))};
    }

    double batch_loss(const ParamVector& w, const Batch& b) const override {
        require_dim(w, param_dim(), "char-seq");
        require_finite(w, "char-seq batch_loss");
        return run(w, b.rows, train_ctx_, train_next_, nullptr);
    }

    double validation_loss(const ParamVector& w) const override {
        require_dim(w, param_dim(), "char-seq");
        if (!w.is_finite()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        std::vector<std::uint32_t> rows(p_.seq_val_size);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
        return run(w, rows, val_ctx_, val_next_, nullptr);
    }

    std::vector<double> fingerprint(const ParamVector& w) const override {
        require_dim(w, param_dim(), "char-seq");
        require_finite(w, "char-seq fingerprint");
        std::vector<double> fp(fingerprint_dim());
        std::vector<double> in(ctx_ * emb_), h(hid_);
        for (std::size_t s = 0; s < p_.probe_count; ++s) {
            forward(w, &probe_ctx_[s * ctx_], in.data(), h.data(), &fp[s * vocab_]);
        }
        return fp;
    }

private:
    std::size_t off_w1() const { return vocab_ * emb_; }
    std::size_t off_b1() const { return off_w1() + hid_ * ctx_ * emb_; }
    std::size_t off_w2() const { return off_b1() + hid_; }
    std::size_t off_b2() const { return off_w2() + vocab_ * hid_; }

    void generate(std::mt19937_64& rng, std::size_t n, std::vector<std::uint32_t>& ctx,
                  std::vector<std::uint32_t>& next) const {
        std::uniform_int_distribution<std::uint32_t> tok(0, static_cast<std::uint32_t>(vocab_ - 1));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<std::uint32_t> window(ctx_);
        for (auto& t : window) t = tok(rng);
        ctx.resize(n * ctx_);
        next.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::size_t c = 0;
            for (std::size_t k = 0; k < ctx_; ++k) c = c * vocab_ + window[k];
            const double r = u(rng);
            double acc = 0.0;
            std::uint32_t pick = static_cast<std::uint32_t>(vocab_ - 1);
            for (std::size_t v = 0; v < vocab_; ++v) {
                acc += table_[c * vocab_ + v];
                if (r < acc) {
                    pick = static_cast<std::uint32_t>(v);
                    break;
                }
            }
            std::copy(window.begin(), window.end(), ctx.begin() + static_cast<std::ptrdiff_t>(s * ctx_));
            next[s] = pick;
            std::rotate(window.begin(), window.begin() + 1, window.end());
            window.back() = pick;
        }
    }

    void forward(const ParamVector& w, const std::uint32_t* ctx, double* in, double* h,
                 double* logits) const {
        const double* W = w.view().data();
        for (std::size_t k = 0; k < ctx_; ++k) {
            std::copy_n(W + ctx[k] * emb_, emb_, in + k * emb_);
        }
        const std::size_t fan = ctx_ * emb_;
        for (std::size_t j = 0; j < hid_; ++j) {
            double z = W[off_b1() + j];
            const double* row = W + off_w1() + j * fan;
            for (std::size_t k = 0; k < fan; ++k) z += row[k] * in[k];
            h[j] = std::tanh(z);
        }
        for (std::size_t v = 0; v < vocab_; ++v) {
            double z = W[off_b2() + v];
            const double* row = W + off_w2() + v * hid_;
            for (std::size_t j = 0; j < hid_; ++j) z += row[j] * h[j];
            logits[v] = z;
        }
    }

    double run(const ParamVector& w, const std::vector<std::uint32_t>& rows,
               const std::vector<std::uint32_t>& ctxs, const std::vector<std::uint32_t>& nexts,
               std::vector<double>* grad) const {
        const std::size_t fan = ctx_ * emb_;
        std::vector<double> in(fan), h(hid_), logits(vocab_), dlog(vocab_), dh(hid_), din(fan);
        const double inv_n = 1.0 / static_cast<double>(rows.size());
        const double* W = w.view().data();
        double loss = 0.0;
        for (std::uint32_t r : rows) {
            const std::uint32_t* ctx = &ctxs[r * ctx_];
            const std::uint32_t target = nexts[r];
            forward(w, ctx, in.data(), h.data(), logits.data());
            const double mx = *std::max_element(logits.begin(), logits.end());
            double z = 0.0;
            for (std::size_t v = 0; v < vocab_; ++v) z += std::exp(logits[v] - mx);
            const double lse = mx + std::log(z);
            loss += lse - logits[target];
            if (grad == nullptr) continue;
            double* G = grad->data();
            for (std::size_t v = 0; v < vocab_; ++v) {
                dlog[v] = (std::exp(logits[v] - lse) - (v == target ? 1.0 : 0.0)) * inv_n;
            }
            std::fill(dh.begin(), dh.end(), 0.0);
            for (std::size_t v = 0; v < vocab_; ++v) {
                G[off_b2() + v] += dlog[v];
                double* grow = G + off_w2() + v * hid_;
                const double* wrow = W + off_w2() + v * hid_;
                for (std::size_t j = 0; j < hid_; ++j) {
                    grow[j] += dlog[v] * h[j];
                    dh[j] += dlog[v] * wrow[j];
                }
            }
            std::fill(din.begin(), din.end(), 0.0);
            for (std::size_t j = 0; j < hid_; ++j) {
                const double dzj = dh[j] * (1.0 - h[j] * h[j]);
                G[off_b1() + j] += dzj;
                double* grow = G + off_w1() + j * fan;
                const double* wrow = W + off_w1() + j * fan;
                for (std::size_t k = 0; k < fan; ++k) {
                    grow[k] += dzj * in[k];
                    din[k] += dzj * wrow[k];
                }
            }
            for (std::size_t k = 0; k < ctx_; ++k) {
                double* ge = G + ctx[k] * emb_;
                for (std::size_t e = 0; e < emb_; ++e) ge[e] += din[k * emb_ + e];
            }
        }
        return loss * inv_n;
    }

    TaskParams p_;
    std::size_t vocab_, ctx_, emb_, hid_;
    std::vector<double> table_;
    std::vector<std::uint32_t> train_ctx_, train_next_, val_ctx_, val_next_, probe_ctx_;
};

}  // namespace

std::unique_ptr<Task> make_task(const TaskParams& params) {
    if (params.name == "quad-bowl") return std::make_unique<QuadBowl>(params);
    if (params.name == "mlp-reg") return std::make_unique<MlpRegression>(params);
    if (params.name == "char-seq") return std::make_unique<CharSequence>(params);
    throw std::invalid_argument("unknown task '" + params.name + "'");
}

std::unique_ptr<Task> make_quad_bowl(std::vector<double> curvature, std::vector<double> target,
                                     double noise) {
    if (curvature.empty() || curvature.size() != target.size()) {
        throw DimensionError("make_quad_bowl: curvature/target length mismatch");
    }
    return std::make_unique<QuadBowl>(std::move(curvature), std::move(target), noise);
}

}  // namespace leapverify
