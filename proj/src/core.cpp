// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace leapverify {

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw DimensionError("ParamVector: length must be > 0");
    }
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(std::vector<double>(values)) {}

ParamVector ParamVector::zeros(std::size_t length) {
    return ParamVector(std::vector<double>(length, 0.0));
}

bool ParamVector::is_finite() const noexcept { return all_finite(values_); }

void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length mismatch (" +
                             std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
}

ParamVector axpy(double a, const ParamVector& x, const ParamVector& y) {
    require_same_length(x.view(), y.view(), "axpy");
    std::vector<double> out(y.values());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += a * x[i];
    }
    return ParamVector(std::move(out));
}

ParamVector linear_combination(std::span<const double> coeffs,
                               std::span<const ParamVector* const> vecs) {
    if (coeffs.size() != vecs.size() || vecs.empty()) {
        throw DimensionError("linear_combination: need one coefficient per vector");
    }
    const std::size_t n = vecs.front()->size();
    for (const ParamVector* v : vecs) {
        require_same_length(vecs.front()->view(), v->view(), "linear_combination");
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        const double c = coeffs[k];
        const auto& v = vecs[k]->values();
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += c * v[i];
        }
    }
    return ParamVector(std::move(out));
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double l2_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

double l2_distance(const ParamVector& a, const ParamVector& b) {
    require_same_length(a.view(), b.view(), "l2_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "cosine_similarity");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw DegenerateVectorError("cosine_similarity: zero-norm vector");
    }
    const double s = dot(a, b) / (na * nb);
    return std::clamp(s, -1.0, 1.0);
}

bool all_finite(std::span<const double> x) noexcept {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean: empty input");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_stddev(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::vector<double> data, double q) {
    if (data.empty()) {
        throw std::invalid_argument("quantile: empty input");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("quantile: q outside [0,1]");
    }
    std::sort(data.begin(), data.end());
    const double pos = q * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, data.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return data[lo] + frac * (data[hi] - data[lo]);
}

}  // namespace leapverify
