// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Flat parameter vectors and the numeric helpers shared by every module.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leapverify {

/// Operand lengths disagree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A vector with zero norm was passed where a direction is required.
class DegenerateVectorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// NaN or Inf reached a place that needs a finite state.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable flat array of model parameters (f64).
///
/// The length is fixed at construction and must be positive. Non-finite
/// entries are allowed (extrapolation can overflow) and detectable through
/// is_finite().
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::vector<double> values);
    ParamVector(std::initializer_list<double> values);

    /// Zero vector of the given length.
    static ParamVector zeros(std::size_t length);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> view() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool is_finite() const noexcept;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    std::vector<double> values_;
};

/// Throws DimensionError unless a and b have equal length.
void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what);

/// a*x + y, elementwise.
ParamVector axpy(double a, const ParamVector& x, const ParamVector& y);

/// Elementwise linear combination sum_i coeffs[i] * vecs[i]. All vectors must
/// share one length.
ParamVector linear_combination(std::span<const double> coeffs,
                               std::span<const ParamVector* const> vecs);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> x);
inline double l2_norm(const ParamVector& x) { return l2_norm(x.view()); }

/// ||a - b||_2
double l2_distance(const ParamVector& a, const ParamVector& b);

/// (a.b) / (|a||b|). Throws DegenerateVectorError on a zero-norm operand.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> x) noexcept;

double mean(std::span<const double> x);

/// Sample standard deviation (n-1 denominator). Zero for fewer than two
/// samples.
double sample_stddev(std::span<const double> x);

/// Linear-interpolated quantile of unsorted data, q in [0,1] (the
/// "type 7" definition used by numpy and R defaults).
double quantile(std::vector<double> data, double q);

}  // namespace leapverify
