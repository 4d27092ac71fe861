// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "leapverify/predict.hpp"

using namespace leapverify;

TEST_CASE("momentum extrapolation") {
    const ParamVector theta{1.0, -2.0};
    CHECK(predict_momentum(theta, {0.0, 0.0}, {1.0, 1.0}, 50, 1e-8).params == theta);
    CHECK(predict_momentum({0.0}, {0.1}, {0.01}, 10, 1e-15).params[0] == doctest::Approx(10.0));
    const auto p5 = predict_momentum(theta, {0.3, -0.2}, {0.04, 0.01}, 5, 1e-8);
    const auto p10 = predict_momentum(theta, {0.3, -0.2}, {0.04, 0.01}, 10, 1e-8);
    CHECK(p10.displacement_norm == doctest::Approx(2.0 * p5.displacement_norm).epsilon(1e-14));
}

TEST_CASE("descent momentum variant moves against the gradient") {
    // after one step with g = 1: m = 0.1, v = 0.001, m_hat/sqrt(v_hat) = 1
    const auto p = predict_momentum_descent({0.0}, {0.1}, {0.001}, 10, 1e-15, 1e-3, 0.9, 0.999, 1);
    CHECK(p.params[0] == doctest::Approx(-1e-2));
}

TEST_CASE("linear extrapolation") {
    CHECK(predict_linear({2.0, 3.0}, {2.0, 3.0}, 50, 25).params == ParamVector{2.0, 3.0});
    CHECK(predict_linear({2.0}, {1.0}, 50, 50).params[0] == 3.0);
    CHECK(predict_linear({2.0}, {1.0}, 50, 25).params[0] == 2.5);
}

TEST_CASE("quadratic as printed") {
    CHECK(predict_quadratic({10000.0}, {2500.0}, {0.0}, 50, 50).params[0] == 17500.0);
    CHECK(predict_quadratic({10000.0}, {2500.0}, {0.0}, 50, 100).params[0] == 30000.0);
}

TEST_CASE("exact quadratic on s^2") {
    CHECK(predict_quadratic_exact({10000.0}, {2500.0}, {0.0}, 50, 50).params[0] == 22500.0);
    CHECK(predict_quadratic_exact({10000.0}, {2500.0}, {0.0}, 50, 100).params[0] == 40000.0);
}

TEST_CASE("quadratics collapse to linear on collinear history") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(4), d(4);
        for (auto& x : a) x = u(rng);
        for (auto& x : d) x = std::round(u(rng));  // keep differences exact
        std::vector<double> p1(4), p0(4);
        for (int i = 0; i < 4; ++i) {
            a[i] = std::round(a[i]);
            p1[i] = a[i] + d[i];
            p0[i] = a[i] + 2 * d[i];
        }
        const ParamVector t2(a), t1(p1), t0(p0);
        const auto lin = predict_linear(t0, t1, 50, 25);
        CHECK(predict_quadratic(t0, t1, t2, 50, 25).params == lin.params);
        CHECK(predict_quadratic_exact(t0, t1, t2, 50, 25).params == lin.params);
    }
}

TEST_CASE("non-finite predictions are flagged") {
    const auto p = predict_momentum({0.0}, {1e300}, {0.0}, 5, 1e-300);
    CHECK_FALSE(p.finite);
    CHECK(predict_linear({1.0}, {0.0}, 50, 5).finite);
}

TEST_CASE("history requirements") {
    CHECK(required_history(PredictorId::momentum) == 1);
    CHECK(required_history(PredictorId::linear) == 2);
    CHECK(required_history(PredictorId::quadratic) == 3);
    CHECK(required_history(PredictorId::quadratic_exact) == 3);
    CHECK_THROWS(predict_linear({1.0}, {1.0}, 0, 5));
    CHECK_THROWS(predict_linear({1.0, 2.0}, {1.0}, 50, 5));
    for (auto id : {PredictorId::momentum, PredictorId::linear, PredictorId::quadratic, PredictorId::quadratic_exact}) {
        CHECK(parse_predictor(to_string(id)) == id);
    }
}
