// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "leapverify/tasks.hpp"

using namespace leapverify;

namespace {

TaskParams params_for(const std::string& name) {
    TaskParams p;
    p.name = name;
    return p;
}

// Directional derivative along a random unit direction against central
// differences.
double worst_gradient_error(const Task& task, int draws) {
    double worst = 0.0;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int d = 0; d < draws; ++d) {
        std::vector<double> theta = task.initial_params(1000 + d).values();
        for (auto& x : theta) x += 0.05 * n(rng);
        const ParamVector p(theta);
        const Batch b = task.batch(7 + d, 3 * d);
        const TaskGradient g = task.loss_and_grad(p, b);
        std::vector<double> dir(theta.size());
        for (auto& x : dir) x = n(rng);
        const double norm = l2_norm(dir);
        for (auto& x : dir) x /= norm;
        const double h = 1e-5;
        std::vector<double> up(theta), dn(theta);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            up[i] += h * dir[i];
            dn[i] -= h * dir[i];
        }
        const double fd = (task.batch_loss(ParamVector(up), b) - task.batch_loss(ParamVector(dn), b)) / (2 * h);
        const double an = dot(g.grad.view(), dir);
        const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
        worst = std::max(worst, rel);
        CHECK(g.loss == doctest::Approx(task.batch_loss(p, b)).epsilon(1e-12));
    }
    return worst;
}

}  // namespace

TEST_CASE("quad bowl by hand") {
    auto bowl = make_quad_bowl({1.0}, {0.0});
    const Batch b = bowl->batch(1, 0);
    const auto at_min = bowl->loss_and_grad(ParamVector{0.0}, b);
    CHECK(at_min.loss == 0.0);
    CHECK(at_min.grad == ParamVector{0.0});
    const auto at2 = bowl->loss_and_grad(ParamVector{2.0}, b);
    CHECK(at2.loss == 2.0);
    CHECK(at2.grad == ParamVector{2.0});
    CHECK(bowl->validation_loss(ParamVector{0.0}) == 0.0);
    CHECK(bowl->fingerprint(ParamVector{2.0}) == std::vector<double>{2.0});
}

TEST_CASE("analytic gradients match central differences") {
    for (const auto& name : builtin_task_names()) {
        CAPTURE(name);
        const auto task = make_task(params_for(name));
        CHECK(worst_gradient_error(*task, 100) <= 1e-5);
    }
}

TEST_CASE("tasks are deterministic") {
    for (const auto& name : builtin_task_names()) {
        CAPTURE(name);
        const auto t1 = make_task(params_for(name));
        const auto t2 = make_task(params_for(name));
        const ParamVector p = t1->initial_params(42);
        CHECK(p == t2->initial_params(42));
        CHECK_FALSE(p == t1->initial_params(43));
        CHECK(t1->validation_loss(p) == t1->validation_loss(p));
        CHECK(t1->validation_loss(p) == t2->validation_loss(p));
        CHECK(t1->fingerprint(p) == t2->fingerprint(p));
        CHECK(t1->batch(42, 10).rows == t2->batch(42, 10).rows);
        CHECK(t1->fingerprint(p).size() == t1->fingerprint_dim());
        CHECK(p.size() == t1->param_dim());
    }
}

TEST_CASE("mlp fingerprint size is probes times outputs") {
    TaskParams p = params_for("mlp-reg");
    const auto t = make_task(p);
    CHECK(t->fingerprint_dim() == p.probe_count * p.mlp_output);
    CHECK(t->param_dim() == p.mlp_hidden * p.mlp_input + p.mlp_hidden + p.mlp_output * p.mlp_hidden + p.mlp_output);
}

TEST_CASE("non-finite parameters give a non-finite validation loss") {
    const auto t = make_task(params_for("mlp-reg"));
    std::vector<double> v = t->initial_params(1).values();
    v[0] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(std::isfinite(t->validation_loss(ParamVector(v))));
}

TEST_CASE("unknown task") {
    CHECK_THROWS(make_task(params_for("resnet")));
}
