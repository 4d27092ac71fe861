// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Criteria 3, 4, 6 and 8 share one default 5-seed run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "leapverify/harness.hpp"

using namespace leapverify;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o, double seconds) {
    std::printf("[%s] criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, seconds);
    if (!o.detail.empty()) {
        std::istringstream lines(o.detail);
        for (std::string line; std::getline(lines, line);) std::printf("       %s\n", line.c_str());
    }
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <class F>
void run_criterion(int id, const char* title, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, title, o, dt);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel_err(const ParamVector& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// Counts adjacent increases in a sequence that should be non-increasing.
std::size_t increases(const std::vector<double>& xs) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) n += xs[i] > xs[i - 1];
    return n;
}

std::size_t decreases(const std::vector<double>& xs) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) n += xs[i] < xs[i - 1];
    return n;
}

// --- criterion 1 ------------------------------------------------------------

Outcome predictor_exactness() {
    Outcome o;
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> delta_d(1, 100), k_d(1, 200), t_d(0, 1000), dim_d(1, 16);
    double worst_lin = 0.0, worst_quad = 0.0, worst_hand = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint64_t delta = delta_d(rng), k = k_d(rng);
        const double t = 2.0 * static_cast<double>(delta) + t_d(rng);
        const std::size_t n = dim_d(rng);
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = coef(rng);
            b[i] = coef(rng);
            c[i] = coef(rng) * 1e-3;
        }
        auto sample = [&](double s, bool quadratic) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = a[i] + b[i] * s + (quadratic ? c[i] * s * s : 0.0);
            return v;
        };
        const double d = static_cast<double>(delta), kk = static_cast<double>(k);
        {
            const auto lin = predict_linear(ParamVector(sample(t, false)), ParamVector(sample(t - d, false)), delta, k);
            worst_lin = std::max(worst_lin, rel_err(lin.params, sample(t + kk, false)));
        }
        {
            const ParamVector p0(sample(t, true)), p1(sample(t - d, true)), p2(sample(t - 2 * d, true));
            const auto q = predict_quadratic_exact(p0, p1, p2, delta, k);
            worst_quad = std::max(worst_quad, rel_err(q.params, sample(t + kk, true)));
            // printed form, evaluated by hand
            const auto qp = predict_quadratic(p0, p1, p2, delta, k);
            std::vector<double> hand(n);
            const double curv = kk * (kk - d) / (2.0 * d * d);
            for (std::size_t i = 0; i < n; ++i) {
                hand[i] = p0[i] + (kk / d) * (p0[i] - p1[i]) + curv * (p0[i] - 2.0 * p1[i] + p2[i]);
            }
            worst_hand = std::max(worst_hand, rel_err(qp.params, hand));
        }
    }
    const double q17500 = predict_quadratic({10000.0}, {2500.0}, {0.0}, 50, 50).params[0];
    const double q30000 = predict_quadratic({10000.0}, {2500.0}, {0.0}, 50, 100).params[0];
    const double e22500 = predict_quadratic_exact({10000.0}, {2500.0}, {0.0}, 50, 50).params[0];
    const double e40000 = predict_quadratic_exact({10000.0}, {2500.0}, {0.0}, 50, 100).params[0];
    o.pass = worst_lin <= 1e-10 && worst_quad <= 1e-10 && worst_hand <= 1e-12 && q17500 == 17500.0 &&
             q30000 == 30000.0 && e22500 == 22500.0 && e40000 == 40000.0;
    o.detail = "linear on affine, worst rel err " + fmt("%.2e", worst_lin) + " (tol 1e-10, 1000 cases)\n" +
               "exact quadratic on quadratic, worst rel err " + fmt("%.2e", worst_quad) + " (tol 1e-10, 1000 cases)\n" +
               "printed quadratic vs hand evaluation, worst rel err " + fmt("%.2e", worst_hand) + "\n" +
               "K=delta=50 -> " + fmt("%.17g", q17500) + " (want 17500); K=100 -> " + fmt("%.17g", q30000) +
               " (want 30000); exact: " + fmt("%.17g", e22500) + ", " + fmt("%.17g", e40000);
    return o;
}

// --- criterion 2 ------------------------------------------------------------

Outcome zero_cost_rejection() {
    RunConfig cfg;
    const auto task = make_task(cfg.task);
    EngineConfig ec = cfg.engine();
    // Gating off so every checkpoint with history actually speculates.
    ec.regime_gating = false;
    ec.criterion = Criterion::proximity;
    TrainingRun plain(*task, 42, ec);
    plain.run();
    TrainingRun rejected(*task, 42, ec);
    std::size_t eligible = 0, would_pass = 0;
    rejected.run(LeapPlan{PredictorId::linear, 5, true}, [&](const LeapEvent& ev) {
        eligible += ev.eligible;
        would_pass += ev.eligible && ev.decision.proximity;
    });
    Outcome o;
    const bool same_params = rejected.params() == plain.params();
    const bool same_losses = rejected.train_losses() == plain.train_losses();
    const bool same_vals = rejected.trajectory().loss_log() == plain.trajectory().loss_log();
    o.pass = same_params && same_losses && same_vals && eligible > 0 && rejected.skipped_steps() == 0;
    o.detail = std::to_string(eligible) + " speculations (" + std::to_string(would_pass) +
               " would have passed proximity), all force-rejected\n" +
               "final parameters bit-identical: " + (same_params ? "yes" : "no") +
               "; train loss log bit-identical: " + (same_losses ? "yes" : "no") +
               "; validation loss log bit-identical: " + (same_vals ? "yes" : "no");
    return o;
}

// --- shared experiment ------------------------------------------------------

struct Shared {
    RunConfig cfg;
    ExperimentResult res;
};

Shared& shared() {
    static Shared s = [] {
        Shared x;
        const auto t0 = std::chrono::steady_clock::now();
        x.res = run_experiment(x.cfg);
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("       (default mlp-reg experiment, seeds 42-46: %.1fs; tau_low %.6f, tau_high %.6f)\n", dt,
                    x.res.thresholds->tau_low, x.res.thresholds->tau_high);
        return x;
    }();
    return s;
}

std::vector<SweepCell> cells_of(const ExperimentResult& r, std::uint64_t seed) {
    std::vector<SweepCell> out;
    for (const auto& c : r.cells) if (c.seed == seed) out.push_back(c);
    return out;
}

// --- criterion 3 ------------------------------------------------------------

Outcome momentum_catastrophe() {
    const auto& sh = shared();
    const auto& ks = sh.cfg.k_set;
    std::map<std::uint64_t, double> mom, lin;
    std::map<std::uint64_t, std::size_t> mom_n, lin_n;
    for (auto seed : sh.cfg.seeds) {
        const auto cells = cells_of(sh.res, seed);
        for (const auto& row : loss_ratio_table(cells, PredictorId::momentum)) {
            mom[row.horizon] += row.ratio;
            ++mom_n[row.horizon];
        }
        for (const auto& row : loss_ratio_table(cells, PredictorId::linear)) {
            lin[row.horizon] += row.ratio;
            ++lin_n[row.horizon];
        }
    }
    Outcome o;
    std::vector<double> mom_seq;
    o.detail = "    K   momentum ratio   linear ratio   momentum/linear\n";
    for (auto k : ks) {
        if (mom_n[k] != sh.cfg.seeds.size() || lin_n[k] != sh.cfg.seeds.size()) {
            o.pass = false;
            o.detail += "K=" + std::to_string(k) + ": ratio missing for some seed\n";
            continue;
        }
        const double m = mom[k] / static_cast<double>(mom_n[k]);
        const double l = lin[k] / static_cast<double>(lin_n[k]);
        mom_seq.push_back(m);
        const bool above_one = m > 1.0;
        const bool gap_ok = k < 25 || m >= 10.0 * l;
        o.pass = o.pass && above_one && gap_ok && std::isfinite(m);
        o.detail += fmt("%5.0f", static_cast<double>(k)) + fmt("%17.4g", m) + fmt("%15.4g", l) +
                    fmt("%17.4g", m / l) + (above_one ? "" : "  ratio <= 1") + (gap_ok ? "" : "  gap < 10x") + "\n";
    }
    const std::size_t inversions = decreases(mom_seq);
    o.pass = o.pass && inversions <= 1;
    o.detail += "decreases in momentum ratio across K: " + std::to_string(inversions) + " (allowed 1)";
    return o;
}

// --- criterion 4 ------------------------------------------------------------

Outcome graceful_degradation() {
    const auto& sh = shared();
    const auto& rep = sh.res.report;
    Outcome o;
    for (std::size_t s = 0; s < sh.cfg.seeds.size(); ++s) {
        std::vector<double> rates;
        std::string line = "seed " + std::to_string(sh.cfg.seeds[s]) + ":";
        bool complete = true;
        for (auto k : sh.cfg.k_set) {
            const RateEntry* e = rep.find_rate("non-chaotic", PredictorId::linear, k, Criterion::proximity);
            if (!e || !e->per_seed[s].rate) {
                complete = false;
                line += " K=" + std::to_string(k) + ":n/a";
                continue;
            }
            rates.push_back(*e->per_seed[s].rate);
            line += " K=" + std::to_string(k) + ":" + fmt("%.1f%%", rates.back()) + "(" +
                    std::to_string(e->per_seed[s].denominator) + ")";
        }
        const auto idx = [&](std::uint64_t k) {
            return static_cast<std::size_t>(std::find(sh.cfg.k_set.begin(), sh.cfg.k_set.end(), k) - sh.cfg.k_set.begin());
        };
        const bool strict_drop = complete && rates[idx(5)] > rates[idx(50)];
        const std::size_t inv = complete ? increases(rates) : 99;
        const bool ok = complete && strict_drop && inv <= 1;
        o.pass = o.pass && ok;
        o.detail += line + "  increases " + std::to_string(inv) + (ok ? "" : "  <-- violates") + "\n";
    }
    return o;
}

// --- criterion 5 ------------------------------------------------------------

Outcome regime_machinery() {
    const double sims[] = {1.0, 0.5, 0.95, 0.995};
    // Fingerprints on the unit circle; consecutive angle gives the cosine.
    std::vector<Checkpoint> run;
    double angle = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i > 0) angle += std::acos(sims[i]);
        Checkpoint c;
        c.step = 50 * (i + 1);
        c.params = ParamVector{0.0};
        c.moments = {ParamVector{0.0}, ParamVector{0.0}};
        c.fingerprint = {std::cos(angle), std::sin(angle)};
        run.push_back(c);
    }
    const Thresholds th{0.90, 0.99};
    const auto labels = label_run(run, th);
    for (std::size_t i = 0; i < run.size(); ++i) run[i].regime = labels[i];
    const std::vector<RegimeLabel> want{RegimeLabel::unknown, RegimeLabel::chaotic, RegimeLabel::transition,
                                        RegimeLabel::stable};
    const RegimeCounts counts = regime_breakdown(run);
    Outcome o;
    o.pass = labels == want && counts == RegimeCounts{1, 1, 1, 1};
    o.detail = "labels:";
    for (auto l : labels) o.detail += " " + std::string(to_string(l));
    o.detail += "\nbreakdown: chaotic " + std::to_string(counts.chaotic) + ", transition " +
                std::to_string(counts.transition) + ", stable " + std::to_string(counts.stable) +
                ", unknown " + std::to_string(counts.unknown);
    return o;
}

// --- criterion 6 ------------------------------------------------------------

Outcome regime_consistency() {
    const auto& sh = shared();
    Outcome o;
    std::vector<double> steps;
    for (const auto& r : sh.res.report.regimes) {
        if (!r.chaotic_exit_step) {
            o.pass = false;
            o.detail += "seed " + std::to_string(r.seed) + ": no chaotic->transition boundary\n";
            continue;
        }
        steps.push_back(static_cast<double>(*r.chaotic_exit_step));
        o.detail += "seed " + std::to_string(r.seed) + ": boundary at step " + std::to_string(*r.chaotic_exit_step) + "\n";
    }
    if (steps.empty()) {
        o.pass = false;
        return o;
    }
    // "within +-2 checkpoints across all seeds": every boundary fits in a band
    // of half-width 2*delta, i.e. max - min <= 4*delta.
    const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end());
    const double half_width = 2.0 * static_cast<double>(sh.cfg.delta);
    const double centre = 0.5 * (*lo + *hi);
    const double m = mean(steps);
    double from_mean = 0.0;
    for (double s : steps) from_mean = std::max(from_mean, std::abs(s - m));
    o.pass = o.pass && (*hi - *lo) <= 2.0 * half_width;
    o.detail += "range " + fmt("%.0f", *lo) + ".." + fmt("%.0f", *hi) + " = " + fmt("%.0f", centre) + " +- " +
                fmt("%.0f", 0.5 * (*hi - *lo)) + " steps (limit +- " + fmt("%.0f", half_width) +
                "); max deviation from the mean " + fmt("%.0f", m) + " is " + fmt("%.0f", from_mean);
    return o;
}

// --- criterion 7 ------------------------------------------------------------

Outcome aggregation_correctness() {
    Outcome o;
    const std::vector<double> same{12.5, 12.5, 12.5, 12.5, 12.5};
    const SeedStats st = seed_stats(same);
    const bool cov_zero = st.cov && *st.cov == 0.0 && st.stddev == 0.0;

    const auto& sh = shared();
    std::size_t checked = 0, bad = 0;
    for (const auto& e : sh.res.report.rates) {
        std::size_t acc = 0, den = 0;
        for (const auto& s : e.per_seed) {
            acc += s.accepted;
            den += s.denominator;
            if (s.rate) {
                ++checked;
                const double back = *s.rate * static_cast<double>(s.denominator) / 100.0;
                if (std::llround(back) != static_cast<long long>(s.accepted) ||
                    std::abs(back - static_cast<double>(s.accepted)) > 1e-9) {
                    ++bad;
                }
            }
        }
        if (acc != e.accepted || den != e.denominator) ++bad;
    }

    auto cells = sh.res.cells;
    std::vector<SeedRegimeSummary> regimes = sh.res.report.regimes;
    auto cascades = sh.res.cascades;
    std::reverse(cells.begin(), cells.end());
    std::reverse(regimes.begin(), regimes.end());
    std::reverse(cascades.begin(), cascades.end());
    const std::string a = to_json(sh.res.report).dump();
    const std::string b =
        to_json(aggregate(cells, regimes, cascades, sh.res.report.task, sh.res.report.thresholds)).dump();
    std::mt19937_64 rng(5);
    std::shuffle(cells.begin(), cells.end(), rng);
    const std::string c =
        to_json(aggregate(cells, regimes, cascades, sh.res.report.task, sh.res.report.thresholds)).dump();
    const bool invariant = a == b && a == c;

    o.pass = cov_zero && bad == 0 && checked > 0 && invariant;
    o.detail = std::string("identical per-seed rates -> CoV ") + (st.cov ? fmt("%.1f%%", *st.cov) : "undefined") +
               ", std " + fmt("%.1f", st.stddev) + "\n" + "rate x denominator == accepted: " +
               std::to_string(checked - bad) + "/" + std::to_string(checked) + " per-seed cells\n" +
               "aggregate invariant under reversed and shuffled seed order: " + (invariant ? "yes" : "no");
    return o;
}

// --- criterion 8 ------------------------------------------------------------

Outcome protocol_fidelity() {
    const auto& sh = shared();
    Outcome o;
    const std::size_t grid_bound = 40 * 3 * 6 * 3;  // checkpoints x predictors x K x criteria
    for (const auto& r : sh.res.runs) {
        const auto cells = cells_of(sh.res, r.seed);
        const std::size_t evals = cells.size() * 3;
        const bool ok = r.checkpoints.size() == 40 && evals <= grid_bound;
        o.pass = o.pass && ok;
        o.detail += "seed " + std::to_string(r.seed) + ": " + std::to_string(r.checkpoints.size()) +
                    " checkpoints, " + std::to_string(cells.size()) + " sweep cells (" + std::to_string(evals) +
                    " criterion evaluations, bound " + std::to_string(grid_bound) + ")\n";
    }
    const bool configs_ok = sh.cfg.cascades == std::vector<CascadeConfig>{{4, 25}, {2, 50}, {10, 10}};
    std::size_t rows = 0, non_stable = 0;
    for (const auto& row : sh.res.cascades) {
        ++rows;
        const auto& run = *std::find_if(sh.res.runs.begin(), sh.res.runs.end(),
                                        [&](const RunRecord& r) { return r.seed == row.seed; });
        for (const auto& c : run.checkpoints) {
            if (c.step == row.result.start_step && c.regime != RegimeLabel::stable) ++non_stable;
        }
        if (row.result.accepted_depth > row.result.config.depth) ++non_stable;
    }
    std::size_t stable_total = 0;
    for (const auto& r : sh.res.report.regimes) stable_total += r.counts.stable;
    const bool row_count = rows == stable_total * sh.cfg.cascades.size() * sh.cfg.predictors().size();

    // empty-table handling: relabel one run with no stable checkpoints
    RunRecord no_stable = sh.res.runs.front();
    for (auto& c : no_stable.checkpoints) {
        if (c.regime == RegimeLabel::stable) c.regime = RegimeLabel::transition;
    }
    const auto task = make_task(sh.cfg.task);
    const auto empty = pass3_cascades(*task, no_stable, sh.cfg.cascades, sh.cfg.predictors(), sh.cfg.criterion,
                                      sh.cfg.engine());
    const auto empty_rep = aggregate({}, {}, empty);
    const bool empty_ok = empty.empty() && to_json(empty_rep)["cascades"].contains("note") &&
                          format_report(empty_rep).find("denominator 0") != std::string::npos;

    o.pass = o.pass && configs_ok && non_stable == 0 && row_count && empty_ok;
    o.detail += std::string("cascade configs {(4,25),(2,50),(10,10)}: ") + (configs_ok ? "yes" : "no") + "; " +
                std::to_string(rows) + " cascade evaluations from " + std::to_string(stable_total) +
                " stable checkpoints, non-stable starts " + std::to_string(non_stable) + "\n" +
                "no-stable run -> empty table with zero-denominator note: " + (empty_ok ? "yes" : "no");
    return o;
}

// --- criterion 9 ------------------------------------------------------------

Outcome gradient_check() {
    Outcome o;
    for (const auto& name : builtin_task_names()) {
        TaskParams p;
        p.name = name;
        const auto task = make_task(p);
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> n(0.0, 1.0);
        double worst = 0.0;
        for (int draw = 0; draw < 100; ++draw) {
            std::vector<double> theta = task->initial_params(500 + draw).values();
            for (auto& x : theta) x += 0.05 * n(rng);
            const Batch b = task->batch(900 + draw, draw);
            const TaskGradient g = task->loss_and_grad(ParamVector(theta), b);
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
            const double fd =
                (task->batch_loss(ParamVector(up), b) - task->batch_loss(ParamVector(dn), b)) / (2.0 * h);
            const double an = dot(g.grad.view(), dir);
            worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}));
        }
        o.pass = o.pass && worst <= 1e-5;
        o.detail += name + ": worst relative error " + fmt("%.2e", worst) + " over 100 draws (tol 1e-5)\n";
    }
    if (!o.detail.empty()) o.detail.pop_back();
    return o;
}

}  // namespace

int main() {
    run_criterion(1, "predictor exactness oracles", predictor_exactness);
    run_criterion(2, "zero-cost rejection on mlp-reg", zero_cost_rejection);
    run_criterion(3, "momentum catastrophe pattern", momentum_catastrophe);
    run_criterion(4, "graceful degradation of linear proximity acceptance", graceful_degradation);
    run_criterion(5, "regime machinery on a constructed sequence", regime_machinery);
    run_criterion(6, "cross-seed regime consistency", regime_consistency);
    run_criterion(7, "aggregation correctness", aggregation_correctness);
    run_criterion(8, "protocol fidelity", protocol_fidelity);
    run_criterion(9, "gradient check on every built-in task", gradient_check);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
