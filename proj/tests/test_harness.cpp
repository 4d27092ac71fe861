// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "leapverify/harness.hpp"

using namespace leapverify;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
    RunConfig c;
    c.task.mlp_hidden = 32;
    c.task.mlp_train_size = 512;
    c.task.mlp_val_size = 128;
    c.task.probe_count = 20;
    c.seeds = {7, 8};
    c.total_steps = 400;
    c.warmup = 20;
    return c;
}

std::vector<SweepCell> random_cells(std::uint64_t seed_count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::bernoulli_distribution coin(0.5), rare(0.1);
    std::vector<SweepCell> cells;
    for (std::uint64_t seed = 1; seed <= seed_count; ++seed) {
        for (std::uint64_t step = 100; step <= 1000; step += 50) {
            const RegimeLabel r = coin(rng) ? RegimeLabel::transition : RegimeLabel::stable;
            for (auto p : {PredictorId::momentum, PredictorId::linear, PredictorId::quadratic}) {
                for (std::uint64_t k : {5, 10, 25}) {
                    SweepCell c;
                    c.seed = seed;
                    c.step = step;
                    c.regime = r;
                    c.predictor = p;
                    c.horizon = k;
                    c.current_loss = u(rng);
                    c.eligible = !rare(rng);
                    if (c.eligible) {
                        c.predicted_loss = c.current_loss * u(rng);
                        const auto sigma = rare(rng) ? std::nullopt : std::optional<double>(0.1);
                        c.decision = decide(c.predicted_loss, c.current_loss, sigma, 0.05);
                        c.displacement_norm = u(rng);
                    }
                    cells.push_back(c);
                }
            }
        }
    }
    return cells;
}

}  // namespace

TEST_CASE("seed statistics") {
    const std::vector<double> same{10, 10, 10, 10, 10};
    const SeedStats s = seed_stats(same);
    CHECK(s.mean == 10.0);
    CHECK(s.stddev == 0.0);
    REQUIRE(s.cov.has_value());
    CHECK(*s.cov == 0.0);

    const std::vector<double> zeros{0, 0, 0};
    CHECK_FALSE(seed_stats(zeros).cov.has_value());

    const std::vector<double> one{42.0};
    const SeedStats single = seed_stats(one);
    CHECK(single.single_seed);
    CHECK(single.stddev == 0.0);

    const std::vector<double> two{10.0, 20.0};
    CHECK(*seed_stats(two).cov == doctest::Approx(100.0 * std::sqrt(50.0) / 15.0));
}

TEST_CASE("rate identity and bounds") {
    std::mt19937_64 rng(17);
    const auto cells = random_cells(5, rng);
    const auto rep = aggregate(cells, {}, {});
    REQUIRE_FALSE(rep.rates.empty());
    for (const auto& e : rep.rates) {
        std::size_t acc = 0, den = 0;
        for (const auto& s : e.per_seed) {
            acc += s.accepted;
            den += s.denominator;
            if (s.rate) {
                CHECK(*s.rate >= 0.0);
                CHECK(*s.rate <= 100.0);
                CHECK(std::llround(*s.rate * static_cast<double>(s.denominator) / 100.0) ==
                      static_cast<long long>(s.accepted));
            } else {
                CHECK(s.denominator == 0);
            }
        }
        CHECK(acc == e.accepted);
        CHECK(den == e.denominator);
    }
    // independent recount of one table cell
    std::size_t acc = 0, den = 0;
    for (const auto& c : cells) {
        if (c.regime != RegimeLabel::stable || c.predictor != PredictorId::linear || c.horizon != 10) continue;
        if (!c.eligible || !c.decision.adaptive) continue;
        ++den;
        acc += *c.decision.adaptive;
    }
    const RateEntry* e = rep.find_rate("stable", PredictorId::linear, 10, Criterion::adaptive);
    REQUIRE(e != nullptr);
    CHECK(e->accepted == acc);
    CHECK(e->denominator == den);
}

TEST_CASE("aggregation does not depend on input order") {
    std::mt19937_64 rng(23);
    auto cells = random_cells(4, rng);
    std::vector<SeedRegimeSummary> regimes;
    for (std::uint64_t s = 1; s <= 4; ++s) regimes.push_back({s, {s, 10, 5, 1}, 100 * s, 16 + s});
    const std::string ref = to_json(aggregate(cells, regimes, {}, "t")).dump();
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(cells.begin(), cells.end(), rng);
        std::shuffle(regimes.begin(), regimes.end(), rng);
        CHECK(to_json(aggregate(cells, regimes, {}, "t")).dump() == ref);
    }
}

TEST_CASE("loss ratios") {
    std::vector<SweepCell> cells;
    for (int i = 0; i < 4; ++i) {
        SweepCell c;
        c.predictor = PredictorId::momentum;
        c.horizon = 5;
        c.eligible = true;
        c.current_loss = 1.0 + i;
        c.predicted_loss = c.current_loss;
        cells.push_back(c);
    }
    auto rows = momentum_ratio_table(cells);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ratio == 1.0);
    cells[0].predicted_loss = std::numeric_limits<double>::infinity();
    rows = momentum_ratio_table(cells);
    CHECK(rows[0].nonfinite_excluded == 1);
    CHECK(rows[0].n == 3);
    CHECK(rows[0].ratio == 1.0);
}

TEST_CASE("sweep CSV round trip") {
    std::mt19937_64 rng(29);
    const auto cells = random_cells(2, rng);
    const std::string csv = sweep_to_csv(cells);
    CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);
    const auto back = sweep_from_csv(csv);
    REQUIRE(back.size() == cells.size());
    CHECK(sweep_to_csv(back) == csv);
    CHECK(to_json(aggregate(back, {}, {})).dump() == to_json(aggregate(cells, {}, {})).dump());
    CHECK_THROWS(sweep_from_csv("bad header\n"));
}

TEST_CASE("passes on a small mlp run") {
    const RunConfig cfg = tiny_config();
    const auto task = make_task(cfg.task);
    const EngineConfig ec = cfg.engine();
    RunRecord run = pass1_train(*task, 7, ec);
    CHECK(run.checkpoints.size() == 8);
    CHECK(run.train_losses.size() == 400);

    SUBCASE("training is deterministic") {
        const RunRecord again = pass1_train(*task, 7, ec);
        for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
            CHECK(encode_checkpoint(again.checkpoints[i]) == encode_checkpoint(run.checkpoints[i]));
        }
    }

    // Label every checkpoint as transition so the whole run is swept.
    for (auto& c : run.checkpoints) c.regime = RegimeLabel::transition;
    run.checkpoints[0].regime = RegimeLabel::unknown;
    run.checkpoints[3].regime = RegimeLabel::chaotic;
    const auto preds = cfg.predictors();

    SUBCASE("K-sweep grid") {
        const auto cells = pass2_ksweep(*task, run, cfg.k_set, preds, ec);
        CHECK(cells.size() == 6 * preds.size() * cfg.k_set.size());
        std::set<std::tuple<std::uint64_t, PredictorId, std::uint64_t>> seen;
        for (const auto& c : cells) {
            CHECK(c.regime == RegimeLabel::transition);
            CHECK(seen.insert({c.step, c.predictor, c.horizon}).second);
            if (c.step == 100) {
                CHECK(c.eligible == (c.predictor != PredictorId::quadratic));
            } else {
                CHECK(c.eligible);
            }
        }
    }

    SUBCASE("missing checkpoints are an error") {
        RunRecord gap = run;
        gap.checkpoints.erase(gap.checkpoints.begin() + 4);
        CHECK_THROWS(pass2_ksweep(*task, gap, cfg.k_set, preds, ec));
    }

    SUBCASE("no stable checkpoints gives an empty cascade table") {
        const auto rows = pass3_cascades(*task, run, cfg.cascades, preds, Criterion::strict, ec);
        CHECK(rows.empty());
        const auto rep = aggregate({}, {}, rows);
        CHECK(rep.cascade_starts == 0);
        CHECK(to_json(rep)["cascades"].contains("note"));
    }

    SUBCASE("cascades only from stable checkpoints") {
        run.checkpoints[5].regime = RegimeLabel::stable;
        const auto rows = pass3_cascades(*task, run, cfg.cascades, preds, Criterion::strict, ec);
        CHECK(rows.size() == cfg.cascades.size() * preds.size());
        for (const auto& r : rows) {
            CHECK(r.result.start_step == 300);
            CHECK(r.result.accepted_depth <= r.result.config.depth);
        }
    }

    SUBCASE("run files round trip") {
        const auto root = fs::temp_directory_path() / "leapverify_test_runio";
        fs::remove_all(root);
        write_run(run, root);
        const RunRecord back = read_run(root, run.task, run.seed);
        CHECK(back.checkpoints == run.checkpoints);
        CHECK(back.train_losses == run.train_losses);
        fs::remove_all(root);
    }
}

TEST_CASE("experiment output is independent of the job count") {
    RunConfig cfg = tiny_config();
    cfg.jobs = 1;
    const auto a = run_experiment(cfg);
    cfg.jobs = 2;
    const auto b = run_experiment(cfg);
    CHECK(to_json(a.report).dump() == to_json(b.report).dump());
    CHECK(sweep_to_csv(a.cells) == sweep_to_csv(b.cells));
    CHECK(a.runs.size() == 2);
}

TEST_CASE("single-seed report is flagged") {
    RunConfig cfg = tiny_config();
    cfg.seeds = {7};
    cfg.tau_low = 0.9;
    cfg.tau_high = 0.999;
    const auto res = run_experiment(cfg);
    CHECK(res.report.single_seed);
    CHECK(format_report(res.report).find("single seed") != std::string::npos);
    CHECK(res.thresholds->tau_low == 0.9);
}

TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}
