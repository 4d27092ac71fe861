// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace leapverify {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

/// Wraps a failure with the seed and pass that produced it.
template <class F>
auto in_pass(std::uint64_t seed, const char* pass, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error("seed " + std::to_string(seed) + ", " + pass + ": " + e.what());
    }
}

bool swept_regime(RegimeLabel r) {
    return r == RegimeLabel::transition || r == RegimeLabel::stable;
}

bool regime_matches(std::string_view filter, RegimeLabel r) {
    if (filter == "non-chaotic") return swept_regime(r);
    return filter == to_string(r);
}

HistoryWindow window_at(const RunRecord& run, std::size_t i, std::uint64_t delta) {
    HistoryWindow w(delta);
    const std::size_t first = i >= 2 ? i - 2 : 0;
    for (std::size_t j = first; j <= i; ++j) w.push(run.checkpoints[j]);
    return w;
}

std::vector<double> val_losses(const RunRecord& run, std::size_t upto_inclusive) {
    std::vector<double> out;
    for (std::size_t j = 0; j <= upto_inclusive; ++j) out.push_back(run.checkpoints[j].val_loss);
    return out;
}

void require_contiguous(const RunRecord& run, std::uint64_t delta) {
    if (run.checkpoints.empty()) {
        throw std::runtime_error("run for seed " + std::to_string(run.seed) + " has no checkpoints");
    }
    for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
        const auto& c = run.checkpoints[i];
        if (c.step % delta != 0 || (i > 0 && c.step != run.checkpoints[i - 1].step + delta)) {
            throw std::runtime_error("run for seed " + std::to_string(run.seed) +
                                     ": missing checkpoint before step " + std::to_string(c.step));
        }
    }
}

}  // namespace

// --- pass 1 -----------------------------------------------------------------

RunRecord pass1_train(const Task& task, std::uint64_t seed, const EngineConfig& cfg,
                      const std::optional<Thresholds>& thresholds) {
    TrainingRun run(task, seed, cfg, thresholds);
    run.run();
    return RunRecord{std::string(task.name()), seed, run.trajectory().checkpoints(),
                     run.train_losses()};
}

void apply_thresholds(RunRecord& run, const Thresholds& th) {
    const auto labels = label_run(run.checkpoints, th);
    for (std::size_t i = 0; i < labels.size(); ++i) run.checkpoints[i].regime = labels[i];
}

void write_run(const RunRecord& run, const std::filesystem::path& root) {
    const auto dir = run_directory(root, run.task, run.seed);
    std::filesystem::create_directories(dir);
    std::string val = "step,val_loss,regime\n";
    for (const auto& c : run.checkpoints) {
        save_checkpoint(c, checkpoint_path(root, run.task, run.seed, c.step));
        val += std::to_string(c.step) + "," + g17(c.val_loss) + "," + std::string(to_string(c.regime)) + "\n";
    }
    std::string train = "step,loss\n";
    for (std::size_t i = 0; i < run.train_losses.size(); ++i) {
        train += std::to_string(i + 1) + "," + g17(run.train_losses[i]) + "\n";
    }
    write_file_atomic(dir / "val_losses.csv", val);
    write_file_atomic(dir / "train_losses.csv", train);
}

RunRecord read_run(const std::filesystem::path& root, std::string_view task, std::uint64_t seed) {
    RunRecord r;
    r.task = std::string(task);
    r.seed = seed;
    const auto dir = run_directory(root, task, seed);
    r.checkpoints = load_run(dir);
    std::ifstream in(dir / "train_losses.csv");
    std::string line;
    if (in && std::getline(in, line)) {
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma != std::string::npos) r.train_losses.push_back(std::stod(line.substr(comma + 1)));
        }
    }
    return r;
}

// --- pass 2 -----------------------------------------------------------------

std::vector<SweepCell> pass2_ksweep(const Task& task, const RunRecord& run,
                                    std::span<const std::uint64_t> k_set,
                                    std::span<const PredictorId> predictors,
                                    const EngineConfig& cfg) {
    require_contiguous(run, cfg.delta);
    std::vector<SweepCell> cells;
    for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
        const Checkpoint& now = run.checkpoints[i];
        if (!swept_regime(now.regime)) continue;
        const HistoryWindow window = window_at(run, i, cfg.delta);
        const auto sigma = try_recent_loss_std(val_losses(run, i), cfg.adaptive_window);
        for (PredictorId p : predictors) {
            for (std::uint64_t k : k_set) {
                SweepCell cell;
                cell.seed = run.seed;
                cell.step = now.step;
                cell.regime = now.regime;
                cell.predictor = p;
                cell.horizon = k;
                cell.current_loss = now.val_loss;
                auto pred = predict_from_window(window, p, k, cfg);
                if (pred) {
                    cell.eligible = true;
                    cell.displacement_norm = pred->displacement_norm;
                    cell.predicted_loss = task.validation_loss(pred->params);
                    cell.decision = decide(cell.predicted_loss, now.val_loss, sigma, cfg.epsilon);
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

// --- pass 3 -----------------------------------------------------------------

std::vector<CascadeRow> pass3_cascades(const Task& task, const RunRecord& run,
                                       std::span<const CascadeConfig> configs,
                                       std::span<const PredictorId> predictors,
                                       Criterion criterion, const EngineConfig& cfg) {
    require_contiguous(run, cfg.delta);
    std::vector<CascadeRow> rows;
    for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
        if (run.checkpoints[i].regime != RegimeLabel::stable) continue;
        const HistoryWindow window = window_at(run, i, cfg.delta);
        const auto losses = val_losses(run, i);
        for (const auto& c : configs) {
            for (PredictorId p : predictors) {
                rows.push_back({run.seed, run_cascade(task, window, losses, c, p, criterion, cfg)});
            }
        }
    }
    return rows;
}

// --- aggregation ------------------------------------------------------------

SeedStats seed_stats(std::span<const double> xs) {
    SeedStats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    s.mean = mean(xs);
    s.single_seed = xs.size() == 1;
    s.stddev = sample_stddev(xs);
    if (s.mean != 0.0) s.cov = 100.0 * s.stddev / s.mean;
    return s;
}

std::vector<LossRatioRow> loss_ratio_table(std::span<const SweepCell> cells, PredictorId predictor) {
    std::map<std::uint64_t, std::tuple<double, double, std::size_t, std::size_t>> acc;
    for (const auto& c : cells) {
        if (c.predictor != predictor || !c.eligible) continue;
        auto& [sp, sa, n, bad] = acc[c.horizon];
        if (!std::isfinite(c.predicted_loss)) {
            ++bad;
            continue;
        }
        sp += c.predicted_loss;
        sa += c.current_loss;
        ++n;
    }
    std::vector<LossRatioRow> out;
    for (const auto& [k, v] : acc) {
        const auto& [sp, sa, n, bad] = v;
        LossRatioRow row;
        row.horizon = k;
        row.n = n;
        row.nonfinite_excluded = bad;
        if (n > 0) {
            row.mean_predicted = sp / static_cast<double>(n);
            row.mean_actual = sa / static_cast<double>(n);
            row.ratio = row.mean_predicted / row.mean_actual;
        } else {
            row.ratio = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(row);
    }
    return out;
}

std::vector<LossRatioRow> momentum_ratio_table(std::span<const SweepCell> cells) {
    return loss_ratio_table(cells, PredictorId::momentum);
}

SeedRegimeSummary summarize_regimes(const RunRecord& run) {
    return {run.seed, regime_breakdown(run.checkpoints), chaotic_exit_step(run.checkpoints),
            run.checkpoints.size()};
}

const RateEntry* ExperimentReport::find_rate(std::string_view regime, PredictorId p,
                                             std::uint64_t k, Criterion c) const {
    for (const auto& r : rates) {
        if (r.regime == regime && r.predictor == p && r.horizon == k && r.criterion == c) return &r;
    }
    return nullptr;
}

ExperimentReport aggregate(std::span<const SweepCell> unordered_cells,
                           std::span<const SeedRegimeSummary> regimes,
                           std::span<const CascadeRow> cascades, std::string task,
                           std::optional<Thresholds> thresholds) {
    // Canonical order so floating-point sums do not depend on input order.
    std::vector<SweepCell> sorted(unordered_cells.begin(), unordered_cells.end());
    std::sort(sorted.begin(), sorted.end(), [](const SweepCell& a, const SweepCell& b) {
        return std::tie(a.seed, a.step, a.predictor, a.horizon) < std::tie(b.seed, b.step, b.predictor, b.horizon);
    });
    const std::span<const SweepCell> cells(sorted);
    ExperimentReport rep;
    rep.task = std::move(task);
    rep.thresholds = thresholds;

    std::set<std::uint64_t> seed_set;
    std::set<PredictorId> preds;
    std::set<std::uint64_t> ks;
    for (const auto& c : cells) {
        seed_set.insert(c.seed);
        preds.insert(c.predictor);
        ks.insert(c.horizon);
    }
    for (const auto& r : regimes) seed_set.insert(r.seed);
    rep.seeds.assign(seed_set.begin(), seed_set.end());
    rep.single_seed = rep.seeds.size() == 1;
    rep.total_cells = cells.size();
    rep.eligible_cells = static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return c.eligible; }));

    rep.regimes.assign(regimes.begin(), regimes.end());
    std::sort(rep.regimes.begin(), rep.regimes.end(),
              [](const auto& a, const auto& b) { return a.seed < b.seed; });
    for (RegimeLabel l : {RegimeLabel::chaotic, RegimeLabel::transition, RegimeLabel::stable,
                          RegimeLabel::unknown}) {
        std::vector<double> xs;
        for (const auto& r : rep.regimes) xs.push_back(static_cast<double>(r.counts.of(l)));
        rep.regime_stats[std::string(to_string(l))] = seed_stats(xs);
    }

    // (regime filter, predictor, K, criterion, seed) -> counts
    struct Counts {
        std::size_t accepted = 0, denominator = 0, ineligible = 0, not_evaluable = 0;
    };
    const std::vector<std::string> filters{"transition", "stable", "non-chaotic"};
    const std::vector<Criterion> criteria{Criterion::strict, Criterion::adaptive, Criterion::proximity};
    std::map<std::tuple<std::string, PredictorId, std::uint64_t, Criterion, std::uint64_t>, Counts> counts;
    for (const auto& c : cells) {
        for (const auto& f : filters) {
            if (!regime_matches(f, c.regime)) continue;
            for (Criterion cr : criteria) {
                auto& n = counts[{f, c.predictor, c.horizon, cr, c.seed}];
                if (!c.eligible) {
                    ++n.ineligible;
                    continue;
                }
                const auto verdict = c.decision.passes(cr);
                if (!verdict) {
                    ++n.not_evaluable;
                    continue;
                }
                ++n.denominator;
                if (*verdict) ++n.accepted;
            }
        }
    }
    for (const auto& f : filters) {
        for (PredictorId p : preds) {
            for (std::uint64_t k : ks) {
                for (Criterion cr : criteria) {
                    RateEntry e;
                    e.regime = f;
                    e.predictor = p;
                    e.horizon = k;
                    e.criterion = cr;
                    std::vector<double> rates;
                    for (std::uint64_t seed : rep.seeds) {
                        auto it = counts.find({f, p, k, cr, seed});
                        SeedRate sr;
                        sr.seed = seed;
                        if (it != counts.end()) {
                            sr.accepted = it->second.accepted;
                            sr.denominator = it->second.denominator;
                            e.ineligible += it->second.ineligible;
                            e.not_evaluable += it->second.not_evaluable;
                        }
                        if (sr.denominator > 0) {
                            sr.rate = 100.0 * static_cast<double>(sr.accepted) /
                                      static_cast<double>(sr.denominator);
                            rates.push_back(*sr.rate);
                        }
                        e.accepted += sr.accepted;
                        e.denominator += sr.denominator;
                        e.per_seed.push_back(sr);
                    }
                    e.stats = seed_stats(rates);
                    rep.rates.push_back(std::move(e));
                }
            }
        }
    }

    for (PredictorId p : preds) {
        rep.loss_ratios[std::string(to_string(p))] = loss_ratio_table(cells, p);
    }

    std::map<std::tuple<std::uint64_t, std::uint64_t, PredictorId>, std::vector<std::uint64_t>> depths;
    std::set<std::pair<std::uint64_t, std::uint64_t>> starts;
    for (const auto& row : cascades) {
        if (!row.result.eligible) continue;
        const auto& r = row.result;
        depths[{r.config.depth, r.config.horizon, r.predictor}].push_back(r.accepted_depth);
        starts.insert({row.seed, r.start_step});
    }
    rep.cascade_starts = starts.size();
    for (const auto& [key, ds] : depths) {
        CascadeSummary s;
        s.config = {std::get<0>(key), std::get<1>(key)};
        s.predictor = std::get<2>(key);
        s.starts = ds.size();
        s.depth_histogram.assign(s.config.depth + 1, 0);
        double sum = 0.0;
        for (auto d : ds) {
            ++s.depth_histogram[d];
            sum += static_cast<double>(d);
        }
        s.mean_accepted_depth = sum / static_cast<double>(ds.size());
        rep.cascades.push_back(std::move(s));
    }
    return rep;
}

// --- CSV --------------------------------------------------------------------

std::string sweep_to_csv(std::span<const SweepCell> cells) {
    std::string s = std::string(kSweepCsvHeader) + "\n";
    for (const auto& c : cells) {
        s += std::to_string(c.seed) + "," + std::to_string(c.step) + "," +
             std::string(to_string(c.regime)) + "," + std::string(to_string(c.predictor)) + "," +
             std::to_string(c.horizon) + ",";
        if (c.eligible) {
            const auto& d = c.decision;
            s += g17(c.predicted_loss) + "," + g17(c.current_loss) + "," + (d.strict ? "1" : "0") +
                 "," + (d.adaptive ? (*d.adaptive ? "1" : "0") : "na") + "," +
                 (d.proximity ? "1" : "0") + "," + g17(c.displacement_norm) + ",1\n";
        } else {
            s += "," + g17(c.current_loss) + ",,,,,0\n";
        }
    }
    return s;
}

std::vector<SweepCell> sweep_from_csv(std::string_view text, double epsilon) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader) {
        throw std::runtime_error("sweep CSV: missing or unexpected header");
    }
    std::vector<SweepCell> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string item;
        while (std::getline(ls, item, ',')) f.push_back(item);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 12) {
            throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": expected 12 fields");
        }
        try {
            SweepCell c;
            c.seed = std::stoull(f[0]);
            c.step = std::stoull(f[1]);
            c.regime = parse_regime(f[2]);
            c.predictor = parse_predictor(f[3]);
            c.horizon = std::stoull(f[4]);
            c.current_loss = std::stod(f[6]);
            c.eligible = f[11] == "1";
            if (c.eligible) {
                c.predicted_loss = std::stod(f[5]);
                c.displacement_norm = std::stod(f[10]);
                Decision& d = c.decision;
                d.predicted_loss = c.predicted_loss;
                d.current_loss = c.current_loss;
                d.epsilon = epsilon;
                d.strict = f[7] == "1";
                if (f[8] != "na") d.adaptive = f[8] == "1";
                d.proximity = f[9] == "1";
                if (!std::isfinite(c.predicted_loss)) d.reason = "non-finite prediction";
            }
            cells.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cells;
}

std::string cascades_to_csv(std::span<const CascadeRow> rows) {
    std::string s = "seed,start_step,D,K,predictor,criterion,eligible,accepted_depth,stage,stage_predictor,L_hat,L_ref,strict,adaptive,proximity,displacement_norm\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        const std::string head = std::to_string(row.seed) + "," + std::to_string(r.start_step) + "," +
                                 std::to_string(r.config.depth) + "," + std::to_string(r.config.horizon) +
                                 "," + std::string(to_string(r.predictor)) + "," +
                                 std::string(to_string(r.criterion)) + "," + (r.eligible ? "1" : "0") +
                                 "," + std::to_string(r.accepted_depth) + ",";
        if (r.stages.empty()) {
            s += head + ",,,,,,,\n";
            continue;
        }
        for (const auto& st : r.stages) {
            const auto& d = st.decision;
            s += head + std::to_string(st.stage) + "," + std::string(to_string(st.predictor_used)) + "," +
                 g17(st.predicted_loss) + "," + g17(st.reference_loss) + "," + (d.strict ? "1" : "0") + "," +
                 (d.adaptive ? (*d.adaptive ? "1" : "0") : "na") + "," + (d.proximity ? "1" : "0") + "," +
                 g17(st.displacement_norm) + "\n";
        }
    }
    return s;
}

// --- JSON -------------------------------------------------------------------

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt_json(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json stats_json(const SeedStats& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"std", s.stddev}, {"cov_pct", opt_json(s.cov)},
            {"single_seed", s.single_seed}};
}

}  // namespace

json to_json(const Decision& d) {
    json j = {{"strict", d.strict},
              {"adaptive", d.adaptive ? json(*d.adaptive) : json("not-evaluable")},
              {"proximity", d.proximity},
              {"L_hat", num_or_null(d.predicted_loss)},
              {"L_t", d.current_loss},
              {"sigma_L", opt_json(d.sigma)},
              {"epsilon", d.epsilon}};
    if (!d.reason.empty()) j["reason"] = d.reason;
    return j;
}

json to_json(const LeapEvent& ev) {
    json j = {{"step_from", ev.step_from},
              {"K", ev.horizon},
              {"predictor", to_string(ev.predictor)},
              {"eligible", ev.eligible},
              {"applied", ev.applied},
              {"criterion_used", to_string(ev.criterion_used)},
              {"regime_at_leap", to_string(ev.regime_at_leap)}};
    if (ev.eligible) {
        j["decision"] = to_json(ev.decision);
        j["displacement_norm"] = num_or_null(ev.displacement_norm);
    } else {
        j["ineligible_reason"] = ev.ineligible_reason;
    }
    return j;
}

json to_json(const ExperimentReport& r) {
    json j;
    j["task"] = r.task;
    j["seeds"] = r.seeds;
    j["single_seed"] = r.single_seed;
    j["thresholds"] = r.thresholds ? json{{"tau_low", r.thresholds->tau_low},
                                          {"tau_high", r.thresholds->tau_high}}
                                   : json(nullptr);
    j["cells"] = {{"total", r.total_cells}, {"eligible", r.eligible_cells}};

    json per_seed = json::array();
    for (const auto& s : r.regimes) {
        per_seed.push_back({{"seed", s.seed},
                            {"checkpoints", s.checkpoints},
                            {"chaotic", s.counts.chaotic},
                            {"transition", s.counts.transition},
                            {"stable", s.counts.stable},
                            {"unknown", s.counts.unknown},
                            {"chaotic_exit_step", s.chaotic_exit_step ? json(*s.chaotic_exit_step) : json(nullptr)}});
    }
    json regime_stats;
    for (const auto& [k, v] : r.regime_stats) regime_stats[k] = stats_json(v);
    j["regime_breakdown"] = {{"per_seed", per_seed}, {"summary", regime_stats}};

    json rates = json::array();
    for (const auto& e : r.rates) {
        json seeds = json::array();
        for (const auto& s : e.per_seed) {
            seeds.push_back({{"seed", s.seed}, {"accepted", s.accepted}, {"denominator", s.denominator},
                             {"rate_pct", opt_json(s.rate)}});
        }
        rates.push_back({{"regime", e.regime},
                         {"predictor", to_string(e.predictor)},
                         {"K", e.horizon},
                         {"criterion", to_string(e.criterion)},
                         {"accepted", e.accepted},
                         {"denominator", e.denominator},
                         {"ineligible", e.ineligible},
                         {"not_evaluable", e.not_evaluable},
                         {"per_seed", seeds},
                         {"mean_pct", e.stats.n ? json(e.stats.mean) : json(nullptr)},
                         {"std_pct", e.stats.n ? json(e.stats.stddev) : json(nullptr)},
                         {"cov_pct", opt_json(e.stats.cov)},
                         {"seeds_with_data", e.stats.n}});
    }
    j["acceptance"] = rates;

    json ratios;
    for (const auto& [p, rows] : r.loss_ratios) {
        json arr = json::array();
        for (const auto& row : rows) {
            arr.push_back({{"K", row.horizon},
                           {"mean_predicted", num_or_null(row.mean_predicted)},
                           {"mean_actual", num_or_null(row.mean_actual)},
                           {"ratio", num_or_null(row.ratio)},
                           {"n", row.n},
                           {"nonfinite_excluded", row.nonfinite_excluded}});
        }
        ratios[p] = arr;
    }
    j["loss_ratios"] = ratios;

    json casc = json::array();
    for (const auto& c : r.cascades) {
        casc.push_back({{"D", c.config.depth},
                        {"K", c.config.horizon},
                        {"predictor", to_string(c.predictor)},
                        {"starts", c.starts},
                        {"mean_accepted_depth", c.mean_accepted_depth},
                        {"depth_histogram", c.depth_histogram}});
    }
    j["cascades"] = {{"stable_starts", r.cascade_starts}, {"results", casc}};
    if (r.cascade_starts == 0) {
        j["cascades"]["note"] = "no stable checkpoints: cascade table empty (denominator 0)";
    }
    return j;
}

// --- text tables ------------------------------------------------------------

namespace {

std::string pm(const SeedStats& s) {
    if (s.n == 0) return "      n/a      ";
    return fmt("%6.1f", s.mean) + " ± " + fmt("%-6.1f", s.stddev);
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
}

void rate_table(std::string& out, const ExperimentReport& r, Criterion cr, const char* title) {
    std::set<PredictorId> preds;
    std::set<std::uint64_t> ks;
    for (const auto& e : r.rates) {
        preds.insert(e.predictor);
        ks.insert(e.horizon);
    }
    for (const char* regime : {"transition", "stable"}) {
        out += std::string(title) + ", " + regime + " regime (mean ± std across seeds, %)\n";
        out += pad("K", 5) + " |";
        for (PredictorId p : preds) out += pad(std::string(to_string(p)), 18);
        out += "\n";
        for (auto k : ks) {
            out += pad(std::to_string(k), 5) + " |";
            for (PredictorId p : preds) {
                const auto* e = r.find_rate(regime, p, k, cr);
                out += pad(e ? pm(e->stats) : std::string("n/a"), 18);
            }
            out += "\n";
        }
        out += "  N (evaluations, all seeds):";
        for (PredictorId p : preds) {
            std::size_t n = 0;
            if (const auto* e = r.find_rate(regime, p, *ks.begin(), cr)) n = e->denominator;
            out += " " + std::string(to_string(p)) + "=" + std::to_string(n);
        }
        out += "\n\n";
    }
}

}  // namespace

std::string format_report(const ExperimentReport& r) {
    std::string out;
    out += "Task: " + r.task + "   seeds:";
    for (auto s : r.seeds) out += " " + std::to_string(s);
    if (r.single_seed) out += "   [single seed: std reported as 0]";
    out += "\n";
    if (r.thresholds) {
        out += "Thresholds: tau_low = " + fmt("%.6f", r.thresholds->tau_low) +
               ", tau_high = " + fmt("%.6f", r.thresholds->tau_high) + "\n";
    }
    out += "Sweep cells: " + std::to_string(r.total_cells) + " (" + std::to_string(r.eligible_cells) +
           " eligible)\n\n";

    out += "Regime breakdown (checkpoints per seed, mean ± std)\n";
    out += "   Chaotic      Transition   Stable       Unknown\n";
    for (const char* l : {"chaotic", "transition", "stable", "unknown"}) {
        const auto it = r.regime_stats.find(l);
        out += " " + (it != r.regime_stats.end() ? pm(it->second) : std::string("n/a"));
    }
    out += "\n";
    for (const auto& s : r.regimes) {
        out += "  seed " + std::to_string(s.seed) + ": chaotic " + std::to_string(s.counts.chaotic) +
               ", transition " + std::to_string(s.counts.transition) + ", stable " +
               std::to_string(s.counts.stable) + ", unknown " + std::to_string(s.counts.unknown) +
               ", chaotic->transition boundary at step " +
               (s.chaotic_exit_step ? std::to_string(*s.chaotic_exit_step) : std::string("—")) + "\n";
    }
    out += "\n";

    rate_table(out, r, Criterion::strict, "Strict acceptance rate");
    rate_table(out, r, Criterion::proximity, "Proximity acceptance rate");

    out += "Predicted vs current validation loss (mean over evaluated cells)\n";
    out += "    K |        predicted         actual        ratio   n  non-finite\n";
    for (const auto& [p, rows] : r.loss_ratios) {
        out += "  [" + p + "]\n";
        for (const auto& row : rows) {
            out += pad(std::to_string(row.horizon), 5) + " | " + pad(fmt("%.4g", row.mean_predicted), 16) +
                   pad(fmt("%.4g", row.mean_actual), 15) + pad(fmt("%.4g", row.ratio), 12) + "x" +
                   pad(std::to_string(row.n), 4) + pad(std::to_string(row.nonfinite_excluded), 12) + "\n";
        }
    }
    out += "\n";

    out += "Coefficient of variation of proximity acceptance across seeds (%)\n";
    for (const char* regime : {"transition", "stable"}) {
        out += "  " + std::string(regime) + ":\n";
        std::set<std::uint64_t> ks;
        std::set<PredictorId> preds;
        for (const auto& e : r.rates) {
            ks.insert(e.horizon);
            preds.insert(e.predictor);
        }
        for (auto k : ks) {
            out += pad(std::to_string(k), 5) + " |";
            for (PredictorId p : preds) {
                if (p == PredictorId::momentum) continue;
                const auto* e = r.find_rate(regime, p, k, Criterion::proximity);
                std::string v = (e && e->stats.cov) ? fmt("%.1f%%", *e->stats.cov) : std::string("—");
                out += pad(std::string(to_string(p)) + " " + v, 24);
            }
            out += "\n";
        }
    }
    out += "\n";

    out += "Cascades from stable checkpoints (" + std::to_string(r.cascade_starts) + " starts)\n";
    if (r.cascades.empty()) {
        out += "  (empty: no stable checkpoints, denominator 0)\n";
    }
    for (const auto& c : r.cascades) {
        out += "  D=" + std::to_string(c.config.depth) + " K=" + std::to_string(c.config.horizon) + " " +
               std::string(to_string(c.predictor)) + ": starts " + std::to_string(c.starts) +
               ", mean accepted depth " + fmt("%.2f", c.mean_accepted_depth) + ", histogram [";
        for (std::size_t d = 0; d < c.depth_histogram.size(); ++d) {
            if (d) out += " ";
            out += std::to_string(c.depth_histogram[d]);
        }
        out += "]\n";
    }
    return out;
}

// --- orchestration ----------------------------------------------------------

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

Thresholds calibrate_from_runs(std::span<const RunRecord> runs, const CalibrationQuantiles& q) {
    std::vector<std::vector<double>> traces;
    for (const auto& r : runs) traces.push_back(similarity_trace(r.checkpoints));
    return calibrate(traces, q);
}

Thresholds run_calibration(const RunConfig& cfg, const ProgressFn& progress) {
    const auto task = make_task(cfg.task);
    EngineConfig ec = cfg.engine();
    if (cfg.calib_steps != 0) ec.hyper.total_steps = cfg.calib_steps;
    const auto seeds = cfg.calibration_seeds();
    std::vector<RunRecord> runs(seeds.size());
    parallel_for(seeds.size(), cfg.jobs, [&](std::size_t i) {
        runs[i] = in_pass(seeds[i], "calibration", [&] { return pass1_train(*task, seeds[i], ec); });
        if (progress) progress("calibration run for seed " + std::to_string(seeds[i]) + " done");
    });
    return calibrate_from_runs(runs, cfg.calib_quantiles);
}

ExperimentResult run_experiment(const RunConfig& cfg, const std::optional<std::filesystem::path>& root,
                                const ProgressFn& progress) {
    cfg.validate();
    const auto task = make_task(cfg.task);
    const EngineConfig ec = cfg.engine();
    const auto predictors = cfg.predictors();
    ExperimentResult res;

    res.runs.resize(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t i) {
        const auto seed = cfg.seeds[i];
        res.runs[i] = in_pass(seed, "pass 1 (train)", [&] { return pass1_train(*task, seed, ec); });
        if (progress) progress("seed " + std::to_string(seed) + ": pass 1 done");
    });

    if (auto th = cfg.explicit_thresholds()) {
        res.thresholds = *th;
    } else if (cfg.calib_seeds.empty() && (cfg.calib_steps == 0 || cfg.calib_steps == cfg.total_steps)) {
        res.thresholds = calibrate_from_runs(res.runs, cfg.calib_quantiles);
    } else {
        res.thresholds = run_calibration(cfg, progress);
    }
    if (progress) {
        progress("thresholds: tau_low=" + g17(res.thresholds->tau_low) +
                 " tau_high=" + g17(res.thresholds->tau_high));
    }
    for (auto& r : res.runs) apply_thresholds(r, *res.thresholds);

    std::vector<std::vector<SweepCell>> cells(cfg.seeds.size());
    std::vector<std::vector<CascadeRow>> casc(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t i) {
        const auto& run = res.runs[i];
        cells[i] = in_pass(run.seed, "pass 2 (K-sweep)",
                           [&] { return pass2_ksweep(*task, run, cfg.k_set, predictors, ec); });
        casc[i] = in_pass(run.seed, "pass 3 (cascades)", [&] {
            return pass3_cascades(*task, run, cfg.cascades, predictors, cfg.criterion, ec);
        });
        if (root) {
            in_pass(run.seed, "writing outputs", [&] {
                write_run(run, *root);
                const auto dir = run_directory(*root, run.task, run.seed);
                write_file_atomic(dir / "sweep.csv", sweep_to_csv(cells[i]));
                write_file_atomic(dir / "cascades.csv", cascades_to_csv(casc[i]));
                return 0;
            });
        }
        if (progress) progress("seed " + std::to_string(run.seed) + ": passes 2-3 done");
    });

    std::vector<SeedRegimeSummary> regimes;
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        regimes.push_back(summarize_regimes(res.runs[i]));
        res.cells.insert(res.cells.end(), cells[i].begin(), cells[i].end());
        res.cascades.insert(res.cascades.end(), casc[i].begin(), casc[i].end());
    }
    res.report = aggregate(res.cells, regimes, res.cascades, cfg.task.name, res.thresholds);
    if (root) write_report(res.report, cfg, *root);
    return res;
}

void write_report(const ExperimentReport& report, const RunConfig& cfg, const std::filesystem::path& root) {
    json j = to_json(report);
    json eff;
    std::istringstream in(cfg.to_text());
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) eff[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["effective_config"] = eff;
    write_file_atomic(root / "report.json", j.dump(2) + "\n");
    write_file_atomic(root / "report.txt", format_report(report));
    write_file_atomic(root / "effective_config.txt", cfg.to_text());
}

}  // namespace leapverify
