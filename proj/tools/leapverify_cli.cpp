// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0
//
// leapverify command-line driver.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "leapverify/config.hpp"
#include "leapverify/harness.hpp"

namespace fs = std::filesystem;
using namespace leapverify;
using nlohmann::json;

namespace {

struct Options {
    std::string config_file;
    std::map<std::string, std::string> flags;  // config key -> value
    std::vector<std::string> sets;
    bool force = false;
    bool quiet = false;
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig build_config(const Options& o) {
    RunConfig cfg;
    bool file_sets_out = false;
    if (!o.config_file.empty()) {
        const std::string text = read_text(o.config_file);
        cfg = parse_config(text);
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) {
            const auto k = line.find_first_not_of(" \t");
            if (k != std::string::npos && line.compare(k, 3, "out") == 0 &&
                line.find_first_not_of(" \t", k + 3) != std::string::npos &&
                line[line.find_first_not_of(" \t", k + 3)] == '=') {
                file_sets_out = true;
            }
        }
    }
    if (const char* env = std::getenv("LEAPVERIFY_OUT"); env && *env && !file_sets_out) cfg.out = env;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [k, v] : o.flags) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

ProgressFn progress_fn(const Options& o) {
    if (o.quiet) return {};
    return [](const std::string& msg) { std::cerr << "[leapverify] " << msg << "\n"; };
}

bool dir_has_entries(const fs::path& p) {
    return fs::exists(p) && fs::is_directory(p) && !fs::is_empty(p);
}

void claim_output(const fs::path& out, bool force) {
    if (dir_has_entries(out) && !force) {
        throw std::runtime_error("output directory '" + out.string() +
                                 "' already exists and is not empty (use --force to reuse it)");
    }
    fs::create_directories(out);
}

void refuse_overwrite(const fs::path& file, bool force) {
    if (fs::exists(file) && !force) {
        throw std::runtime_error("'" + file.string() + "' already exists (use --force to overwrite)");
    }
}

fs::path thresholds_file(const RunConfig& cfg) { return cfg.out / "thresholds.json"; }

void write_thresholds(const RunConfig& cfg, const Thresholds& th) {
    json j = {{"tau_low", th.tau_low},
              {"tau_high", th.tau_high},
              {"quantiles", {cfg.calib_quantiles.low, cfg.calib_quantiles.high}}};
    write_file_atomic(thresholds_file(cfg), j.dump(2) + "\n");
}

std::optional<Thresholds> stored_thresholds(const RunConfig& cfg) {
    if (auto th = cfg.explicit_thresholds()) return th;
    std::ifstream in(thresholds_file(cfg));
    if (!in) return std::nullopt;
    const json j = json::parse(in);
    Thresholds th{j.at("tau_low").get<double>(), j.at("tau_high").get<double>()};
    th.validate();
    return th;
}

void print_thresholds(const Thresholds& th) {
    std::printf("tau_low  = %.17g\ntau_high = %.17g\n", th.tau_low, th.tau_high);
}

std::vector<RunRecord> load_runs(const RunConfig& cfg) {
    std::vector<RunRecord> runs;
    for (auto seed : cfg.seeds) {
        const auto dir = run_directory(cfg.out, cfg.task.name, seed);
        if (!fs::exists(dir)) {
            throw std::runtime_error("seed " + std::to_string(seed) + ": no run directory at '" +
                                     dir.string() + "' (run `train` first)");
        }
        runs.push_back(read_run(cfg.out, cfg.task.name, seed));
    }
    return runs;
}

// --- subcommands ------------------------------------------------------------

int cmd_calibrate(const Options& o) {
    const RunConfig cfg = build_config(o);
    claim_output(cfg.out, o.force);
    Thresholds th;
    if (auto explicit_th = cfg.explicit_thresholds()) {
        th = *explicit_th;
    } else {
        th = run_calibration(cfg, progress_fn(o));
    }
    write_thresholds(cfg, th);
    write_file_atomic(cfg.out / "effective_config.txt", cfg.to_text());
    print_thresholds(th);
    return 0;
}

int cmd_train(const Options& o) {
    const RunConfig cfg = build_config(o);
    const auto th_before = stored_thresholds(cfg);
    if (fs::exists(run_directory(cfg.out, cfg.task.name, cfg.seeds.front())) && !o.force) {
        throw std::runtime_error("runs already exist under '" + cfg.out.string() +
                                 "' (use --force to overwrite)");
    }
    fs::create_directories(cfg.out);
    const auto task = make_task(cfg.task);
    const EngineConfig ec = cfg.engine();
    std::vector<RunRecord> runs(cfg.seeds.size());
    const auto progress = progress_fn(o);
    parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t i) {
        try {
            runs[i] = pass1_train(*task, cfg.seeds[i], ec);
        } catch (const std::exception& e) {
            throw std::runtime_error("seed " + std::to_string(cfg.seeds[i]) + ", pass 1 (train): " + e.what());
        }
        if (progress) progress("seed " + std::to_string(cfg.seeds[i]) + ": pass 1 done");
    });
    const Thresholds th = th_before ? *th_before : calibrate_from_runs(runs, cfg.calib_quantiles);
    if (!th_before) write_thresholds(cfg, th);
    for (auto& r : runs) {
        apply_thresholds(r, th);
        write_run(r, cfg.out);
        const auto s = summarize_regimes(r);
        std::printf("seed %llu: %zu checkpoints (chaotic %zu, transition %zu, stable %zu, unknown %zu)\n",
                    static_cast<unsigned long long>(r.seed), s.checkpoints, s.counts.chaotic,
                    s.counts.transition, s.counts.stable, s.counts.unknown);
    }
    write_file_atomic(cfg.out / "effective_config.txt", cfg.to_text());
    return 0;
}

int cmd_sweep(const Options& o) {
    const RunConfig cfg = build_config(o);
    const auto task = make_task(cfg.task);
    const auto runs = load_runs(cfg);
    const auto predictors = cfg.predictors();
    const EngineConfig ec = cfg.engine();
    for (const auto& r : runs) refuse_overwrite(run_directory(cfg.out, r.task, r.seed) / "sweep.csv", o.force);
    parallel_for(runs.size(), cfg.jobs, [&](std::size_t i) {
        const auto& r = runs[i];
        std::vector<SweepCell> cells;
        try {
            cells = pass2_ksweep(*task, r, cfg.k_set, predictors, ec);
        } catch (const std::exception& e) {
            throw std::runtime_error("seed " + std::to_string(r.seed) + ", pass 2 (K-sweep): " + e.what());
        }
        write_file_atomic(run_directory(cfg.out, r.task, r.seed) / "sweep.csv", sweep_to_csv(cells));
        std::printf("seed %llu: %zu sweep cells\n", static_cast<unsigned long long>(r.seed), cells.size());
    });
    return 0;
}

int cmd_cascade(const Options& o) {
    const RunConfig cfg = build_config(o);
    const auto task = make_task(cfg.task);
    const auto runs = load_runs(cfg);
    const auto predictors = cfg.predictors();
    const EngineConfig ec = cfg.engine();
    for (const auto& r : runs) refuse_overwrite(run_directory(cfg.out, r.task, r.seed) / "cascades.csv", o.force);
    parallel_for(runs.size(), cfg.jobs, [&](std::size_t i) {
        const auto& r = runs[i];
        std::vector<CascadeRow> rows;
        try {
            rows = pass3_cascades(*task, r, cfg.cascades, predictors, cfg.criterion, ec);
        } catch (const std::exception& e) {
            throw std::runtime_error("seed " + std::to_string(r.seed) + ", pass 3 (cascades): " + e.what());
        }
        write_file_atomic(run_directory(cfg.out, r.task, r.seed) / "cascades.csv", cascades_to_csv(rows));
        std::printf("seed %llu: %zu cascade evaluations\n", static_cast<unsigned long long>(r.seed), rows.size());
    });
    return 0;
}

int cmd_report(const Options& o) {
    const RunConfig cfg = build_config(o);
    const auto task = make_task(cfg.task);
    const auto runs = load_runs(cfg);
    std::vector<SweepCell> cells;
    std::vector<SeedRegimeSummary> regimes;
    std::vector<CascadeRow> cascades;
    const auto predictors = cfg.predictors();
    const EngineConfig ec = cfg.engine();
    for (const auto& r : runs) {
        const auto dir = run_directory(cfg.out, r.task, r.seed);
        auto sc = sweep_from_csv(read_text(dir / "sweep.csv"), cfg.epsilon);
        cells.insert(cells.end(), sc.begin(), sc.end());
        regimes.push_back(summarize_regimes(r));
        // Cascade rows carry per-stage detail that the CSV flattens; they are
        // recomputed from the stored checkpoints (deterministic).
        auto rows = pass3_cascades(*task, r, cfg.cascades, predictors, cfg.criterion, ec);
        cascades.insert(cascades.end(), rows.begin(), rows.end());
    }
    const auto report = aggregate(cells, regimes, cascades, cfg.task.name, stored_thresholds(cfg));
    write_report(report, cfg, cfg.out);
    std::fputs(format_report(report).c_str(), stdout);
    return 0;
}

int cmd_live(const Options& o) {
    const RunConfig cfg = build_config(o);
    claim_output(cfg.out, o.force);
    auto th = stored_thresholds(cfg);
    if (!th) th = run_calibration(cfg, progress_fn(o));
    write_thresholds(cfg, *th);
    write_file_atomic(cfg.out / "effective_config.txt", cfg.to_text());
    const auto task = make_task(cfg.task);
    const EngineConfig ec = cfg.engine();
    const LeapPlan plan{cfg.live_predictor, cfg.live_k, false};
    json summary = json::array();
    for (auto seed : cfg.seeds) {
        const auto dir = run_directory(cfg.out, cfg.task.name, seed);
        fs::create_directories(dir);
        std::ofstream log(dir / "events.jsonl", std::ios::trunc);
        TrainingRun run(*task, seed, ec, th, dir);
        try {
            run.run(plan, [&](const LeapEvent& ev) {
                log << to_json(ev).dump() << "\n";
                log.flush();
            });
        } catch (const std::exception& e) {
            throw std::runtime_error("seed " + std::to_string(seed) + ", live run: " + e.what());
        }
        std::size_t accepted = 0, eligible = 0;
        for (const auto& ev : run.events()) {
            eligible += ev.eligible;
            accepted += ev.applied;
        }
        const double final_loss = task->validation_loss(run.params());
        summary.push_back({{"seed", seed},
                           {"events", run.events().size()},
                           {"eligible", eligible},
                           {"accepted", accepted},
                           {"skipped_steps", run.skipped_steps()},
                           {"final_step", run.step()},
                           {"final_val_loss", final_loss}});
        std::printf("seed %llu: %zu leaps accepted of %zu eligible, %llu steps skipped, final val loss %.6g\n",
                    static_cast<unsigned long long>(seed), accepted, eligible,
                    static_cast<unsigned long long>(run.skipped_steps()), final_loss);
    }
    write_file_atomic(cfg.out / "live_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_run_all(const Options& o) {
    const RunConfig cfg = build_config(o);
    claim_output(cfg.out, o.force);
    const auto res = run_experiment(cfg, cfg.out, progress_fn(o));
    write_thresholds(cfg, *res.thresholds);
    std::fputs(format_report(res.report).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leapverify: verify-then-accept weight extrapolation experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config_file, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--set", o.sets, "override any config key (key=value), repeatable");
    app.add_flag("--force", o.force, "reuse or overwrite existing outputs");
    app.add_flag("-q,--quiet", o.quiet, "no progress messages");

    const std::vector<std::pair<std::string, std::string>> mapped = {
        {"--task", "task"},
        {"--seeds", "seeds"},
        {"--steps", "steps"},
        {"--delta", "delta"},
        {"--lr", "lr"},
        {"--k-set", "k_set"},
        {"--epsilon", "epsilon"},
        {"--criterion", "criterion"},
        {"--momentum-variant", "momentum_variant"},
        {"--quad-variant", "quad_variant"},
        {"--ff-policy", "ff_policy"},
        {"--tau-low", "tau_low"},
        {"--tau-high", "tau_high"},
        {"--out", "out"},
        {"--jobs", "jobs"},
        {"--predictor", "live_predictor"},
        {"--k", "live_k"},
    };
    for (const auto& [flag, key] : mapped) {
        app.add_option_function<std::string>(
            flag, [&o, key = key](const std::string& v) { o.flags[key] = v; }, "sets `" + key + "`");
    }

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const Options&);
    };
    const Sub subs[] = {
        {"calibrate", "train calibration seeds and write thresholds.json", cmd_calibrate},
        {"train", "pass 1: train seeds with checkpoints and regime labels", cmd_train},
        {"sweep", "pass 2: offline K-sweep over stored runs", cmd_sweep},
        {"cascade", "pass 3: cascades from stable checkpoints", cmd_cascade},
        {"live", "train with leaps applied on acceptance; writes events.jsonl", cmd_live},
        {"report", "aggregate stored sweeps into report.json / report.txt", cmd_report},
        {"run-all", "passes 1-3 plus report", cmd_run_all},
    };
    int (*chosen)(const Options&) = nullptr;
    for (const auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        sc->fallthrough();
        sc->callback([&chosen, fn = s.fn] { chosen = fn; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return chosen(o);
    } catch (const ConfigError& e) {
        std::cerr << "leapverify: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "leapverify: " << e.what() << "\n";
        return 1;
    }
}
