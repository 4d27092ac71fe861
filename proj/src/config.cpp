// Copyright (c) 2026, leapverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "leapverify/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace leapverify {

std::string_view to_string(QuadVariant q) {
    switch (q) {
        case QuadVariant::paper: return "paper";
        case QuadVariant::exact: return "exact";
        case QuadVariant::both: return "both";
    }
    return "?";
}

QuadVariant parse_quad_variant(std::string_view name) {
    if (name == "paper") return QuadVariant::paper;
    if (name == "exact") return QuadVariant::exact;
    if (name == "both") return QuadVariant::both;
    throw ConfigError("unknown quad variant '" + std::string(name) + "'");
}

double default_lr(std::string_view task) {
    if (task == "quad-bowl") return 0.05;
    if (task == "mlp-reg") return 3e-3;
    if (task == "char-seq") return 1e-2;
    return 5e-5;
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.begin();
    auto e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return std::string(b, e);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        auto piece = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + t + "'");
    }
    return v;
}

double to_f64(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(key) + ": expected a finite number, got '" + t + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + t + "'");
}

std::string fmt_f64(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<std::uint64_t>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(xs[i]);
    }
    return s;
}

template <class F>
auto wrap(std::string_view key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define LV_SIZE(name, member)                                                               \
    Field{name, [](RunConfig& c, std::string_view v) { c.member = to_u64(name, v); },       \
          [](const RunConfig& c) { return std::to_string(c.member); }}
#define LV_F64(name, member)                                                                \
    Field{name, [](RunConfig& c, std::string_view v) { c.member = to_f64(name, v); },       \
          [](const RunConfig& c) { return fmt_f64(c.member); }}
#define LV_OPT_F64(name, member)                                                            \
    Field{name,                                                                             \
          [](RunConfig& c, std::string_view v) {                                            \
              const auto t = trim(v);                                                       \
              if (t.empty() || t == "auto") c.member.reset();                               \
              else c.member = to_f64(name, t);                                              \
          },                                                                                \
          [](const RunConfig& c) { return c.member ? fmt_f64(*c.member) : std::string("auto"); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        Field{"task", [](RunConfig& c, std::string_view v) { c.task.name = trim(v); },
              [](const RunConfig& c) { return c.task.name; }},
        LV_SIZE("data_seed", task.data_seed),
        LV_SIZE("batch_size", task.batch_size),
        LV_SIZE("probe_count", task.probe_count),
        LV_SIZE("bowl_dim", task.bowl_dim),
        LV_F64("bowl_curv_min", task.bowl_curv_min),
        LV_F64("bowl_curv_max", task.bowl_curv_max),
        LV_F64("bowl_noise", task.bowl_noise),
        LV_F64("bowl_init_scale", task.bowl_init_scale),
        LV_SIZE("mlp_input", task.mlp_input),
        LV_SIZE("mlp_hidden", task.mlp_hidden),
        LV_SIZE("mlp_output", task.mlp_output),
        LV_SIZE("mlp_train_size", task.mlp_train_size),
        LV_SIZE("mlp_val_size", task.mlp_val_size),
        LV_F64("mlp_label_noise", task.mlp_label_noise),
        LV_SIZE("seq_vocab", task.seq_vocab),
        LV_SIZE("seq_context", task.seq_context),
        LV_SIZE("seq_embed", task.seq_embed),
        LV_SIZE("seq_hidden", task.seq_hidden),
        LV_SIZE("seq_train_size", task.seq_train_size),
        LV_SIZE("seq_val_size", task.seq_val_size),
        Field{"seeds", [](RunConfig& c, std::string_view v) { c.seeds = wrap("seeds", [&] { return parse_u64_list(v); }); },
              [](const RunConfig& c) { return fmt_list(c.seeds); }},
        LV_SIZE("steps", total_steps),
        LV_SIZE("delta", delta),
        LV_OPT_F64("lr", lr),
        LV_F64("beta1", beta1),
        LV_F64("beta2", beta2),
        LV_F64("weight_decay", weight_decay),
        LV_F64("eps", eps),
        LV_SIZE("warmup", warmup),
        LV_OPT_F64("tau_low", tau_low),
        LV_OPT_F64("tau_high", tau_high),
        LV_F64("calib_q_low", calib_quantiles.low),
        LV_F64("calib_q_high", calib_quantiles.high),
        Field{"calib_seeds",
              [](RunConfig& c, std::string_view v) {
                  c.calib_seeds = trim(v).empty() || trim(v) == "auto"
                                      ? std::vector<std::uint64_t>{}
                                      : wrap("calib_seeds", [&] { return parse_u64_list(v); });
              },
              [](const RunConfig& c) { return c.calib_seeds.empty() ? std::string("auto") : fmt_list(c.calib_seeds); }},
        LV_SIZE("calib_steps", calib_steps),
        Field{"k_set", [](RunConfig& c, std::string_view v) { c.k_set = wrap("k_set", [&] { return parse_u64_list(v); }); },
              [](const RunConfig& c) { return fmt_list(c.k_set); }},
        LV_F64("epsilon", epsilon),
        LV_SIZE("adaptive_window", adaptive_window),
        Field{"criterion",
              [](RunConfig& c, std::string_view v) { c.criterion = wrap("criterion", [&] { return parse_criterion(trim(v)); }); },
              [](const RunConfig& c) { return std::string(to_string(c.criterion)); }},
        Field{"cascades",
              [](RunConfig& c, std::string_view v) { c.cascades = wrap("cascades", [&] { return parse_cascades(v); }); },
              [](const RunConfig& c) {
                  std::string s;
                  for (std::size_t i = 0; i < c.cascades.size(); ++i) {
                      if (i) s += ",";
                      s += std::to_string(c.cascades[i].depth) + "x" + std::to_string(c.cascades[i].horizon);
                  }
                  return s;
              }},
        Field{"momentum_variant",
              [](RunConfig& c, std::string_view v) {
                  c.momentum_variant = wrap("momentum_variant", [&] { return parse_momentum_variant(trim(v)); });
              },
              [](const RunConfig& c) { return std::string(to_string(c.momentum_variant)); }},
        Field{"quad_variant",
              [](RunConfig& c, std::string_view v) { c.quad_variant = parse_quad_variant(trim(v)); },
              [](const RunConfig& c) { return std::string(to_string(c.quad_variant)); }},
        Field{"ff_policy",
              [](RunConfig& c, std::string_view v) { c.ff_policy = wrap("ff_policy", [&] { return parse_ff_policy(trim(v)); }); },
              [](const RunConfig& c) { return std::string(to_string(c.ff_policy)); }},
        Field{"regime_gating", [](RunConfig& c, std::string_view v) { c.regime_gating = to_bool("regime_gating", v); },
              [](const RunConfig& c) { return std::string(c.regime_gating ? "true" : "false"); }},
        Field{"live_predictor",
              [](RunConfig& c, std::string_view v) { c.live_predictor = wrap("live_predictor", [&] { return parse_predictor(trim(v)); }); },
              [](const RunConfig& c) { return std::string(to_string(c.live_predictor)); }},
        LV_SIZE("live_k", live_k),
        Field{"out", [](RunConfig& c, std::string_view v) { c.out = trim(v); },
              [](const RunConfig& c) { return c.out.string(); }},
        LV_SIZE("jobs", jobs),
    };
    return table;
}

#undef LV_SIZE
#undef LV_F64
#undef LV_OPT_F64

}  // namespace

std::vector<std::uint64_t> parse_u64_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split(text, ',')) {
        const auto dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const auto lo = to_u64("range", item.substr(0, dash));
            const auto hi = to_u64("range", item.substr(dash + 1));
            if (hi < lo) throw ConfigError("descending range '" + item + "'");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(to_u64("list", item));
        }
    }
    return out;
}

std::vector<CascadeConfig> parse_cascades(std::string_view text) {
    std::vector<CascadeConfig> out;
    for (const auto& item : split(text, ',')) {
        const auto x = item.find_first_of("xX");
        if (x == std::string::npos) {
            throw ConfigError("cascade '" + item + "': expected DxK");
        }
        out.push_back({to_u64("cascade depth", item.substr(0, x)), to_u64("cascade K", item.substr(x + 1))});
    }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.emplace_back(f.key);
    return keys;
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const std::string k = trim(key);
    for (const auto& f : fields()) {
        if (k == f.key) {
            f.set(*this, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + k + "'");
}

std::string RunConfig::to_text() const {
    std::string s;
    for (const auto& f : fields()) {
        s += f.key;
        s += " = ";
        s += f.get(*this);
        s += "\n";
    }
    return s;
}

void RunConfig::validate() const {
    const auto names = builtin_task_names();
    if (std::find(names.begin(), names.end(), task.name) == names.end()) {
        throw ConfigError("unknown task '" + task.name + "'");
    }
    if (seeds.empty()) throw ConfigError("seeds: at least one seed required");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds: duplicates");
    }
    if (delta == 0) throw ConfigError("delta must be >= 1");
    if (total_steps < delta) throw ConfigError("steps must be >= delta");
    if (k_set.empty()) throw ConfigError("k_set: at least one K required");
    for (auto k : k_set) {
        if (k == 0) throw ConfigError("k_set: K must be >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
    if (adaptive_window < 2) throw ConfigError("adaptive_window must be >= 2");
    for (const auto& c : cascades) {
        if (c.depth == 0 || c.horizon == 0) throw ConfigError("cascades: D and K must be >= 1");
    }
    if (tau_low.has_value() != tau_high.has_value()) {
        throw ConfigError("tau_low and tau_high must be given together");
    }
    if (tau_low) {
        try {
            Thresholds{*tau_low, *tau_high}.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (!(calib_quantiles.low >= 0.0 && calib_quantiles.high <= 1.0 &&
          calib_quantiles.low < calib_quantiles.high)) {
        throw ConfigError("calibration quantiles must satisfy 0 <= low < high <= 1");
    }
    if (live_k == 0) throw ConfigError("live_k must be >= 1");
    if (jobs == 0) throw ConfigError("jobs must be >= 1");
    try {
        engine().hyper.validate();
        make_task(task);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

double RunConfig::effective_lr() const { return lr.value_or(default_lr(task.name)); }

std::optional<Thresholds> RunConfig::explicit_thresholds() const {
    if (tau_low && tau_high) return Thresholds{*tau_low, *tau_high};
    return std::nullopt;
}

EngineConfig RunConfig::engine() const {
    EngineConfig e;
    e.hyper.lr = effective_lr();
    e.hyper.beta1 = beta1;
    e.hyper.beta2 = beta2;
    e.hyper.weight_decay = weight_decay;
    e.hyper.eps = eps;
    e.hyper.warmup_steps = warmup;
    e.hyper.total_steps = total_steps;
    e.delta = delta;
    e.adaptive_window = adaptive_window;
    e.epsilon = epsilon;
    e.momentum_variant = momentum_variant;
    e.regime_gating = regime_gating;
    e.criterion = criterion;
    e.ff_policy = ff_policy;
    return e;
}

std::vector<PredictorId> RunConfig::predictors() const {
    std::vector<PredictorId> out{PredictorId::momentum, PredictorId::linear};
    if (quad_variant != QuadVariant::exact) out.push_back(PredictorId::quadratic);
    if (quad_variant != QuadVariant::paper) out.push_back(PredictorId::quadratic_exact);
    return out;
}

std::vector<std::uint64_t> RunConfig::calibration_seeds() const {
    return calib_seeds.empty() ? seeds : calib_seeds;
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            c.set(t.substr(0, eq), t.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace leapverify
