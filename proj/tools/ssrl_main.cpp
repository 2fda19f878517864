// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// ssrl: simulate, replay, forecast and analyze dyad sessions.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssrl/analysis.hpp"
#include "ssrl/config.hpp"
#include "ssrl/generator.hpp"
#include "ssrl/io.hpp"
#include "ssrl/pipeline.hpp"
#include "ssrl/replay.hpp"

namespace fs = std::filesystem;
using namespace ssrl;

namespace {

struct Flags {
    std::string config;
    std::string mode, condition, forecaster, out, model;
    std::optional<Millis> jva_window, jme_window, horizon;
    std::optional<double> sd_k;
    std::optional<int> persistence, cols;
    std::optional<std::uint64_t> seed;
};

void add_engine_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file (default: $SSRL_CONFIG)");
    cmd->add_option("--mode", f.mode, "reactive | proactive");
    cmd->add_option("--condition", f.condition,
                    "control | jva-only | jme-only | combined | proactive-full");
    cmd->add_option("--jva-window", f.jva_window, "JVA window / tick in ms");
    cmd->add_option("--jme-window", f.jme_window, "ME window in ms");
    cmd->add_option("--sd-k", f.sd_k, "band half-width in baseline SDs");
    cmd->add_option("--horizon", f.horizon, "forecast horizon in ms");
    cmd->add_option("--persistence", f.persistence, "ticks before escalation");
    cmd->add_option("--cols", f.cols, "attention grid columns");
    cmd->add_option("--forecaster", f.forecaster, "persistence | ar | gbstump | oracle");
    cmd->add_option("--seed", f.seed, "random seed");
}

EngineConfig resolve_config(const Flags& f) {
    ConfigLayer file;
    std::string path = f.config;
    if (path.empty()) {
        if (const char* env = std::getenv("SSRL_CONFIG"); env && *env) path = env;
    }
    if (!path.empty()) file = parse_config_layer(read_file(path));

    ConfigLayer flags;
    if (!f.mode.empty()) {
        flags.mode = parse_mode(f.mode);
        if (!flags.mode) throw DomainError("unknown mode '" + f.mode + "'");
    }
    if (!f.condition.empty()) {
        flags.condition = parse_condition(f.condition);
        if (!flags.condition) throw DomainError("unknown condition '" + f.condition + "'");
    }
    flags.jva_window_ms = f.jva_window;
    flags.jme_window_ms = f.jme_window;
    flags.sd_k = f.sd_k;
    flags.horizon_ms = f.horizon;
    flags.persistence_ticks = f.persistence;
    flags.cols = f.cols;
    if (!f.forecaster.empty()) flags.forecaster = f.forecaster;
    flags.seed = f.seed;

    auto cfg = EngineConfig::resolve(flags.over(file));
    cfg.validate();
    return cfg;
}

void make_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

fs::path require_out(const Flags& f) {
    if (f.out.empty()) throw IoError("--out is required");
    make_dir(f.out);
    return f.out;
}

template <typename Fn>
std::string to_text(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

/// Model file when given, else an untrained forecaster that needs no fitting.
std::unique_ptr<Forecaster> load_forecaster(const EngineConfig& cfg, const std::string& model,
                                            int* lags = nullptr,
                                            std::vector<std::string>* trained_on = nullptr) {
    if (!model.empty()) {
        auto m = parse_model(read_file(model));
        if (m.horizon_ticks != cfg.horizon_ticks())
            throw DomainError("model horizon is " + std::to_string(m.horizon_ticks) +
                              " ticks, config asks for " + std::to_string(cfg.horizon_ticks()));
        if (lags) *lags = m.lags;
        if (trained_on) *trained_on = m.training_sessions;
        return std::move(m.model);
    }
    if (cfg.forecaster == "ar" || cfg.forecaster == "gbstump")
        throw DomainError("forecaster '" + cfg.forecaster + "' needs a trained --model");
    return make_forecaster(cfg.forecaster, cfg.horizon_ticks());
}

struct ReplayOutputs {
    MetricsRow row;
    MetricTimeline timeline;
};

ReplayOutputs replay_one(const SessionRecording& rec, const std::string& name,
                         const EngineConfig& cfg, Forecaster* forecaster, int lags, bool behavior,
                         const fs::path& dir) {
    auto rc = cfg.replay_config();
    rc.lags = lags;
    auto result = replay(rec, rc, forecaster);
    if (behavior) {
        // Seeded per session so every condition sees the same draws for it.
        const auto seed = cfg.seed + fnv1a64(result.timeline.session_hash);
        const auto adjusted = apply_behavior(rec, result.events, seed);
        result.metrics = compute_metrics(adjusted, result.events);
    }
    write_file_atomic(dir / (name + ".events.jsonl"), event_log_string(result.events));
    write_file_atomic(dir / (name + ".ticks.csv"),
                      to_text([&](std::ostream& o) { result.timeline.write_ticks_csv(o); }));
    write_file_atomic(dir / (name + ".effort.csv"),
                      to_text([&](std::ostream& o) { result.timeline.write_effort_csv(o); }));
    return {{name, std::string(to_string(cfg.condition)), std::string(to_string(cfg.mode)),
             result.metrics},
            std::move(result.timeline)};
}

std::vector<fs::path> sessions_in(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw IoError("no .jsonl sessions in " + dir.string());
    return out;
}

// --- commands ---------------------------------------------------------------------------

int cmd_simulate(const Flags& f, const std::string& script_path, bool behavior) {
    const auto cfg = resolve_config(f);
    const auto scripts = parse_scripts(read_file(script_path));
    const auto out = require_out(f);
    make_dir(out / "sessions");
    make_dir(out / "replay");

    int lags = kDefaultLags;
    std::unique_ptr<Forecaster> forecaster;
    if (cfg.mode == Mode::Proactive) forecaster = load_forecaster(cfg, f.model, &lags);

    std::vector<MetricsRow> rows;
    nlohmann::ordered_json sessions = nlohmann::ordered_json::array();
    std::set<std::string> names;
    int expected = 0, passed = 0;
    for (std::size_t k = 0; k < scripts.size(); ++k) {
        const auto& s = scripts[k];
        const auto name = s.name.empty() ? "session-" + std::to_string(k + 1) : s.name;
        if (!names.insert(name).second) throw DomainError("duplicate script name '" + name + "'");
        const auto seed = cfg.seed + k;
        const auto rec = generate_session(s, seed);
        save_session(rec, out / "sessions" / (name + ".jsonl"));
        auto r = replay_one(rec, name, cfg, forecaster.get(), lags, behavior, out / "replay");

        std::map<int, int> counts;
        for (const auto& t : r.timeline.ticks)
            ++counts[ScenarioTable::builtin().classify(t.state.level).id];
        int modal = 0, modal_n = -1;
        for (const auto& [id, n] : counts) {
            if (n > modal_n) modal = id, modal_n = n;
        }
        nlohmann::ordered_json j;
        j["name"] = name;
        j["seed"] = seed;
        j["session_hash"] = r.timeline.session_hash;
        j["ticks"] = r.timeline.ticks.size();
        j["modal_scenario"] = modal;
        if (s.expect_scenario) {
            const int hit = counts.count(*s.expect_scenario) ? counts[*s.expect_scenario] : 0;
            const bool ok = modal == *s.expect_scenario;
            j["expected_scenario"] = *s.expect_scenario;
            j["match_fraction"] =
                r.timeline.ticks.empty() ? 0.0 : double(hit) / double(r.timeline.ticks.size());
            j["pass"] = ok;
            ++expected;
            passed += ok;
        }
        sessions.push_back(j);
        rows.push_back(std::move(r.row));
    }
    write_file_atomic(out / "metrics.csv",
                      to_text([&](std::ostream& o) { write_metrics_csv(rows, o); }));
    nlohmann::ordered_json report;
    report["config"] = nlohmann::ordered_json::parse(cfg.to_json());
    report["sessions"] = sessions;
    report["conformance"] = {{"expected", expected}, {"passed", passed}};
    write_file_atomic(out / "report.json", report.dump(2) + "\n");
    std::cout << scripts.size() << " sessions written to " << out.string();
    if (expected) std::cout << "; conformance " << passed << "/" << expected;
    std::cout << "\n";
    return 0;
}

int cmd_replay(const Flags& f, const std::vector<std::string>& paths, bool behavior) {
    const auto cfg = resolve_config(f);
    int lags = kDefaultLags;
    std::unique_ptr<Forecaster> forecaster;
    if (cfg.mode == Mode::Proactive) forecaster = load_forecaster(cfg, f.model, &lags);
    std::vector<SessionRecording> recs;
    for (const auto& p : paths) recs.push_back(load_session(p));
    const auto out = require_out(f);
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto name = fs::path(paths[i]).stem().string();
        rows.push_back(
            replay_one(recs[i], name, cfg, forecaster.get(), lags, behavior, out).row);
    }
    write_file_atomic(out / "metrics.csv",
                      to_text([&](std::ostream& o) { write_metrics_csv(rows, o); }));
    for (const auto& r : rows) {
        std::cout << r.session << ": " << r.metrics.delivered << " delivered, "
                  << r.metrics.suppressed << " suppressed, debugging_success "
                  << r.metrics.debugging_success << "\n";
    }
    return 0;
}

std::vector<MetricSeries> corpus_series(const fs::path& dir, const EngineConfig& cfg) {
    std::vector<MetricSeries> out;
    for (const auto& p : sessions_in(dir)) {
        out.push_back(compute_timeline(load_session(p), cfg.replay_config().pipeline).series());
    }
    return out;
}

int cmd_forecast_train(const Flags& f, const std::string& corpus, int lags) {
    const auto cfg = resolve_config(f);
    if (f.model.empty()) throw IoError("--model is required");
    const auto series = corpus_series(corpus, cfg);
    const auto pairs = training_pairs(series, cfg.horizon_ticks(), lags);
    auto model = make_forecaster(cfg.forecaster, cfg.horizon_ticks());
    model->fit(pairs.features, pairs.targets);
    ModelFile m;
    m.model = std::move(model);
    m.lags = lags;
    m.horizon_ticks = cfg.horizon_ticks();
    for (const auto& s : series) m.training_sessions.push_back(s.session_hash);
    write_file_atomic(f.model, serialize_model(m));
    std::cout << cfg.forecaster << " trained on " << series.size() << " sessions ("
              << pairs.features.size() << " pairs) -> " << f.model << "\n";
    return 0;
}

int cmd_forecast_eval(const Flags& f, const std::string& corpus) {
    const auto cfg = resolve_config(f);
    int lags = kDefaultLags;
    std::vector<std::string> trained_on;
    auto model = load_forecaster(cfg, f.model, &lags, &trained_on);
    const auto series = corpus_series(corpus, cfg);
    const std::set<std::string> train(trained_on.begin(), trained_on.end());
    for (const auto& s : series) {
        if (train.count(s.session_hash))
            throw DomainError("evaluation session " + s.session_hash +
                              " was used for training; train and eval sets must be disjoint");
    }
    const auto rep = evaluate(*model, series, cfg.horizon_ticks(), lags, cfg.sd_k);
    nlohmann::ordered_json j;
    j["forecaster"] = std::string(model->id());
    j["horizon_ticks"] = cfg.horizon_ticks();
    j["lags"] = lags;
    j["sessions"] = series.size();
    j["predictions"] = rep.predictions;
    for (auto m : kMetrics) {
        const auto i = static_cast<std::size_t>(m);
        j["mae"][std::string(to_string(m))] = rep.mae[i];
        j["level_accuracy"][std::string(to_string(m))] = rep.level_accuracy[i];
    }
    const auto text = j.dump(2) + "\n";
    if (!f.out.empty()) {
        write_file_atomic(f.out, text);
    } else {
        std::cout << text;
    }
    return 0;
}

int cmd_analyze(const Flags& f, const std::vector<std::string>& csvs, const std::string& metric,
                const std::string& split) {
    std::vector<MetricsRow> rows;
    for (const auto& p : csvs) {
        std::istringstream in(read_file(p));
        auto part = parse_metrics_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    AnalysisOptions opts;
    opts.metric = metric;
    if (split != "median") {
        try {
            opts.split_threshold = std::stod(split);
        } catch (const std::logic_error&) {
            throw DomainError("--split must be 'median' or a number");
        }
    }
    const auto report = analyze_report(rows, opts);
    const auto out = require_out(f);
    write_file_atomic(out / "sessions.csv",
                      to_text([&](std::ostream& o) { write_metrics_csv(rows, o); }));
    write_file_atomic(out / "report.json", report);
    std::cout << "analyzed " << rows.size() << " sessions -> " << (out / "report.json").string()
              << "\n";
    return 0;
}

int cmd_scenario_table(const std::string& action, const std::string& file) {
    if (action == "dump") {
        const auto table = file.empty() ? ScenarioTable::builtin() : ScenarioTable::load(file);
        for (const auto& r : table.rows()) {
            std::cout << r.id;
            for (auto l : r.state) std::cout << '\t' << to_string(l);
            std::cout << '\t' << to_string(r.actions);
            if (!r.starred.empty()) std::cout << "\t*" << to_string(r.starred);
            std::cout << '\n';
        }
        return 0;
    }
    const auto path = file.empty() ? std::string(SSRL_DEFAULT_TABLE) : file;
    ScenarioTable::load(path);
    std::cout << path << ": checksum ok, 22 rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ssrl: gaze and pupil driven collaboration feedback engine"};
    app.require_subcommand(1);
    Flags f;

    auto* sim = app.add_subcommand("simulate", "generate sessions from a script and replay them");
    std::string script;
    bool behavior = false;
    sim->add_option("script", script, "script or script bundle (JSON)")->required();
    sim->add_option("--out", f.out, "output directory")->required();
    sim->add_option("--model", f.model, "forecaster model file for proactive mode");
    sim->add_flag("--behavior", behavior, "apply the synthetic behavior model before metrics");
    add_engine_flags(sim, f);

    auto* rep = app.add_subcommand("replay", "replay recorded sessions through the engine");
    std::vector<std::string> sessions;
    rep->add_option("sessions", sessions, "session files (.jsonl)")->required();
    rep->add_option("--out", f.out, "output directory")->required();
    rep->add_option("--model", f.model, "forecaster model file for proactive mode");
    rep->add_flag("--behavior", behavior, "apply the synthetic behavior model before metrics");
    add_engine_flags(rep, f);

    auto* train = app.add_subcommand("forecast-train", "fit a forecaster on a session corpus");
    std::string corpus;
    int lags = kDefaultLags;
    train->add_option("corpus", corpus, "directory of session files")->required();
    train->add_option("--model", f.model, "model file to write")->required();
    train->add_option("--lags", lags, "lags per metric")->check(CLI::PositiveNumber);
    add_engine_flags(train, f);

    auto* eval = app.add_subcommand("forecast-eval", "score a forecaster on held-out sessions");
    eval->add_option("corpus", corpus, "directory of session files")->required();
    eval->add_option("--model", f.model, "model file (persistence/oracle need none)");
    eval->add_option("--out", f.out, "report file (default: stdout)");
    add_engine_flags(eval, f);

    auto* ana = app.add_subcommand("analyze", "compare conditions over metrics CSVs");
    std::vector<std::string> csvs;
    std::string metric = "debugging_success", split = "median";
    ana->add_option("metrics", csvs, "metrics CSV files")->required();
    ana->add_option("--out", f.out, "output directory")->required();
    ana->add_option("--metric", metric, "dependent variable for the condition comparison");
    ana->add_option("--split", split, "performance split: median or a fixed threshold");

    auto* tab = app.add_subcommand("scenario-table", "print or check the scenario table");
    std::string action, table_file;
    tab->add_option("action", action, "dump | validate")
        ->required()
        ->check(CLI::IsMember({"dump", "validate"}));
    tab->add_option("--file", table_file, "table CSV (default: built-in / shipped file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(f, script, behavior);
        if (rep->parsed()) return cmd_replay(f, sessions, behavior);
        if (train->parsed()) return cmd_forecast_train(f, corpus, lags);
        if (eval->parsed()) return cmd_forecast_eval(f, corpus);
        if (ana->parsed()) return cmd_analyze(f, csvs, metric, split);
        if (tab->parsed()) return cmd_scenario_table(action, table_file);
    } catch (const IoError& e) {
        std::cerr << "ssrl: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ssrl: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
