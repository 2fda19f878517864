// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace ssrl {

namespace {

double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& g, double rate) { return -std::log(1.0 - unit(g)) / rate; }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Reactive ? "reactive" : "proactive"; }

std::optional<Mode> parse_mode(std::string_view s) {
    if (s == "reactive") return Mode::Reactive;
    if (s == "proactive") return Mode::Proactive;
    return std::nullopt;
}

void ReplayConfig::validate() const {
    pipeline.validate();
    if (horizon_ticks < 1) throw DomainError("horizon must be at least one tick");
    if (lags < 1) throw DomainError("lags must be at least 1");
    if (policy.persistence_ticks < 1) throw DomainError("persistence must be at least 1 tick");
    const bool proactive_condition = policy.condition == Condition::ProactiveFull;
    if ((mode == Mode::Proactive) != proactive_condition) {
        throw DomainError("mode " + std::string(to_string(mode)) + " does not run condition " +
                          std::string(to_string(policy.condition)));
    }
}

std::vector<std::int64_t> feedback_uptake(std::span<const FeedbackEvent> events,
                                          std::span<const CodeEditEvent> edits) {
    std::vector<Millis> starts;
    for (const auto& e : events) {
        if (!e.suppressed) starts.push_back(e.t);
    }
    std::vector<std::int64_t> out(starts.size(), 0);
    for (const auto& ed : edits) {
        const auto it = std::upper_bound(starts.begin(), starts.end(), ed.t);
        if (it == starts.begin()) continue;  // before the first feedback
        ++out[static_cast<std::size_t>(std::distance(starts.begin(), it) - 1)];
    }
    return out;
}

SessionMetrics compute_metrics(const SessionRecording& rec, std::span<const FeedbackEvent> events) {
    SessionMetrics m;
    m.debugging_success = static_cast<int>(rec.bugs.size()) + 1;
    m.time_on_task_s = double(rec.last_timestamp() - rec.header.baseline_end) / 1000.0;
    m.uptake_per_feedback = feedback_uptake(events, rec.edits);
    for (auto u : m.uptake_per_feedback) m.uptake_total += u;
    for (const auto& e : events) {
        if (e.suppressed) {
            ++m.suppressed;
            continue;
        }
        ++m.delivered;
        for (auto a : e.actions.list()) ++m.action_counts[static_cast<std::size_t>(a)];
    }
    return m;
}

std::vector<FeedbackEvent> run_policy(const MetricTimeline& timeline,
                                      std::span<const ControlEvent> controls,
                                      const ReplayConfig& cfg, Forecaster* forecaster) {
    cfg.validate();
    const bool proactive = cfg.mode == Mode::Proactive;
    if (proactive && forecaster == nullptr) throw DomainError("proactive replay needs a forecaster");

    const auto series = timeline.series();
    const auto pad = series.baseline_means();
    if (proactive) forecaster->begin_session(series);

    PolicyState ps;
    std::size_t next_control = 0;
    for (std::size_t i = 0; i < timeline.ticks.size(); ++i) {
        const auto& tick = timeline.ticks[i];
        while (next_control < controls.size() && controls[next_control].t <= tick.t()) {
            apply_control(controls[next_control++], ps, cfg.policy);
        }
        if (!proactive) {
            reactive_step(tick.state, ps, cfg.policy);
            continue;
        }
        const std::span<const MetricVector> history(series.values.data(), i + 1);
        const auto f = forecaster->predict(build_features(history, tick.index, pad, cfg.lags));
        const Millis shift = cfg.horizon_ticks * tick.state.window.duration();
        const Window ahead{tick.state.window.index + cfg.horizon_ticks,
                           tick.state.window.start + shift, tick.state.window.end + shift};
        proactive_step(make_state(ahead, f, timeline.baselines, cfg.pipeline.sd_k), tick.t(), ps,
                       cfg.policy);
    }
    while (next_control < controls.size()) apply_control(controls[next_control++], ps, cfg.policy);
    return ps.log;
}

ReplayResult replay(const SessionRecording& rec, const ReplayConfig& cfg, Forecaster* forecaster) {
    cfg.validate();
    ReplayResult r;
    r.timeline = compute_timeline(rec, cfg.pipeline);
    r.events = run_policy(r.timeline, rec.controls, cfg, forecaster);
    r.metrics = compute_metrics(rec, r.events);
    return r;
}

// --- metrics CSV ------------------------------------------------------------------------

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out) {
    out << "session,condition,mode,debugging_success,time_on_task_s,uptake_total,delivered,"
           "suppressed,a1,a2,a3,a4,a5,uptake_per_feedback\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        char tot[32];
        std::snprintf(tot, sizeof tot, "%.3f", m.time_on_task_s);
        out << r.session << ',' << r.condition << ',' << r.mode << ',' << m.debugging_success << ','
            << tot << ',' << m.uptake_total << ',' << m.delivered << ',' << m.suppressed;
        for (auto c : m.action_counts) out << ',' << c;
        out << ',';
        for (std::size_t i = 0; i < m.uptake_per_feedback.size(); ++i) {
            if (i) out << ';';
            out << m.uptake_per_feedback[i];
        }
        out << '\n';
    }
}

std::vector<MetricsRow> parse_metrics_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(1, "metrics csv: empty");
    if (line.rfind("session,condition,mode,debugging_success", 0) != 0)
        throw ParseError(1, "metrics csv: unexpected header");
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 14) throw ParseError(lineno, "metrics csv: expected 14 fields");
        MetricsRow r;
        try {
            r.session = f[0];
            r.condition = f[1];
            r.mode = f[2];
            auto& m = r.metrics;
            m.debugging_success = std::stoi(f[3]);
            m.time_on_task_s = std::stod(f[4]);
            m.uptake_total = std::stoll(f[5]);
            m.delivered = std::stoll(f[6]);
            m.suppressed = std::stoll(f[7]);
            for (std::size_t a = 0; a < 5; ++a) m.action_counts[a] = std::stoll(f[8 + a]);
            if (!f[13].empty()) {
                for (const auto& u : split(f[13], ';')) m.uptake_per_feedback.push_back(std::stoll(u));
            }
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "metrics csv: bad number");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

// --- behavior model ----------------------------------------------------------------------

SessionRecording apply_behavior(const SessionRecording& rec, std::span<const FeedbackEvent> events,
                                std::uint64_t seed, const BehaviorModel& model) {
    std::vector<Millis> delivered;
    for (const auto& e : events) {
        if (!e.suppressed) delivered.push_back(e.t);
    }
    std::sort(delivered.begin(), delivered.end());
    const auto alignment = [&](Millis t) {
        const auto hi = std::upper_bound(delivered.begin(), delivered.end(), t);
        const auto lo = std::upper_bound(delivered.begin(), delivered.end(), t - model.window_ms);
        return std::min(1.0, double(std::distance(lo, hi)) / model.saturation);
    };

    const Millis start = rec.header.baseline_end;
    const Millis end = rec.last_timestamp();
    SessionRecording out = rec;
    std::erase_if(out.edits, [&](const CodeEditEvent& e) { return e.t >= start; });
    std::erase_if(out.bugs, [&](const BugEvent& b) { return b.t >= start; });

    // Fixes: integrated hazard crossing unit-exponential thresholds.
    std::mt19937_64 fix_rng(seed);
    std::vector<double> thresholds;
    double acc = 0.0;
    for (int i = 0; i < model.max_bugs; ++i) thresholds.push_back(acc += exponential(fix_rng, 1.0));
    double hazard = 0.0;
    std::size_t fixed = 0;
    constexpr Millis kStep = 1000;
    for (Millis t = start; t + kStep <= end && fixed < thresholds.size(); t += kStep) {
        hazard += (model.fix_rate_per_min + model.fix_gain_per_min * alignment(t)) * kStep / 60000.0;
        while (fixed < thresholds.size() && hazard >= thresholds[fixed]) {
            out.bugs.push_back({t + kStep, "bug-" + std::to_string(++fixed)});
        }
    }

    // Edits: thinning of a process at the maximum rate.
    std::mt19937_64 edit_rng(seed ^ 0x9E3779B97F4A7C15ULL);
    const double max_rate = model.edit_rate_per_min + model.edit_gain_per_min;
    if (max_rate > 0) {
        for (double t = double(start) + exponential(edit_rng, max_rate / 60000.0); t < double(end);
             t += exponential(edit_rng, max_rate / 60000.0)) {
            const double u = unit(edit_rng);
            const auto who = static_cast<Participant>(unit(edit_rng) < 0.5 ? 0 : 1);
            const int lines = 1 + static_cast<int>(unit(edit_rng) * 5);
            const auto tm = static_cast<Millis>(t);
            if (u * max_rate < model.edit_rate_per_min + model.edit_gain_per_min * alignment(tm)) {
                out.edits.push_back({tm, who, lines});
            }
        }
    }
    validate(out);
    return out;
}

}  // namespace ssrl
