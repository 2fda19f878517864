// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssrl/forecast.hpp"
#include "ssrl/pipeline.hpp"
#include "ssrl/policy.hpp"
#include "ssrl/session.hpp"

namespace ssrl {

enum class Mode { Reactive, Proactive };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct ReplayConfig {
    Mode mode = Mode::Reactive;
    PolicyConfig policy{};
    PipelineConfig pipeline{};
    int horizon_ticks = 1;
    int lags = kDefaultLags;

    /// Proactive mode pairs only with ProactiveFull and vice versa.
    void validate() const;
};

struct SessionMetrics {
    int debugging_success = 1;
    double time_on_task_s = 0.0;
    std::vector<std::int64_t> uptake_per_feedback;
    std::int64_t uptake_total = 0;
    /// Delivered (unsuppressed) events carrying each action, A1..A5.
    std::array<std::int64_t, 5> action_counts{};
    std::int64_t suppressed = 0;
    std::int64_t delivered = 0;
};

/// Edits in [t_i, t_{i+1}) per unsuppressed event; the last interval runs to
/// the end of the session.
std::vector<std::int64_t> feedback_uptake(std::span<const FeedbackEvent> events,
                                          std::span<const CodeEditEvent> edits);

/// debugging_success = fixed bugs + 1; time on task runs from the baseline
/// end to the last timestamp.
SessionMetrics compute_metrics(const SessionRecording& rec, std::span<const FeedbackEvent> events);

/// Drives the policy over precomputed ticks. Controls at or before a tick
/// apply before it; later ones apply after the last tick.
std::vector<FeedbackEvent> run_policy(const MetricTimeline& timeline,
                                      std::span<const ControlEvent> controls,
                                      const ReplayConfig& cfg, Forecaster* forecaster = nullptr);

struct ReplayResult {
    MetricTimeline timeline;
    std::vector<FeedbackEvent> events;
    SessionMetrics metrics;
};

ReplayResult replay(const SessionRecording& rec, const ReplayConfig& cfg,
                    Forecaster* forecaster = nullptr);

// --- metrics CSV ---------------------------------------------------------------------

struct MetricsRow {
    std::string session;
    std::string condition;
    std::string mode;
    SessionMetrics metrics;
};

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out);
std::vector<MetricsRow> parse_metrics_csv(std::istream& in);

// --- synthetic behavior ---------------------------------------------------------------

/// Toy response of a dyad to delivered feedback. Alignment a(t) is the share
/// of `saturation` events delivered in the trailing window; bug fixes and
/// edits occur at rates rising linearly in a(t).
struct BehaviorModel {
    Millis window_ms = 120000;
    double saturation = 4.0;
    double fix_rate_per_min = 0.1;
    double fix_gain_per_min = 0.6;
    int max_bugs = 12;
    double edit_rate_per_min = 1.0;
    double edit_gain_per_min = 3.0;
};

/// Replaces the task segment's edits and bug fixes with ones drawn from the
/// model. The same seed gives the same underlying random draws for any event
/// log, so more delivered feedback never yields fewer fixes or edits.
SessionRecording apply_behavior(const SessionRecording& rec, std::span<const FeedbackEvent> events,
                                std::uint64_t seed, const BehaviorModel& model = {});

}  // namespace ssrl
