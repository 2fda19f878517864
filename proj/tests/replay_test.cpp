// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/replay.hpp"

#include <sstream>

#include <gtest/gtest.h>

using namespace ssrl;

namespace {

FeedbackEvent ev(Millis t, bool suppressed = false) {
    return {t, ActionSet{FeedbackAction::A3GazeAwareness}, {13, false}, Source::Reactive, suppressed};
}

CodeEditEvent edit(Millis t) { return {t, Participant::P1, 1}; }

Baselines unit_baselines() {
    Baselines b{};
    for (auto m : kMetrics) b[static_cast<std::size_t>(m)] = {m, 0.5, 0.1};
    return b;
}

// Ticks every 30 s starting at `start`; raw values per tick.
MetricTimeline timeline_of(const std::vector<MetricVector>& values, Millis start = 60000) {
    MetricTimeline tl;
    tl.baselines = unit_baselines();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Window w{static_cast<std::int64_t>(start / 30000 + i), start + Millis(i) * 30000,
                       start + Millis(i + 1) * 30000};
        tl.ticks.push_back({static_cast<std::int64_t>(i), make_state(w, values[i], tl.baselines)});
    }
    return tl;
}

constexpr MetricVector kAvg{0.5, 0.5, 0.5, 0.5};
constexpr MetricVector kLowJva{0.1, 0.5, 0.5, 0.5};

}  // namespace

TEST(Uptake, NoFeedbackIsEmpty) {
    const std::vector<CodeEditEvent> edits{edit(5), edit(10)};
    EXPECT_TRUE(feedback_uptake({}, edits).empty());
}

TEST(Uptake, SingleInterval) {
    const std::vector<FeedbackEvent> e{ev(0)};
    const std::vector<CodeEditEvent> edits{edit(1), edit(2), edit(3), edit(4), edit(5)};
    EXPECT_EQ(feedback_uptake(e, edits), (std::vector<std::int64_t>{5}));
}

TEST(Uptake, IntervalPartitionByHand) {
    const std::vector<FeedbackEvent> e{ev(100), ev(200)};
    const std::vector<CodeEditEvent> edits{edit(150), edit(150), edit(250)};
    EXPECT_EQ(feedback_uptake(e, edits), (std::vector<std::int64_t>{2, 1}));
}

TEST(Uptake, SuppressedEventsAttractNothing) {
    const std::vector<FeedbackEvent> e{ev(100), ev(200, true), ev(300)};
    const std::vector<CodeEditEvent> edits{edit(50), edit(100), edit(250), edit(300), edit(999)};
    EXPECT_EQ(feedback_uptake(e, edits), (std::vector<std::int64_t>{2, 2}));
}

TEST(Metrics, BugsTimeAndCounts) {
    SessionRecording rec;
    rec.header.baseline_start = 0;
    rec.header.baseline_end = 0;
    rec.bugs = {{1000, "b1"}, {2000, "b2"}, {3000, "b3"}};
    rec.edits = {edit(600000)};
    const std::vector<FeedbackEvent> e{ev(100), ev(200, true)};
    const auto m = compute_metrics(rec, e);
    EXPECT_EQ(m.debugging_success, 4);
    EXPECT_EQ(m.time_on_task_s, 600.0);
    EXPECT_EQ(m.delivered, 1);
    EXPECT_EQ(m.suppressed, 1);
    EXPECT_EQ(m.action_counts[static_cast<std::size_t>(FeedbackAction::A3GazeAwareness)], 1);
    EXPECT_EQ(m.uptake_total, 1);
}

TEST(RunPolicy, ControlEmitsNothing) {
    ReplayConfig cfg;
    cfg.policy.condition = Condition::Control;
    const auto tl = timeline_of({kLowJva, kLowJva, kAvg});
    EXPECT_TRUE(run_policy(tl, {}, cfg).empty());
}

TEST(RunPolicy, ModeAndConditionMustAgree) {
    ReplayConfig cfg;
    cfg.mode = Mode::Proactive;
    cfg.policy.condition = Condition::Combined;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.policy.condition = Condition::ProactiveFull;
    EXPECT_NO_THROW(cfg.validate());
    const auto tl = timeline_of({kAvg});
    EXPECT_THROW(run_policy(tl, {}, cfg, nullptr), DomainError);
    cfg.mode = Mode::Reactive;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(RunPolicy, PauseControlSuppressesFollowingTicks) {
    ReplayConfig cfg;
    const auto tl = timeline_of({kLowJva, kLowJva, kLowJva, kLowJva, kLowJva, kLowJva});
    // Ticks fire at 90 s, 120 s, ...; pause at 100 s covers up to 220 s.
    const std::vector<ControlEvent> controls{{100000, ControlKind::Pause}};
    const auto log = run_policy(tl, controls, cfg);
    ASSERT_EQ(log.size(), 6u);
    EXPECT_FALSE(log[0].suppressed);
    for (std::size_t i = 1; i < 5; ++i) EXPECT_TRUE(log[i].suppressed) << i;
    EXPECT_FALSE(log[5].suppressed);
}

TEST(RunPolicy, TrailingIgnoreAppliesToLastEvent) {
    ReplayConfig cfg;
    const auto tl = timeline_of({kLowJva, kLowJva});
    const std::vector<ControlEvent> controls{{999999, ControlKind::Ignore}};
    const auto log = run_policy(tl, controls, cfg);
    ASSERT_EQ(log.size(), 2u);
    EXPECT_FALSE(log[0].suppressed);
    EXPECT_TRUE(log[1].suppressed);
}

TEST(RunPolicy, ProactiveOracleSeesTheNextTick) {
    ReplayConfig cfg;
    cfg.mode = Mode::Proactive;
    cfg.policy.condition = Condition::ProactiveFull;
    const auto tl = timeline_of({kAvg, kAvg, kLowJva, kLowJva});
    OracleForecaster oracle(1);
    const auto log = run_policy(tl, {}, cfg, &oracle);
    ASSERT_EQ(log.size(), 4u);
    EXPECT_EQ(log[0].actions, ActionSet{FeedbackAction::A1DoNothing});
    // Tick 1 forecasts tick 2's low JVA.
    EXPECT_EQ(log[1].scenario.id, 12);
    EXPECT_EQ(log[1].t, tl.ticks[1].t());
}

TEST(RunPolicy, Deterministic) {
    ReplayConfig cfg;
    const auto tl = timeline_of({kLowJva, kAvg, kLowJva, {0.9, 0.9, 0.9, 0.9}});
    EXPECT_EQ(event_log_string(run_policy(tl, {}, cfg)), event_log_string(run_policy(tl, {}, cfg)));
}

TEST(MetricsCsv, RoundTrip) {
    MetricsRow r{"s1", "combined", "reactive", {}};
    r.metrics.debugging_success = 3;
    r.metrics.time_on_task_s = 312.5;
    r.metrics.uptake_per_feedback = {2, 0, 5};
    r.metrics.uptake_total = 7;
    r.metrics.action_counts = {0, 1, 2, 3, 4};
    r.metrics.delivered = 3;
    r.metrics.suppressed = 1;
    MetricsRow empty{"s2", "control", "reactive", {}};
    const std::vector<MetricsRow> rows{r, empty};
    std::ostringstream out;
    write_metrics_csv(rows, out);
    std::istringstream in(out.str());
    const auto back = parse_metrics_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].metrics.uptake_per_feedback, r.metrics.uptake_per_feedback);
    EXPECT_EQ(back[0].metrics.action_counts, r.metrics.action_counts);
    EXPECT_EQ(back[0].metrics.time_on_task_s, 312.5);
    EXPECT_TRUE(back[1].metrics.uptake_per_feedback.empty());
    std::istringstream bad("nope\n");
    EXPECT_THROW(parse_metrics_csv(bad), ParseError);
}

namespace {

SessionRecording task_only(Millis end) {
    SessionRecording rec;
    rec.header.baseline_start = 0;
    rec.header.baseline_end = 60000;
    rec.pupil = {{0, Participant::P1, 3.0}, {end, Participant::P1, 3.0}};
    return rec;
}

}  // namespace

TEST(Behavior, MoreDeliveredFeedbackNeverHurts) {
    const auto rec = task_only(1260000);
    std::vector<FeedbackEvent> some, more;
    for (Millis t = 90000; t < 1260000; t += 30000) {
        more.push_back(ev(t));
        if ((t / 30000) % 3 == 0) some.push_back(ev(t));
    }
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto none = apply_behavior(rec, {}, seed);
        const auto a = apply_behavior(rec, some, seed);
        const auto b = apply_behavior(rec, more, seed);
        EXPECT_LE(none.bugs.size(), a.bugs.size());
        EXPECT_LE(a.bugs.size(), b.bugs.size());
        EXPECT_LE(none.edits.size(), a.edits.size());
        EXPECT_LE(a.edits.size(), b.edits.size());
        EXPECT_EQ(b.last_timestamp(), rec.last_timestamp());
    }
}

TEST(Behavior, SuppressedEventsDoNotCount) {
    const auto rec = task_only(660000);
    std::vector<FeedbackEvent> muted;
    for (Millis t = 90000; t < 660000; t += 30000) muted.push_back(ev(t, true));
    const auto a = apply_behavior(rec, {}, 5);
    const auto b = apply_behavior(rec, muted, 5);
    EXPECT_EQ(serialize_session(a), serialize_session(b));
}
