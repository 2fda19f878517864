// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/pipeline.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ssrl/generator.hpp"

using namespace ssrl;

namespace {

ScenarioScript short_script(std::array<Level, 4> target = {Level::L, Level::AVG, Level::H,
                                                           Level::AVG}) {
    ScenarioScript s;
    s.name = "short";
    s.segments.push_back({150000, target, std::nullopt, 2.0, {60000}});
    return s;
}

const SessionRecording& session() {
    static const auto rec = generate_session(short_script(), 11);
    return rec;
}

}  // namespace

TEST(Timeline, WindowsTicksAndRanges) {
    const auto tl = compute_timeline(session());
    // 30 s anchor + 180 s rest + 150 s task.
    EXPECT_EQ(tl.me.size(), 36u);
    EXPECT_EQ(tl.jva.size(), 12u);
    ASSERT_EQ(tl.ticks.size(), 5u);
    EXPECT_EQ(tl.ticks.front().t(), 240000);
    EXPECT_EQ(tl.ticks.back().t(), 360000);
    for (int p = 0; p < 2; ++p) {
        EXPECT_EQ(tl.me_range[p][0], 0.0);
        EXPECT_EQ(tl.me_range[p][1], 1.8);
    }
}

TEST(Timeline, BaselinesComeFromTheRestSegmentOnly) {
    const auto tl = compute_timeline(session());
    std::set<double> p1;
    for (const auto& mw : tl.me) {
        if (mw.rest) p1.insert(mw.me[0]);
    }
    EXPECT_EQ(p1, (std::set<double>{0.3, 0.5, 0.7}));
    EXPECT_NEAR(tl.baselines[2].mean, 0.5, 1e-12);
    EXPECT_NEAR(tl.baselines[3].mean, 0.6, 1e-12);
    EXPECT_NEAR(tl.baselines[2].sd, std::sqrt(0.08 / 3.0), 1e-12);
}

TEST(Timeline, JmeIsCrossRecurrenceOverTrailingContext) {
    PipelineConfig cfg;
    const auto tl = compute_timeline(session(), cfg);
    for (const auto& tick : tl.ticks) {
        const auto k = static_cast<std::size_t>(tick.t() / cfg.jme_window_ms) - 1;
        std::vector<int> a, b;
        for (std::size_t i = k + 1 - cfg.jme_context; i <= k; ++i) {
            a.push_back(tl.me[i].bin[0]);
            b.push_back(tl.me[i].bin[1]);
        }
        EXPECT_EQ(tick.raw()[1], jme_crqa(a, b).value);
        EXPECT_EQ(tick.raw()[2], tl.me[k].me[0]);
    }
}

TEST(Timeline, CosineModeUsesRawValues) {
    PipelineConfig cfg;
    cfg.jme_method = JmeMethod::Cosine;
    const auto tl = compute_timeline(session(), cfg);
    const auto& tick = tl.ticks[2];
    const auto k = static_cast<std::size_t>(tick.t() / cfg.jme_window_ms) - 1;
    std::vector<double> a, b;
    for (std::size_t i = k - 5; i <= k; ++i) {
        a.push_back(tl.me[i].me[0]);
        b.push_back(tl.me[i].me[1]);
    }
    EXPECT_EQ(tick.raw()[1], jme_cosine(a, b).value);
}

TEST(Timeline, MissingMeCarriesTheLastValue) {
    auto rec = session();
    // Remove P1's pupil data from the ME window that feeds the last tick.
    std::erase_if(rec.pupil, [](const PupilSample& s) {
        return s.participant == Participant::P1 && s.t >= 350000 && s.t < 360000;
    });
    const auto tl = compute_timeline(rec);
    EXPECT_TRUE(std::isnan(tl.me[35].me[0]));
    EXPECT_EQ(tl.ticks[4].raw()[2], tl.ticks[3].raw()[2]);
}

TEST(Timeline, IncompleteWindowsAreDropped) {
    auto rec = session();
    std::erase_if(rec.pupil, [](const PupilSample& s) { return s.t > 355000; });
    std::erase_if(rec.gaze, [](const GazeSample& s) { return s.t > 355000; });
    std::erase_if(rec.edits, [](const CodeEditEvent& e) { return e.t > 355000; });
    const auto tl = compute_timeline(rec);
    EXPECT_EQ(tl.ticks.size(), 4u);
    EXPECT_EQ(tl.me.size(), 35u);
}

TEST(Timeline, ShortRestIsInsufficient) {
    auto rec = session();
    rec.header.baseline_end = 60000;
    EXPECT_THROW(compute_timeline(rec), InsufficientBaselineError);
}

TEST(Timeline, ConfigValidation) {
    PipelineConfig cfg;
    cfg.jva_window_ms = 25000;
    EXPECT_THROW(compute_timeline(session(), cfg), DomainError);
    cfg = {};
    cfg.sd_k = -1;
    EXPECT_THROW(compute_timeline(session(), cfg), DomainError);
}

TEST(Timeline, SeriesAndHash) {
    const auto tl = compute_timeline(session());
    const auto s = tl.series();
    EXPECT_EQ(s.values.size(), tl.ticks.size());
    EXPECT_EQ(s.session_hash, session_hash(session()));
    EXPECT_EQ(s.session_hash.size(), 16u);
    auto other = session();
    other.edits.pop_back();
    EXPECT_NE(session_hash(other), s.session_hash);
}

TEST(Timeline, CsvExports) {
    const auto tl = compute_timeline(session());
    std::ostringstream ticks, effort;
    tl.write_ticks_csv(ticks);
    tl.write_effort_csv(effort);
    EXPECT_EQ(ticks.str().substr(0, ticks.str().find('\n')),
              "tick,t,jva,jme,me1,me2,jva_level,jme_level,me1_level,me2_level,scenario");
    EXPECT_EQ(effort.str().substr(0, 20), "t,participant,value\n");
    EXPECT_NE(effort.str().find(",joint,"), std::string::npos);
}
