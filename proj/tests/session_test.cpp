// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ssrl/error.hpp"
#include "ssrl/session.hpp"

namespace ssrl {
namespace {

const char* kHeader =
    R"({"layout":{"doc_top_px":100,"line_height_px":20,"total_lines":120,"screen_w_px":1600,"screen_h_px":1000},"pupil_rate_hz":60,"gaze_rate_hz":30,"baseline":[0,60000]})";

SessionRecording parse(const std::string& text) {
    std::istringstream in(text);
    return parse_session(in);
}

std::size_t error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

TEST(LoadSession, HeaderOnlyGivesEmptyRecording) {
    auto rec = parse(std::string(kHeader) + "\n");
    EXPECT_EQ(rec.event_count(), 0u);
    EXPECT_EQ(rec.header.layout.total_lines, 120);
    EXPECT_EQ(rec.header.baseline_end, 60000);
}

TEST(LoadSession, SingleGazeLine) {
    auto rec = parse(std::string(kHeader) + "\n" +
                     R"({"type":"gaze","t":0,"p":"P1","x":0.5,"y":0.5,"valid":true})" + "\n");
    ASSERT_EQ(rec.gaze.size(), 1u);
    EXPECT_EQ(rec.gaze[0].participant, Participant::P1);
    EXPECT_DOUBLE_EQ(rec.gaze[0].x_norm, 0.5);
    EXPECT_TRUE(rec.gaze[0].valid);
}

TEST(LoadSession, MalformedLineReportsLineNumber) {
    const std::string text = std::string(kHeader) + "\n" +
                             R"({"type":"pupil","t":0,"p":"P1","d":3.1})" + "\n" +
                             R"({"type":"pupil","t":10,"p":"P1",)" + "\n";
    EXPECT_EQ(error_line(text), 3u);
}

TEST(LoadSession, OutOfOrderTimestampsRejectedPerStream) {
    const std::string bad = std::string(kHeader) + "\n" +
                            R"({"type":"pupil","t":20,"p":"P1","d":3.1})" + "\n" +
                            R"({"type":"pupil","t":10,"p":"P1","d":3.1})" + "\n";
    EXPECT_EQ(error_line(bad), 3u);

    // Different participants are independent streams.
    const std::string ok = std::string(kHeader) + "\n" +
                           R"({"type":"pupil","t":20,"p":"P1","d":3.1})" + "\n" +
                           R"({"type":"pupil","t":10,"p":"P2","d":3.2})" + "\n";
    auto rec = parse(ok);
    ASSERT_EQ(rec.pupil.size(), 2u);
    EXPECT_EQ(rec.pupil[0].t, 10);
    EXPECT_EQ(rec.pupil[1].t, 20);
}

TEST(LoadSession, MissingHeader) {
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_EQ(error_line(R"({"type":"gaze","t":0,"p":"P1","x":0.5,"y":0.5,"valid":true})"
                         "\n"),
              1u);
}

TEST(LoadSession, FieldInvariantsEnforced) {
    const std::string h = std::string(kHeader) + "\n";
    EXPECT_THROW(parse(h + R"({"type":"gaze","t":0,"p":"P1","x":1.5,"y":0.5,"valid":true})"),
                 ParseError);
    EXPECT_THROW(parse(h + R"({"type":"gaze","t":0,"p":"P1","x":0.5,"y":0.5,"valid":false})"),
                 ParseError);
    EXPECT_THROW(parse(h + R"({"type":"pupil","t":0,"p":"P1","d":0})"), ParseError);
    EXPECT_THROW(parse(h + R"({"type":"scroll","t":0,"line":120})"), ParseError);
    EXPECT_THROW(parse(h + R"({"type":"edit","t":0,"p":"P2","lines":0})"), ParseError);
    EXPECT_THROW(parse(h + R"({"type":"control","t":0,"kind":"snooze"})"), ParseError);
    EXPECT_THROW(parse(h + R"({"type":"bug","t":0,"id":"b1","status":"fixed"})" + "\n" +
                       R"({"type":"bug","t":5,"id":"b1","status":"fixed"})"),
                 ParseError);
    EXPECT_THROW(parse(h + R"({"type":"gaze","t":-1,"p":"P1","valid":false})"), ParseError);
}

TEST(LoadSession, CanonicalSerializationRoundTrips) {
    SessionRecording rec;
    rec.header.baseline_end = 60000;
    rec.gaze = {{0, Participant::P1, 0.5, 0.5, true},
                {0, Participant::P2, 0.25, 0.75, true},
                {33, Participant::P2, 0.0, 0.0, false}};
    rec.pupil = {{0, Participant::P1, 3.456789012345678}, {16, Participant::P2, 4.1}};
    rec.scrolls = {{100, 12}};
    rec.edits = {{200, Participant::P2, 3}};
    rec.bugs = {{300, "B1"}};
    rec.controls = {{400, ControlKind::Pause}};

    const std::string once = serialize_session(rec);
    const std::string twice = serialize_session(parse(once));
    EXPECT_EQ(once, twice);
    EXPECT_NE(once.find(R"({"type":"gaze","t":0,"p":"P1","x":0.5,"y":0.5,"valid":true})"),
              std::string::npos);
}

TEST(Windows, HalfOpenBoundaries) {
    std::vector<PupilSample> s = {{0, Participant::P1, 3.0}, {9999, Participant::P1, 3.0},
                                  {10000, Participant::P1, 3.0}};
    auto w = windows<PupilSample>(s, 10000, 10000);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[0].samples.size(), 2u);
    EXPECT_EQ(w[1].samples.size(), 1u);
    EXPECT_EQ(w[1].samples[0].t, 10000);
    EXPECT_EQ(w[1].window.start, 10000);
    EXPECT_EQ(w[1].window.end, 20000);
}

TEST(Windows, SixtyFiveSecondsGivesSevenWindows) {
    std::vector<PupilSample> s;
    for (Millis t = 0; t < 65000; t += 100) s.push_back({t, Participant::P1, 3.0});
    auto w = windows<PupilSample>(s, 10000, 10000);
    ASSERT_EQ(w.size(), 7u);
    EXPECT_EQ(w.back().samples.size(), 50u);
}

TEST(Windows, EmptyWindowsAreYielded) {
    std::vector<PupilSample> s = {{0, Participant::P1, 3.0}, {35000, Participant::P1, 3.0}};
    auto w = windows<PupilSample>(s, 10000, 10000);
    ASSERT_EQ(w.size(), 4u);
    EXPECT_TRUE(w[1].samples.empty());
    EXPECT_TRUE(w[2].samples.empty());
}

TEST(Windows, RejectsNonPositiveSizes) {
    std::vector<PupilSample> s;
    EXPECT_THROW(windows<PupilSample>(s, 0, 10), DomainError);
    EXPECT_THROW(windows<PupilSample>(s, 10, 0), DomainError);
}

TEST(Windows, PartitionPropertyOnRandomStreams) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PupilSample> s;
        Millis t = 0;
        const int n = static_cast<int>(rng() % 500);
        for (int i = 0; i < n; ++i) {
            t += static_cast<Millis>(rng() % 400);
            s.push_back({t, Participant::P1, 3.0});
        }
        const Millis size = 1 + static_cast<Millis>(rng() % 5000);
        auto w = windows<PupilSample>(s, size, size);
        std::size_t total = 0;
        Millis prev = -1;
        for (const auto& slice : w) {
            total += slice.samples.size();
            for (const auto& x : slice.samples) {
                EXPECT_TRUE(slice.window.contains(x.t));
                EXPECT_GE(x.t, prev);
                prev = x.t;
            }
        }
        EXPECT_EQ(total, s.size());
    }
}

TEST(Windows, OverlappingHopCoversSamplesSeveralTimes) {
    std::vector<PupilSample> s;
    for (Millis t = 0; t < 30000; t += 1000) s.push_back({t, Participant::P1, 3.0});
    auto w = windows<PupilSample>(s, 10000, 5000);
    std::size_t total = 0;
    for (const auto& slice : w) total += slice.samples.size();
    // Every sample except the first five seconds lies in two windows.
    EXPECT_EQ(total, 55u);
}

}  // namespace
}  // namespace ssrl
