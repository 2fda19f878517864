// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ssrl/error.hpp"
#include "ssrl/gaze.hpp"

namespace ssrl {
namespace {

DocumentLayout layout() {
    DocumentLayout l;
    l.doc_top_px = 100;
    l.line_height_px = 20;
    l.total_lines = 120;
    l.screen_w_px = 1600;
    l.screen_h_px = 1000;
    return l;
}

GazeSample at(double x, double y, Millis t = 0, Participant p = Participant::P1) {
    return {t, p, x, y, true};
}

TEST(MapGazeToCell, MidScreenArithmetic) {
    // (500 - 100) / 20 = line 20; 20 / 6 = row 3.
    auto cell = map_gaze_to_cell(at(0.55, 0.5), layout(), 0, 10);
    ASSERT_TRUE(cell);
    EXPECT_EQ(cell->row, 3);
    EXPECT_EQ(cell->col, 5);
}

TEST(MapGazeToCell, AboveDocumentIsNone) {
    EXPECT_FALSE(map_gaze_to_cell(at(0.5, 0.05), layout(), 0, 10));
}

TEST(MapGazeToCell, RightEdgeClamps) {
    auto cell = map_gaze_to_cell(at(1.0, 0.5), layout(), 0, 10);
    ASSERT_TRUE(cell);
    EXPECT_EQ(cell->col, 9);
}

TEST(MapGazeToCell, ScrollShiftsToAbsoluteLines) {
    auto cell = map_gaze_to_cell(at(0.0, 0.5), layout(), 30, 10);
    ASSERT_TRUE(cell);
    EXPECT_EQ(cell->row, 50 / 6);
}

TEST(MapGazeToCell, PastDocumentEndIsNone) {
    // Line 110 + 44 is beyond the 120-line document.
    EXPECT_FALSE(map_gaze_to_cell(at(0.5, 0.99), layout(), 110, 10));
}

TEST(MapGazeToCell, InvalidSampleIsNone) {
    GazeSample s = at(0.5, 0.5);
    s.valid = false;
    EXPECT_FALSE(map_gaze_to_cell(s, layout(), 0, 10));
}

TEST(GridSpec, RowsCoverDocumentInSixLineBands) {
    auto l = layout();
    EXPECT_EQ(GridSpec::for_layout(l).rows, 20);
    l.total_lines = 121;
    EXPECT_EQ(GridSpec::for_layout(l).rows, 21);
    l.total_lines = 1;
    EXPECT_EQ(GridSpec::for_layout(l, 4).rows, 1);
    EXPECT_THROW(GridSpec::for_layout(l, 0), DomainError);
}

TEST(ScrollAt, LastEventAtOrBefore) {
    std::vector<ScrollEvent> s = {{1000, 10}, {2000, 20}};
    EXPECT_EQ(scroll_at(s, 0), 0);
    EXPECT_EQ(scroll_at(s, 1000), 10);
    EXPECT_EQ(scroll_at(s, 1999), 10);
    EXPECT_EQ(scroll_at(s, 5000), 20);
}

TEST(Accumulate, EmptyWindowIsAllZero) {
    const auto spec = GridSpec::for_layout(layout());
    auto g = accumulate({}, layout(), {}, spec, {0, 0, 30000}, Participant::P1);
    EXPECT_EQ(g.total(), 0);
}

TEST(Accumulate, SingleCell) {
    const auto spec = GridSpec::for_layout(layout());
    std::vector<GazeSample> s;
    for (int i = 0; i < 10; ++i) s.push_back(at(0.55, 0.5, i * 33));
    auto g = accumulate(s, layout(), {}, spec, {0, 0, 30000}, Participant::P1);
    EXPECT_EQ(g.at({3, 5}), 10);
    EXPECT_EQ(g.total(), 10);
}

TEST(Accumulate, MixedFixtureMatchesRecount) {
    const auto l = layout();
    const auto spec = GridSpec::for_layout(l);
    // Two samples each in three cells, plus off-document, invalid, other
    // participant and out-of-window samples that must be ignored.
    std::vector<GazeSample> s = {at(0.05, 0.15, 0),  at(0.95, 0.95, 10), at(0.55, 0.5, 20),
                                 at(0.05, 0.16, 30), at(0.95, 0.94, 40), at(0.56, 0.51, 50),
                                 at(0.5, 0.01, 60),  at(0.5, 0.5, 70, Participant::P2)};
    GazeSample invalid = at(0.5, 0.5, 80);
    invalid.valid = false;
    s.push_back(invalid);
    s.push_back(at(0.5, 0.5, 40000));

    auto g = accumulate(s, l, {}, spec, {0, 0, 30000}, Participant::P1);

    // Independent recount straight from the pixel arithmetic.
    std::vector<std::int64_t> expect(static_cast<std::size_t>(spec.cell_count()), 0);
    for (const auto& x : s) {
        if (!x.valid || x.participant != Participant::P1 || x.t >= 30000) continue;
        const double y_px = x.y_norm * l.screen_h_px;
        if (y_px < l.doc_top_px) continue;
        const int line = static_cast<int>((y_px - l.doc_top_px) / l.line_height_px);
        const int col = std::min(static_cast<int>(x.x_norm * spec.cols), spec.cols - 1);
        ++expect[static_cast<std::size_t>((line / 6) * spec.cols + col)];
    }
    std::vector<std::int64_t> got(g.counts().begin(), g.counts().end());
    EXPECT_EQ(got, expect);
    std::vector<std::int64_t> nonzero;
    std::copy_if(got.begin(), got.end(), std::back_inserter(nonzero),
                 [](std::int64_t c) { return c > 0; });
    EXPECT_EQ(nonzero, (std::vector<std::int64_t>{2, 2, 2}));
}

TEST(Accumulate, UsesScrollInEffectPerSample) {
    const auto spec = GridSpec::for_layout(layout());
    std::vector<ScrollEvent> scrolls = {{500, 60}};
    std::vector<GazeSample> s = {at(0.0, 0.5, 100), at(0.0, 0.5, 600)};
    auto g = accumulate(s, layout(), scrolls, spec, {0, 0, 30000}, Participant::P1);
    EXPECT_EQ(g.at({3, 0}), 1);
    EXPECT_EQ(g.at({80 / 6, 0}), 1);
}

TEST(AttentionGrid, CsvExport) {
    AttentionGrid g({1, 2}, {0, 0, 30000}, Participant::P2);
    g.add({0, 1}, 4);
    std::ostringstream out;
    g.write_csv(out);
    EXPECT_EQ(out.str(), "row,col,count\n0,0,0\n0,1,4\n");
}

AttentionGrid grid_from(std::span<const std::int64_t> counts, int cols, Participant p) {
    const int rows = static_cast<int>(counts.size()) / cols;
    AttentionGrid g({rows, cols}, {0, 0, 30000}, p);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        g.add({static_cast<int>(i) / cols, static_cast<int>(i) % cols}, counts[i]);
    }
    return g;
}

TEST(JvaCosine, WorkedExamples) {
    const std::vector<std::int64_t> a = {2, 0};
    const std::vector<std::int64_t> b = {1, 1};
    auto ga = grid_from(a, 2, Participant::P1);
    auto gb = grid_from(b, 2, Participant::P2);
    EXPECT_NEAR(jva_cosine(ga, gb).value, 2.0 / (2.0 * std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(jva_cosine(ga, gb).value, 0.70711, 1e-5);
    EXPECT_DOUBLE_EQ(jva_cosine(ga, ga).value, 1.0);

    const std::vector<std::int64_t> c = {0, 3};
    EXPECT_DOUBLE_EQ(jva_cosine(ga, grid_from(c, 2, Participant::P2)).value, 0.0);
}

TEST(JvaCosine, EmptyGridScoresZero) {
    const std::vector<std::int64_t> a = {2, 5};
    const std::vector<std::int64_t> z = {0, 0};
    EXPECT_DOUBLE_EQ(
        jva_cosine(grid_from(a, 2, Participant::P1), grid_from(z, 2, Participant::P2)).value, 0.0);
}

TEST(JvaCosine, SpecOrWindowMismatchThrows) {
    AttentionGrid a({2, 2}, {0, 0, 30000}, Participant::P1);
    AttentionGrid b({2, 3}, {0, 0, 30000}, Participant::P2);
    AttentionGrid c({2, 2}, {1, 30000, 60000}, Participant::P2);
    EXPECT_THROW(jva_cosine(a, b), DomainError);
    EXPECT_THROW(jva_cosine(a, c), DomainError);
}

TEST(JvaCosine, SymmetryScaleAndRelabelingInvariance) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const int cols = 1 + static_cast<int>(rng() % 6);
        const int rows = 1 + static_cast<int>(rng() % 6);
        const auto n = static_cast<std::size_t>(rows * cols);
        std::vector<std::int64_t> a(n), b(n);
        for (auto& v : a) v = static_cast<std::int64_t>(rng() % 20);
        for (auto& v : b) v = static_cast<std::int64_t>(rng() % 20);
        auto ga = grid_from(a, cols, Participant::P1);
        auto gb = grid_from(b, cols, Participant::P2);
        const double s = jva_cosine(ga, gb).value;
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
        EXPECT_DOUBLE_EQ(s, jva_cosine(gb, ga).value);

        const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 9);
        std::vector<std::int64_t> scaled(a);
        for (auto& v : scaled) v *= k;
        EXPECT_NEAR(jva_cosine(grid_from(scaled, cols, Participant::P1), gb).value, s, 1e-12);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::int64_t> pa(n), pb(n);
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = a[perm[i]];
            pb[i] = b[perm[i]];
        }
        EXPECT_NEAR(jva_cosine(grid_from(pa, cols, Participant::P1),
                               grid_from(pb, cols, Participant::P2))
                        .value,
                    s, 1e-12);
    }
}

}  // namespace
}  // namespace ssrl
