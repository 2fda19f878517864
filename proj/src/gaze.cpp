// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ssrl/error.hpp"
#include "ssrl/similarity.hpp"

namespace ssrl {

GridSpec GridSpec::for_layout(const DocumentLayout& layout, int cols) {
    if (cols < 1) throw DomainError("grid needs at least one column");
    const int rows = std::max(1, (layout.total_lines + kLinesPerRow - 1) / kLinesPerRow);
    return {rows, cols};
}

std::optional<CellIndex> map_gaze_to_cell(const GazeSample& sample, const DocumentLayout& layout,
                                          int first_visible_line, int cols) {
    if (!sample.valid) return std::nullopt;
    const double y_px = sample.y_norm * layout.screen_h_px;
    if (y_px < layout.doc_top_px) return std::nullopt;
    const auto line_offset =
        static_cast<std::int64_t>(std::floor((y_px - layout.doc_top_px) / layout.line_height_px));
    const std::int64_t codeline = first_visible_line + line_offset;
    if (codeline < 0 || codeline >= layout.total_lines) return std::nullopt;
    const int row = static_cast<int>(codeline / kLinesPerRow);
    const int col = std::min(static_cast<int>(std::floor(sample.x_norm * cols)), cols - 1);
    return CellIndex{row, std::max(col, 0)};
}

int scroll_at(std::span<const ScrollEvent> scrolls, Millis t) {
    auto it = std::upper_bound(scrolls.begin(), scrolls.end(), t,
                               [](Millis v, const ScrollEvent& s) { return v < s.t; });
    if (it == scrolls.begin()) return 0;
    return std::prev(it)->first_visible_line;
}

AttentionGrid::AttentionGrid(GridSpec spec, Window window, Participant participant)
    : spec_(spec),
      window_(window),
      participant_(participant),
      counts_(static_cast<std::size_t>(spec.cell_count()), 0) {
    if (spec.rows < 1 || spec.cols < 1) throw DomainError("grid needs rows >= 1 and cols >= 1");
}

std::size_t AttentionGrid::offset(CellIndex c) const {
    if (c.row < 0 || c.row >= spec_.rows || c.col < 0 || c.col >= spec_.cols)
        throw DomainError("cell outside grid");
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(spec_.cols) +
           static_cast<std::size_t>(c.col);
}

std::int64_t AttentionGrid::at(CellIndex c) const { return counts_[offset(c)]; }

void AttentionGrid::add(CellIndex c, std::int64_t n) {
    if (n < 0) throw DomainError("grid counts must stay non-negative");
    counts_[offset(c)] += n;
}

std::int64_t AttentionGrid::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

void AttentionGrid::write_csv(std::ostream& out) const {
    out << "row,col,count\n";
    for (int r = 0; r < spec_.rows; ++r) {
        for (int c = 0; c < spec_.cols; ++c) out << r << ',' << c << ',' << at({r, c}) << '\n';
    }
}

AttentionGrid accumulate(std::span<const GazeSample> samples, const DocumentLayout& layout,
                         std::span<const ScrollEvent> scrolls, GridSpec spec, Window window,
                         Participant participant) {
    AttentionGrid grid(spec, window, participant);
    for (const auto& s : samples) {
        if (s.participant != participant || !s.valid || !window.contains(s.t)) continue;
        if (auto cell = map_gaze_to_cell(s, layout, scroll_at(scrolls, s.t), spec.cols)) {
            if (cell->row < spec.rows) grid.add(*cell);
        }
    }
    return grid;
}

JvaScore jva_cosine(const AttentionGrid& a, const AttentionGrid& b) {
    if (!(a.spec() == b.spec())) throw DomainError("jva_cosine: grid specs differ");
    if (!(a.window() == b.window())) throw DomainError("jva_cosine: grids cover different windows");
    return {cosine_similarity(a.counts(), b.counts()), a.window()};
}

}  // namespace ssrl
