// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ssrl/session.hpp"

namespace ssrl {

/// Code lines per grid row.
inline constexpr int kLinesPerRow = 6;

/// Persistent grid over the code document: rows of six absolute code lines,
/// columns of equal screen-width bins.
struct GridSpec {
    int rows = 1;
    int cols = 10;

    static GridSpec for_layout(const DocumentLayout& layout, int cols = 10);

    int cell_count() const { return rows * cols; }
    bool operator==(const GridSpec&) const = default;
};

struct CellIndex {
    int row = 0;
    int col = 0;

    bool operator==(const CellIndex&) const = default;
};

/// Maps a valid gaze sample to its grid cell given the scroll position
/// (first visible code line). Returns nullopt for invalid samples and for
/// gaze that falls above or below the document.
std::optional<CellIndex> map_gaze_to_cell(const GazeSample& sample, const DocumentLayout& layout,
                                          int first_visible_line, int cols = 10);

/// Scroll position in effect at time t: the last scroll event at or before t,
/// or line 0 before the first event.
int scroll_at(std::span<const ScrollEvent> scrolls, Millis t);

/// Gaze frequency distribution of one participant over one window.
class AttentionGrid {
  public:
    AttentionGrid(GridSpec spec, Window window, Participant participant);

    const GridSpec& spec() const { return spec_; }
    const Window& window() const { return window_; }
    Participant participant() const { return participant_; }

    std::int64_t at(CellIndex c) const;
    void add(CellIndex c, std::int64_t n = 1);
    std::span<const std::int64_t> counts() const { return counts_; }
    std::int64_t total() const;

    /// One "row,col,count" line per cell, with a header line.
    void write_csv(std::ostream& out) const;

  private:
    std::size_t offset(CellIndex c) const;

    GridSpec spec_;
    Window window_;
    Participant participant_;
    std::vector<std::int64_t> counts_;
};

/// Accumulates gaze samples into a grid. Invalid and off-document samples
/// are skipped; each sample uses the scroll position in effect at its time.
AttentionGrid accumulate(std::span<const GazeSample> samples, const DocumentLayout& layout,
                         std::span<const ScrollEvent> scrolls, GridSpec spec, Window window,
                         Participant participant);

struct JvaScore {
    double value = 0.0;
    Window window;
};

/// Cosine similarity of the two flattened count vectors; 0 when either grid
/// is empty. Throws DomainError when specs or windows differ.
JvaScore jva_cosine(const AttentionGrid& a, const AttentionGrid& b);

}  // namespace ssrl
