// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ssrl {

/// Milliseconds since session start.
using Millis = std::int64_t;

enum class Participant : std::uint8_t { P1, P2 };

std::string_view to_string(Participant p);
std::optional<Participant> parse_participant(std::string_view s);

struct GazeSample {
    Millis t = 0;
    Participant participant = Participant::P1;
    // Fractions of screen width/height; meaningful only when valid.
    double x_norm = 0.0;
    double y_norm = 0.0;
    bool valid = true;
};

struct PupilSample {
    Millis t = 0;
    Participant participant = Participant::P1;
    double diameter_mm = 0.0;
};

struct ScrollEvent {
    Millis t = 0;
    int first_visible_line = 0;
};

struct CodeEditEvent {
    Millis t = 0;
    Participant participant = Participant::P1;
    int lines_changed = 1;
};

/// Only the "fixed" status exists.
struct BugEvent {
    Millis t = 0;
    std::string bug_id;
};

enum class ControlKind : std::uint8_t { Pause, Cancel, Ignore };

std::string_view to_string(ControlKind k);
std::optional<ControlKind> parse_control_kind(std::string_view s);

struct ControlEvent {
    Millis t = 0;
    ControlKind kind = ControlKind::Pause;
};

struct DocumentLayout {
    double doc_top_px = 100.0;
    double line_height_px = 20.0;
    int total_lines = 120;
    double screen_w_px = 1600.0;
    double screen_h_px = 1000.0;

    bool operator==(const DocumentLayout&) const = default;
};

struct SessionHeader {
    DocumentLayout layout;
    double pupil_rate_hz = 60.0;
    double gaze_rate_hz = 30.0;
    Millis baseline_start = 0;
    Millis baseline_end = 0;

    bool operator==(const SessionHeader&) const = default;
};

/// One dyad session. Every stream is sorted by t; immutable after load.
struct SessionRecording {
    SessionHeader header;
    std::vector<GazeSample> gaze;
    std::vector<PupilSample> pupil;
    std::vector<ScrollEvent> scrolls;
    std::vector<CodeEditEvent> edits;
    std::vector<BugEvent> bugs;
    std::vector<ControlEvent> controls;

    /// Largest timestamp over all streams, or baseline_end for an empty
    /// recording.
    Millis last_timestamp() const;
    std::size_t event_count() const;
};

/// Checks every invariant of a recording; throws DomainError on violation.
void validate(const SessionRecording& rec);

SessionRecording parse_session(std::istream& in);
SessionRecording load_session(const std::filesystem::path& path);

/// Canonical JSON-lines encoding: header line, then all events merged by
/// timestamp (ties ordered by stream kind, then participant, then input order).
void serialize_session(const SessionRecording& rec, std::ostream& out);
std::string serialize_session(const SessionRecording& rec);
void save_session(const SessionRecording& rec, const std::filesystem::path& path);

// --- windowing ------------------------------------------------------------

/// Half-open time window [start, end).
struct Window {
    std::int64_t index = 0;
    Millis start = 0;
    Millis end = 0;

    Millis duration() const { return end - start; }
    bool contains(Millis t) const { return t >= start && t < end; }
    bool operator==(const Window&) const = default;
};

template <typename Sample>
struct WindowSlice {
    Window window;
    std::span<const Sample> samples;
};

/// Window k spans [k*hop, k*hop + size). Windows are yielded from k = 0 up to
/// the last window that starts at or before `until` (defaults to the last
/// sample's timestamp). Empty windows are yielded too.
template <typename Sample>
std::vector<WindowSlice<Sample>> windows(std::span<const Sample> samples, Millis size, Millis hop,
                                         std::optional<Millis> until = std::nullopt);

/// Samples of one participant, order preserved.
template <typename Sample>
std::vector<Sample> for_participant(std::span<const Sample> samples, Participant p) {
    std::vector<Sample> out;
    for (const auto& s : samples) {
        if (s.participant == p) out.push_back(s);
    }
    return out;
}

}  // namespace ssrl

#include "ssrl/detail/windows_impl.hpp"
