// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssrl/effort.hpp"
#include "ssrl/forecast.hpp"
#include "ssrl/policy.hpp"
#include "ssrl/session.hpp"

namespace ssrl {

struct PipelineConfig {
    Millis jva_window_ms = 30000;
    Millis jme_window_ms = 10000;
    int cols = 10;
    double sd_k = kDefaultSdK;
    /// ME windows in the trailing cross-recurrence context of one JME value.
    int jme_context = 6;
    JmeMethod jme_method = JmeMethod::Crqa;
    IpaConfig ipa{};

    /// Throws DomainError on non-positive windows, sd_k <= 0, or a JVA
    /// window that is not a whole number of ME windows.
    void validate() const;
};

/// One ME window. Values are NaN where the pupil data was unusable or the
/// JME context is incomplete.
struct MeWindow {
    Window window;
    std::array<double, 2> me{};
    std::array<int, 2> bin{-1, -1};
    double jme = 0.0;
    bool rest = false;
};

struct Tick {
    std::int64_t index = 0;
    CollaborationState state;

    Millis t() const { return state.window.end; }
    const MetricVector& raw() const { return state.raw; }
};

struct MetricTimeline {
    Baselines baselines{};
    /// Per-participant whole-session ME range used for the 0..10 bins.
    std::array<std::array<double, 2>, 2> me_range{};
    std::vector<double> jva;  // one per complete JVA window
    std::vector<MeWindow> me;
    std::vector<Tick> ticks;
    std::string session_hash;

    MetricSeries series() const;
    /// tick,t,jva,jme,me1,me2 plus the four levels and the scenario id.
    void write_ticks_csv(std::ostream& out) const;
    /// t,participant,value rows; participant "joint" carries JME.
    void write_effort_csv(std::ostream& out) const;
};

/// Windows every stream, computes the four metrics, the resting baselines and
/// one classified state per task tick (each JVA window starting at or after
/// the baseline end). A window counts only if it ends within one sample
/// period of the last timestamp.
MetricTimeline compute_timeline(const SessionRecording& rec, const PipelineConfig& cfg = {});

/// Hex FNV-1a of the canonical serialization.
std::string session_hash(const SessionRecording& rec);

}  // namespace ssrl
