// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssrl/error.hpp"
#include "ssrl/policy.hpp"
#include "ssrl/session.hpp"

namespace ssrl {

struct ScriptSegment {
    Millis duration_ms = 0;  // whole number of 30 s ticks
    std::array<Level, 4> target{Level::AVG, Level::AVG, Level::AVG, Level::AVG};
    /// Linear ramp of the shared-gaze mixing weight across the segment.
    /// Replaces the JVA target when present.
    std::optional<std::array<double, 2>> jva_mix;
    double edits_per_min = 0.0;
    std::vector<Millis> bug_fix_times;  // relative to the segment start
};

struct ScenarioScript {
    std::string name;
    Millis rest_ms = 180000;
    std::vector<ScriptSegment> segments;
    /// Scenario the script is meant to produce, for coverage reports.
    std::optional<int> expect_scenario;

    void validate() const;
    std::string to_json() const;
};

/// A single script object, or {"scripts": [...]}.
std::vector<ScenarioScript> parse_scripts(std::string_view text);
ScenarioScript parse_script(std::string_view text);

class UnreachableTargetError : public DomainError {
  public:
    using DomainError::DomainError;
};

inline constexpr Millis kGeneratorTickMs = 30000;
inline constexpr Millis kGeneratorMeWindowMs = 10000;
inline constexpr Millis kAnchorMs = 30000;

/// Synthetic dyad session. Layout: a 30 s anchor segment, the resting
/// baseline, then the scripted segments. Levels are realized for the default
/// pipeline (30 s ticks, 10 s ME windows, 6-window JME context, CRQA, 2 SD).
/// Throws UnreachableTargetError if a JME target can't be met once a
/// segment's context no longer reaches back into the previous one.
SessionRecording generate_session(const ScenarioScript& script, std::uint64_t seed);

}  // namespace ssrl
