// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ssrl/replay.hpp"

namespace ssrl {

/// Layer of engine settings; unset fields fall through to the layer below.
struct ConfigLayer {
    std::optional<Mode> mode;
    std::optional<Condition> condition;
    std::optional<Millis> jva_window_ms;
    std::optional<Millis> jme_window_ms;
    std::optional<double> sd_k;
    std::optional<Millis> horizon_ms;
    std::optional<int> persistence_ticks;
    std::optional<int> cols;
    std::optional<std::string> forecaster;
    std::optional<std::uint64_t> seed;

    /// Fields set here win over `below`.
    ConfigLayer over(const ConfigLayer& below) const;
};

/// JSON object with EngineConfig field names. Unknown keys are rejected.
ConfigLayer parse_config_layer(std::string_view json_text);

struct EngineConfig {
    Mode mode = Mode::Reactive;
    Condition condition = Condition::Combined;
    Millis jva_window_ms = 30000;
    Millis jme_window_ms = 10000;
    double sd_k = kDefaultSdK;
    Millis horizon_ms = 30000;
    int persistence_ticks = 3;
    int cols = 10;
    std::string forecaster = "persistence";
    std::uint64_t seed = 1;

    /// Defaults under `layer`. A missing mode follows the condition
    /// (proactive-full runs proactive) and a missing condition follows the mode.
    static EngineConfig resolve(const ConfigLayer& layer);

    void validate() const;
    int horizon_ticks() const { return static_cast<int>(horizon_ms / jva_window_ms); }
    ReplayConfig replay_config() const;
    std::string to_json() const;
};

}  // namespace ssrl
