// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/config.hpp"

#include <json.hpp>

namespace ssrl {

ConfigLayer ConfigLayer::over(const ConfigLayer& below) const {
    ConfigLayer out = below;
    if (mode) out.mode = mode;
    if (condition) out.condition = condition;
    if (jva_window_ms) out.jva_window_ms = jva_window_ms;
    if (jme_window_ms) out.jme_window_ms = jme_window_ms;
    if (sd_k) out.sd_k = sd_k;
    if (horizon_ms) out.horizon_ms = horizon_ms;
    if (persistence_ticks) out.persistence_ticks = persistence_ticks;
    if (cols) out.cols = cols;
    if (forecaster) out.forecaster = forecaster;
    if (seed) out.seed = seed;
    return out;
}

ConfigLayer parse_config_layer(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("config: expected a JSON object");
    ConfigLayer c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "mode") {
                c.mode = parse_mode(v.get<std::string>());
                if (!c.mode) throw DomainError("config: unknown mode " + v.dump());
            } else if (key == "condition") {
                c.condition = parse_condition(v.get<std::string>());
                if (!c.condition) throw DomainError("config: unknown condition " + v.dump());
            } else if (key == "jva_window_ms") {
                c.jva_window_ms = v.get<Millis>();
            } else if (key == "jme_window_ms") {
                c.jme_window_ms = v.get<Millis>();
            } else if (key == "sd_k") {
                c.sd_k = v.get<double>();
            } else if (key == "horizon_ms") {
                c.horizon_ms = v.get<Millis>();
            } else if (key == "persistence_ticks") {
                c.persistence_ticks = v.get<int>();
            } else if (key == "cols") {
                c.cols = v.get<int>();
            } else if (key == "forecaster") {
                c.forecaster = v.get<std::string>();
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else {
                throw DomainError("config: unknown field '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
    return c;
}

EngineConfig EngineConfig::resolve(const ConfigLayer& l) {
    EngineConfig c;
    if (l.condition) c.condition = *l.condition;
    if (l.mode) c.mode = *l.mode;
    if (l.mode && !l.condition && *l.mode == Mode::Proactive) c.condition = Condition::ProactiveFull;
    if (l.condition && !l.mode && *l.condition == Condition::ProactiveFull) c.mode = Mode::Proactive;
    if (l.jva_window_ms) c.jva_window_ms = *l.jva_window_ms;
    if (l.jme_window_ms) c.jme_window_ms = *l.jme_window_ms;
    if (l.sd_k) c.sd_k = *l.sd_k;
    if (l.horizon_ms) c.horizon_ms = *l.horizon_ms;
    if (l.persistence_ticks) c.persistence_ticks = *l.persistence_ticks;
    if (l.cols) c.cols = *l.cols;
    if (l.forecaster) c.forecaster = *l.forecaster;
    if (l.seed) c.seed = *l.seed;
    return c;
}

void EngineConfig::validate() const {
    if (jva_window_ms <= 0 || jme_window_ms <= 0 || horizon_ms <= 0)
        throw DomainError("config: windows and horizon must be positive");
    if (!(sd_k > 0)) throw DomainError("config: sd_k must be positive");
    if (horizon_ms % jva_window_ms != 0)
        throw DomainError("config: horizon must be a multiple of the tick (jva window)");
    replay_config().validate();
}

ReplayConfig EngineConfig::replay_config() const {
    ReplayConfig r;
    r.mode = mode;
    r.policy.condition = condition;
    r.policy.persistence_ticks = persistence_ticks;
    r.policy.cooldown_ms = jva_window_ms;
    r.pipeline.jva_window_ms = jva_window_ms;
    r.pipeline.jme_window_ms = jme_window_ms;
    r.pipeline.cols = cols;
    r.pipeline.sd_k = sd_k;
    r.horizon_ticks = static_cast<int>(horizon_ms / jva_window_ms);
    return r;
}

std::string EngineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = std::string(ssrl::to_string(mode));
    j["condition"] = std::string(ssrl::to_string(condition));
    j["jva_window_ms"] = jva_window_ms;
    j["jme_window_ms"] = jme_window_ms;
    j["sd_k"] = sd_k;
    j["horizon_ms"] = horizon_ms;
    j["persistence_ticks"] = persistence_ticks;
    j["cols"] = cols;
    j["forecaster"] = forecaster;
    j["seed"] = seed;
    return j.dump(2);
}

}  // namespace ssrl
