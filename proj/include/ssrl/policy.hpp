// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssrl/error.hpp"
#include "ssrl/session.hpp"

namespace ssrl {

// --- metrics, baselines, levels ---------------------------------------------

enum class Metric : std::uint8_t { JVA, JME, ME1, ME2 };
inline constexpr std::array<Metric, 4> kMetrics = {Metric::JVA, Metric::JME, Metric::ME1,
                                                   Metric::ME2};

std::string_view to_string(Metric m);

/// Ordered so that |a - b| is the level distance used by the fallback.
enum class Level : std::uint8_t { L = 0, AVG = 1, H = 2 };

std::string_view to_string(Level l);
std::optional<Level> parse_level(std::string_view s);

class InsufficientBaselineError : public DomainError {
  public:
    using DomainError::DomainError;
};

struct Baseline {
    Metric metric = Metric::JVA;
    double mean = 0.0;
    double sd = 0.0;  // population
};

using Baselines = std::array<Baseline, 4>;

/// Mean and population sd of the resting values. Needs at least two values.
Baseline compute_baseline(Metric metric, std::span<const double> resting);

inline constexpr double kDefaultSdK = 2.0;

/// H above mean + k*sd, L below mean - k*sd, AVG inside the closed band.
Level discretize(double value, const Baseline& baseline, double k = kDefaultSdK);

struct CollaborationState {
    Window window;
    std::array<Level, 4> level{Level::AVG, Level::AVG, Level::AVG, Level::AVG};
    std::array<double, 4> raw{};

    Level operator[](Metric m) const { return level[static_cast<std::size_t>(m)]; }
};

/// Discretizes raw (JVA, JME, ME1, ME2) values against their baselines.
CollaborationState make_state(const Window& window, const std::array<double, 4>& raw,
                              const Baselines& baselines, double k = kDefaultSdK);

// --- actions ----------------------------------------------------------------

enum class FeedbackAction : std::uint8_t {
    A1DoNothing = 0,
    A2CopilotAssist,
    A3GazeAwareness,
    A4DialogPrompt,
    A5TaskHint,
};

/// Small bit set over A1..A5.
class ActionSet {
  public:
    constexpr ActionSet() = default;
    constexpr ActionSet(std::initializer_list<FeedbackAction> actions) {
        for (auto a : actions) insert(a);
    }
    static constexpr ActionSet from_bits(std::uint8_t bits) {
        ActionSet s;
        s.bits_ = bits & 0x1F;
        return s;
    }
    static constexpr ActionSet all() { return from_bits(0x1F); }

    constexpr void insert(FeedbackAction a) { bits_ |= bit(a); }
    constexpr bool contains(FeedbackAction a) const { return (bits_ & bit(a)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }
    int size() const;

    constexpr ActionSet operator&(ActionSet o) const { return from_bits(bits_ & o.bits_); }
    constexpr ActionSet operator|(ActionSet o) const { return from_bits(bits_ | o.bits_); }
    constexpr bool subset_of(ActionSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool operator==(const ActionSet&) const = default;

    std::vector<FeedbackAction> list() const;

  private:
    static constexpr std::uint8_t bit(FeedbackAction a) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(a));
    }
    std::uint8_t bits_ = 0;
};

std::string_view to_string(FeedbackAction a);  // "A1".."A5"
std::optional<FeedbackAction> parse_action(std::string_view s);
/// "{A2,A5}" style, for messages and reports.
std::string to_string(ActionSet s);

// --- scenario table -----------------------------------------------------------

struct ScenarioRow {
    int id = 0;  // 1..22
    std::array<Level, 4> state{};
    ActionSet actions;  // every checkmark, starred ones included
    ActionSet starred;  // subset of actions gated on persistence

    ActionSet unstarred() const { return ActionSet::from_bits(actions.bits() & ~starred.bits()); }
};

struct ScenarioMatch {
    int id = 0;
    bool fallback = false;
};

/// The 22-row state to action mapping. Rows that share a state form one
/// group; the group answers with its lowest id.
class ScenarioTable {
  public:
    static const ScenarioTable& builtin();

    /// Parses the CSV form and checks it against the built-in checksum.
    static ScenarioTable from_csv(std::string_view text);
    static ScenarioTable load(const std::filesystem::path& path);

    std::string to_csv() const;

    const std::vector<ScenarioRow>& rows() const { return rows_; }
    const ScenarioRow& row(int id) const;

    ScenarioMatch classify(const std::array<Level, 4>& state) const;

    /// Actions before persistence: the smallest unstarred set in the group.
    ActionSet base_actions(int id) const;
    /// Actions once persistence holds: union over the group, starred included.
    ActionSet escalated_actions(int id) const;

  private:
    explicit ScenarioTable(std::vector<ScenarioRow> rows);
    std::vector<int> group_of(int id) const;

    std::vector<ScenarioRow> rows_;
};

/// FNV-1a64 of the shipped CSV text (LF line endings).
inline constexpr std::uint64_t kScenarioTableChecksum = 0xF86602C6C69FD151ULL;

ScenarioMatch classify_scenario(const CollaborationState& state,
                                const ScenarioTable& table = ScenarioTable::builtin());

// --- conditions, events, policy state ---------------------------------------

enum class Condition : std::uint8_t { Control, JVAOnly, JMEOnly, Combined, ProactiveFull };

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

/// Tools a condition may deliver.
ActionSet toolset(Condition c);
/// Metrics whose deviation can trigger reactive feedback under a condition.
std::vector<Metric> monitored_metrics(Condition c);

ActionSet filter_by_condition(ActionSet actions, Condition c);

enum class Source : std::uint8_t { Reactive, Proactive };
std::string_view to_string(Source s);

struct FeedbackEvent {
    Millis t = 0;
    ActionSet actions;
    ScenarioMatch scenario;
    Source source = Source::Reactive;
    bool suppressed = false;

    bool operator==(const FeedbackEvent& o) const {
        return t == o.t && actions == o.actions && scenario.id == o.scenario.id &&
               scenario.fallback == o.scenario.fallback && source == o.source &&
               suppressed == o.suppressed;
    }
};

struct PolicyConfig {
    Condition condition = Condition::Combined;
    int persistence_ticks = 3;
    Millis cooldown_ms = 30000;
    Millis pause_ms = 120000;
};

struct PolicyState {
    std::optional<Millis> pause_until;
    bool cancelled = false;

    // Persistence of the classified scenario across ticks.
    int streak_scenario = 0;
    int streak_length = 0;
    Millis streak_start = 0;

    std::array<std::optional<Millis>, 5> last_action_t{};
    std::vector<FeedbackEvent> log;

    bool blocks(Millis t) const { return cancelled || (pause_until && t < *pause_until); }
};

/// Records the scenario seen at tick t; returns the updated streak length.
int observe_scenario(PolicyState& ps, int scenario_id, Millis t);

/// Base set, or the escalated set once the scenario has persisted for
/// `persistence_ticks` and an unsuppressed event went out during the streak.
ActionSet select_actions(int scenario_id, const PolicyState& ps, const PolicyConfig& cfg,
                         const ScenarioTable& table = ScenarioTable::builtin());

/// Fires iff a monitored metric is H or L. Cooldown withholds the event
/// entirely; pause and cancel yield a suppressed event.
std::optional<FeedbackEvent> reactive_step(const CollaborationState& state, PolicyState& ps,
                                           const PolicyConfig& cfg,
                                           const ScenarioTable& table = ScenarioTable::builtin());

/// Always yields an event for the forecast state; no condition filtering.
FeedbackEvent proactive_step(const CollaborationState& forecast, Millis t, PolicyState& ps,
                             const PolicyConfig& cfg,
                             const ScenarioTable& table = ScenarioTable::builtin());

void apply_control(const ControlEvent& ev, PolicyState& ps, const PolicyConfig& cfg = {});

// --- event log I/O --------------------------------------------------------------

void write_event_log(std::span<const FeedbackEvent> events, std::ostream& out);
std::string event_log_string(std::span<const FeedbackEvent> events);
std::vector<FeedbackEvent> parse_event_log(std::istream& in);

}  // namespace ssrl
