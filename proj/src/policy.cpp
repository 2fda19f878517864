// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ssrl/io.hpp"

namespace ssrl {

namespace {

constexpr Level H = Level::H;
constexpr Level A = Level::AVG;
constexpr Level L = Level::L;
constexpr auto A1 = FeedbackAction::A1DoNothing;
constexpr auto A2 = FeedbackAction::A2CopilotAssist;
constexpr auto A3 = FeedbackAction::A3GazeAwareness;
constexpr auto A4 = FeedbackAction::A4DialogPrompt;
constexpr auto A5 = FeedbackAction::A5TaskHint;

std::vector<ScenarioRow> builtin_rows() {
    // JVA, JME, ME1, ME2 -> checkmarks; the last set holds the starred ones.
    return {
        {1, {H, H, H, H}, {A2, A5}, {A5}},
        {2, {H, H, A, A}, {A1}, {}},
        {3, {H, H, L, L}, {A2}, {}},
        {4, {H, L, H, H}, {A2, A4, A5}, {A5}},
        {5, {H, L, H, L}, {A4}, {}},
        {6, {H, L, L, L}, {A4}, {}},
        {7, {H, L, A, H}, {A4}, {}},
        {8, {H, L, L, L}, {A4}, {}},
        {9, {H, L, L, L}, {A4}, {}},
        {10, {H, L, H, H}, {A4}, {}},
        {11, {H, L, L, L}, {A2, A4}, {}},
        {12, {L, H, L, L}, {A2, A3, A5}, {A5}},
        {13, {L, H, H, L}, {A2, A3}, {}},
        {14, {L, H, L, L}, {A2, A3}, {}},
        {15, {L, L, H, H}, {A2, A3, A4, A5}, {A5}},
        {16, {L, L, H, A}, {A3, A4}, {}},
        {17, {L, L, H, L}, {A2, A3, A4}, {}},
        {18, {L, L, A, H}, {A3, A4}, {}},
        {19, {L, L, A, L}, {A3, A4}, {}},
        {20, {L, L, L, H}, {A2, A3, A4}, {}},
        {21, {L, L, L, A}, {A3, A4}, {}},
        {22, {L, L, L, L}, {A2, A3, A4}, {}},
    };
}

int level_distance(Level a, Level b) {
    return std::abs(static_cast<int>(a) - static_cast<int>(b));
}

// Fewer actions first, then the set whose most disruptive action is milder.
bool less_disruptive(ActionSet a, ActionSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.bits() < b.bits();
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

// --- names ----------------------------------------------------------------

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::JVA: return "JVA";
        case Metric::JME: return "JME";
        case Metric::ME1: return "ME1";
        case Metric::ME2: return "ME2";
    }
    return "?";
}

std::string_view to_string(Level l) {
    switch (l) {
        case Level::H: return "H";
        case Level::AVG: return "AVG";
        case Level::L: return "L";
    }
    return "?";
}

std::optional<Level> parse_level(std::string_view s) {
    if (s == "H") return Level::H;
    if (s == "AVG") return Level::AVG;
    if (s == "L") return Level::L;
    return std::nullopt;
}

std::string_view to_string(FeedbackAction a) {
    static constexpr std::string_view names[] = {"A1", "A2", "A3", "A4", "A5"};
    return names[static_cast<std::size_t>(a)];
}

std::optional<FeedbackAction> parse_action(std::string_view s) {
    if (s.size() != 2 || s[0] != 'A' || s[1] < '1' || s[1] > '5') return std::nullopt;
    return static_cast<FeedbackAction>(s[1] - '1');
}

int ActionSet::size() const { return std::popcount(static_cast<unsigned>(bits_)); }

std::vector<FeedbackAction> ActionSet::list() const {
    std::vector<FeedbackAction> out;
    for (int i = 0; i < 5; ++i) {
        const auto a = static_cast<FeedbackAction>(i);
        if (contains(a)) out.push_back(a);
    }
    return out;
}

std::string to_string(ActionSet s) {
    std::string out = "{";
    bool first = true;
    for (auto a : s.list()) {
        if (!first) out += ',';
        out += to_string(a);
        first = false;
    }
    return out + "}";
}

std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::Control: return "control";
        case Condition::JVAOnly: return "jva-only";
        case Condition::JMEOnly: return "jme-only";
        case Condition::Combined: return "combined";
        case Condition::ProactiveFull: return "proactive-full";
    }
    return "?";
}

std::optional<Condition> parse_condition(std::string_view s) {
    const auto k = lower(s);
    if (k == "control") return Condition::Control;
    if (k == "jva-only" || k == "jvaonly" || k == "jva") return Condition::JVAOnly;
    if (k == "jme-only" || k == "jmeonly" || k == "jme") return Condition::JMEOnly;
    if (k == "combined" || k == "both") return Condition::Combined;
    if (k == "proactive-full" || k == "proactivefull" || k == "proactive")
        return Condition::ProactiveFull;
    return std::nullopt;
}

std::string_view to_string(Source s) { return s == Source::Reactive ? "reactive" : "proactive"; }

// --- baselines --------------------------------------------------------------

Baseline compute_baseline(Metric metric, std::span<const double> resting) {
    if (resting.size() < 2) {
        throw InsufficientBaselineError("baseline for " + std::string(to_string(metric)) +
                                        " needs at least two resting windows, got " +
                                        std::to_string(resting.size()));
    }
    long double sum = 0.0L;
    for (double v : resting) sum += v;
    const double mean = static_cast<double>(sum / static_cast<long double>(resting.size()));
    long double ss = 0.0L;
    for (double v : resting) ss += (static_cast<long double>(v) - mean) * (v - mean);
    const double sd = std::sqrt(static_cast<double>(ss / static_cast<long double>(resting.size())));
    return {metric, mean, sd};
}

Level discretize(double value, const Baseline& b, double k) {
    if (value > b.mean + k * b.sd) return Level::H;
    if (value < b.mean - k * b.sd) return Level::L;
    return Level::AVG;
}

CollaborationState make_state(const Window& window, const std::array<double, 4>& raw,
                              const Baselines& baselines, double k) {
    CollaborationState s;
    s.window = window;
    s.raw = raw;
    for (std::size_t i = 0; i < 4; ++i) s.level[i] = discretize(raw[i], baselines[i], k);
    return s;
}

// --- scenario table -----------------------------------------------------------

ScenarioTable::ScenarioTable(std::vector<ScenarioRow> rows) : rows_(std::move(rows)) {}

const ScenarioTable& ScenarioTable::builtin() {
    static const ScenarioTable table(builtin_rows());
    return table;
}

const ScenarioRow& ScenarioTable::row(int id) const {
    if (id < 1 || id > static_cast<int>(rows_.size()))
        throw DomainError("scenario id out of range: " + std::to_string(id));
    return rows_[static_cast<std::size_t>(id - 1)];
}

std::vector<int> ScenarioTable::group_of(int id) const {
    const auto& state = row(id).state;
    std::vector<int> out;
    for (const auto& r : rows_) {
        if (r.state == state) out.push_back(r.id);
    }
    return out;
}

ActionSet ScenarioTable::base_actions(int id) const {
    std::optional<ActionSet> best;
    for (int g : group_of(id)) {
        const auto s = row(g).unstarred();
        if (!best || less_disruptive(s, *best)) best = s;
    }
    return *best;
}

ActionSet ScenarioTable::escalated_actions(int id) const {
    ActionSet out;
    for (int g : group_of(id)) out = out | row(g).actions;
    return out;
}

ScenarioMatch ScenarioTable::classify(const std::array<Level, 4>& state) const {
    for (const auto& r : rows_) {
        if (r.state == state) return {r.id, false};
    }
    // AVG joint synchrony is not a deviation: look it up as H.
    std::array<Level, 4> probe = state;
    for (std::size_t i = 0; i < 2; ++i) {
        if (probe[i] == Level::AVG) probe[i] = Level::H;
    }
    const ScenarioRow* best = nullptr;
    int best_dist = 0;
    for (const auto& r : rows_) {
        if (r.state[0] != probe[0] || r.state[1] != probe[1]) continue;
        if (group_of(r.id).front() != r.id) continue;
        const int d = level_distance(r.state[2], probe[2]) + level_distance(r.state[3], probe[3]);
        if (!best || d < best_dist ||
            (d == best_dist && less_disruptive(base_actions(r.id), base_actions(best->id)))) {
            best = &r;
            best_dist = d;
        }
    }
    return {best->id, true};
}

std::string ScenarioTable::to_csv() const {
    std::ostringstream out;
    out << "# ssrl scenario table v1\n";
    out << "jva,jme,me1,me2,a1,a2,a3,a4,a5,starred\n";
    for (const auto& r : rows_) {
        for (auto l : r.state) out << to_string(l) << ',';
        for (int i = 0; i < 5; ++i)
            out << (r.actions.contains(static_cast<FeedbackAction>(i)) ? 1 : 0) << ',';
        bool first = true;
        for (auto a : r.starred.list()) {
            if (!first) out << ';';
            out << to_string(a);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

ScenarioTable ScenarioTable::from_csv(std::string_view text) {
    std::string normalized;
    normalized.reserve(text.size());
    for (char c : text) {
        if (c != '\r') normalized += c;
    }

    std::vector<ScenarioRow> rows;
    std::istringstream in(normalized);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "jva,jme,me1,me2,a1,a2,a3,a4,a5,starred")
                throw ParseError(lineno, "unexpected scenario table header");
            saw_header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10) throw ParseError(lineno, "expected 10 fields");
        ScenarioRow r;
        r.id = static_cast<int>(rows.size()) + 1;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto l = parse_level(f[i]);
            if (!l) throw ParseError(lineno, "bad level '" + f[i] + "'");
            r.state[i] = *l;
        }
        for (int i = 0; i < 5; ++i) {
            const auto& v = f[4 + static_cast<std::size_t>(i)];
            if (v == "1") {
                r.actions.insert(static_cast<FeedbackAction>(i));
            } else if (v != "0") {
                throw ParseError(lineno, "action flags must be 0 or 1");
            }
        }
        if (!f[9].empty()) {
            for (const auto& name : split(f[9], ';')) {
                const auto a = parse_action(name);
                if (!a || !r.actions.contains(*a))
                    throw ParseError(lineno, "starred action '" + name + "' is not checked");
                r.starred.insert(*a);
            }
        }
        if (r.actions.empty()) throw ParseError(lineno, "row has no actions");
        if (r.actions.contains(A1) && r.actions.size() > 1)
            throw ParseError(lineno, "A1 cannot be combined with other actions");
        rows.push_back(r);
    }
    if (rows.size() != 22)
        throw ParseError(lineno, "expected 22 scenario rows, got " + std::to_string(rows.size()));

    ScenarioTable table(std::move(rows));
    if (fnv1a64(table.to_csv()) != kScenarioTableChecksum)
        throw IoError("scenario table does not match the built-in checksum");
    return table;
}

ScenarioTable ScenarioTable::load(const std::filesystem::path& path) {
    return from_csv(read_file(path));
}

ScenarioMatch classify_scenario(const CollaborationState& state, const ScenarioTable& table) {
    return table.classify(state.level);
}

// --- conditions ----------------------------------------------------------------

ActionSet toolset(Condition c) {
    switch (c) {
        case Condition::Control: return {};
        case Condition::JVAOnly: return {A3, A4};
        case Condition::JMEOnly: return {A5};
        case Condition::Combined: return {A3, A4, A5};
        case Condition::ProactiveFull: return ActionSet::all();
    }
    return {};
}

std::vector<Metric> monitored_metrics(Condition c) {
    switch (c) {
        case Condition::Control: return {};
        case Condition::JVAOnly: return {Metric::JVA};
        case Condition::JMEOnly: return {Metric::JME, Metric::ME1, Metric::ME2};
        case Condition::Combined:
        case Condition::ProactiveFull: return {kMetrics.begin(), kMetrics.end()};
    }
    return {};
}

ActionSet filter_by_condition(ActionSet actions, Condition c) { return actions & toolset(c); }

// --- policy state machine ----------------------------------------------------------

int observe_scenario(PolicyState& ps, int scenario_id, Millis t) {
    if (scenario_id == ps.streak_scenario && ps.streak_length > 0) {
        ++ps.streak_length;
    } else {
        ps.streak_scenario = scenario_id;
        ps.streak_length = 1;
        ps.streak_start = t;
    }
    return ps.streak_length;
}

ActionSet select_actions(int scenario_id, const PolicyState& ps, const PolicyConfig& cfg,
                         const ScenarioTable& table) {
    const bool persisted = ps.streak_scenario == scenario_id &&
                           ps.streak_length >= cfg.persistence_ticks;
    if (persisted) {
        const bool delivered = std::any_of(ps.log.rbegin(), ps.log.rend(), [&](const auto& e) {
            return e.t >= ps.streak_start && !e.suppressed;
        });
        if (delivered) return table.escalated_actions(scenario_id);
    }
    return table.base_actions(scenario_id);
}

namespace {

FeedbackEvent record(PolicyState& ps, FeedbackEvent ev) {
    ev.suppressed = ps.blocks(ev.t);
    if (!ev.suppressed) {
        for (auto a : ev.actions.list()) ps.last_action_t[static_cast<std::size_t>(a)] = ev.t;
    }
    ps.log.push_back(ev);
    return ev;
}

}  // namespace

std::optional<FeedbackEvent> reactive_step(const CollaborationState& state, PolicyState& ps,
                                           const PolicyConfig& cfg, const ScenarioTable& table) {
    const Millis t = state.window.end;
    const auto match = table.classify(state.level);
    observe_scenario(ps, match.id, t);

    const auto monitored = monitored_metrics(cfg.condition);
    const bool deviates = std::any_of(monitored.begin(), monitored.end(),
                                      [&](Metric m) { return state[m] != Level::AVG; });
    if (!deviates) return std::nullopt;
    if (!ps.log.empty() && t - ps.log.back().t < cfg.cooldown_ms) return std::nullopt;

    auto actions = filter_by_condition(select_actions(match.id, ps, cfg, table), cfg.condition);
    actions = ActionSet::from_bits(actions.bits() & ~ActionSet{A1}.bits());
    if (actions.empty()) {
        // The row asks for nothing this condition can deliver; fall back to
        // the mildest tool it has.
        const auto tools = toolset(cfg.condition).list();
        actions.insert(tools.front() == A1 ? A2 : tools.front());
    }
    return record(ps, {t, actions, match, Source::Reactive, false});
}

FeedbackEvent proactive_step(const CollaborationState& forecast, Millis t, PolicyState& ps,
                             const PolicyConfig& cfg, const ScenarioTable& table) {
    const auto match = table.classify(forecast.level);
    observe_scenario(ps, match.id, t);
    const auto actions = select_actions(match.id, ps, cfg, table);
    return record(ps, {t, actions, match, Source::Proactive, false});
}

void apply_control(const ControlEvent& ev, PolicyState& ps, const PolicyConfig& cfg) {
    switch (ev.kind) {
        case ControlKind::Pause: ps.pause_until = ev.t + cfg.pause_ms; break;
        case ControlKind::Cancel: ps.cancelled = true; break;
        case ControlKind::Ignore:
            if (!ps.log.empty()) ps.log.back().suppressed = true;
            break;
    }
}

// --- event log ------------------------------------------------------------------------

void write_event_log(std::span<const FeedbackEvent> events, std::ostream& out) {
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["t"] = e.t;
        auto arr = nlohmann::ordered_json::array();
        for (auto a : e.actions.list()) arr.push_back(std::string(to_string(a)));
        j["actions"] = arr;
        j["scenario"] = e.scenario.id;
        j["fallback"] = e.scenario.fallback;
        j["source"] = std::string(to_string(e.source));
        j["suppressed"] = e.suppressed;
        out << j.dump() << '\n';
    }
}

std::string event_log_string(std::span<const FeedbackEvent> events) {
    std::ostringstream out;
    write_event_log(events, out);
    return out.str();
}

std::vector<FeedbackEvent> parse_event_log(std::istream& in) {
    std::vector<FeedbackEvent> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            FeedbackEvent e;
            e.t = j.at("t").get<Millis>();
            for (const auto& a : j.at("actions")) {
                const auto act = parse_action(a.get<std::string>());
                if (!act) throw ParseError(lineno, "unknown action");
                e.actions.insert(*act);
            }
            e.scenario.id = j.at("scenario").get<int>();
            e.scenario.fallback = j.value("fallback", false);
            const auto src = j.at("source").get<std::string>();
            if (src != "reactive" && src != "proactive")
                throw ParseError(lineno, "unknown source '" + src + "'");
            e.source = src == "reactive" ? Source::Reactive : Source::Proactive;
            e.suppressed = j.at("suppressed").get<bool>();
            if (e.actions.empty()) throw ParseError(lineno, "event without actions");
            out.push_back(e);
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(lineno, ex.what());
        }
    }
    return out;
}

}  // namespace ssrl
