// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/session.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "ssrl/error.hpp"
#include "ssrl/io.hpp"

namespace ssrl {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string_view to_string(Participant p) { return p == Participant::P1 ? "P1" : "P2"; }

std::optional<Participant> parse_participant(std::string_view s) {
    if (s == "P1") return Participant::P1;
    if (s == "P2") return Participant::P2;
    return std::nullopt;
}

std::string_view to_string(ControlKind k) {
    switch (k) {
        case ControlKind::Pause: return "pause";
        case ControlKind::Cancel: return "cancel";
        case ControlKind::Ignore: return "ignore";
    }
    return "pause";
}

std::optional<ControlKind> parse_control_kind(std::string_view s) {
    if (s == "pause") return ControlKind::Pause;
    if (s == "cancel") return ControlKind::Cancel;
    if (s == "ignore") return ControlKind::Ignore;
    return std::nullopt;
}

Millis SessionRecording::last_timestamp() const {
    Millis last = header.baseline_end;
    const auto bump = [&last](const auto& v) {
        if (!v.empty()) last = std::max(last, v.back().t);
    };
    bump(gaze);
    bump(pupil);
    bump(scrolls);
    bump(edits);
    bump(bugs);
    bump(controls);
    return last;
}

std::size_t SessionRecording::event_count() const {
    return gaze.size() + pupil.size() + scrolls.size() + edits.size() + bugs.size() +
           controls.size();
}

namespace {

void check_layout(const DocumentLayout& l) {
    if (!(l.line_height_px > 0.0)) throw DomainError("layout: line_height_px must be > 0");
    if (l.total_lines < 1) throw DomainError("layout: total_lines must be >= 1");
    if (!(l.screen_w_px > 0.0) || !(l.screen_h_px > 0.0))
        throw DomainError("layout: screen size must be > 0");
    if (!(l.doc_top_px < l.screen_h_px)) throw DomainError("layout: doc_top_px must be < screen_h_px");
}

void check_header(const SessionHeader& h) {
    check_layout(h.layout);
    if (!(h.pupil_rate_hz > 0.0) || !(h.gaze_rate_hz > 0.0))
        throw DomainError("header: sampling rates must be > 0");
    if (h.baseline_start < 0 || h.baseline_end < h.baseline_start)
        throw DomainError("header: baseline must satisfy 0 <= t0 <= t1");
}

template <typename T>
bool sorted_by_time(const std::vector<T>& v) {
    return std::is_sorted(v.begin(), v.end(),
                          [](const T& a, const T& b) { return a.t < b.t; });
}

template <typename T>
void stable_time_sort(std::vector<T>& v) {
    std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.t < b.t; });
}

// Stream identity for the per-stream ordering check.
enum class Kind : int { Gaze = 0, Pupil = 1, Scroll = 2, Edit = 3, Bug = 4, Control = 5 };

Kind parse_kind(std::string_view s, std::size_t line) {
    if (s == "gaze") return Kind::Gaze;
    if (s == "pupil") return Kind::Pupil;
    if (s == "scroll") return Kind::Scroll;
    if (s == "edit") return Kind::Edit;
    if (s == "bug") return Kind::Bug;
    if (s == "control") return Kind::Control;
    throw ParseError(line, "unknown event type '" + std::string(s) + "'");
}

template <typename T>
T field(const Json& j, const char* name, std::size_t line) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(line, std::string("missing field '") + name + "'");
    try {
        return it->get<T>();
    } catch (const Json::exception&) {
        throw ParseError(line, std::string("bad value for field '") + name + "'");
    }
}

Millis time_field(const Json& j, std::size_t line) {
    auto it = j.find("t");
    if (it == j.end() || !it->is_number_integer())
        throw ParseError(line, "field 't' must be an integer");
    auto t = it->get<Millis>();
    if (t < 0) throw ParseError(line, "negative timestamp");
    return t;
}

Participant participant_field(const Json& j, std::size_t line) {
    auto p = parse_participant(field<std::string>(j, "p", line));
    if (!p) throw ParseError(line, "field 'p' must be \"P1\" or \"P2\"");
    return *p;
}

SessionHeader parse_header(const Json& j, std::size_t line) {
    if (!j.is_object() || !j.contains("layout"))
        throw ParseError(line, "missing header");
    SessionHeader h;
    const auto& l = j.at("layout");
    h.layout.doc_top_px = field<double>(l, "doc_top_px", line);
    h.layout.line_height_px = field<double>(l, "line_height_px", line);
    h.layout.total_lines = field<int>(l, "total_lines", line);
    h.layout.screen_w_px = field<double>(l, "screen_w_px", line);
    h.layout.screen_h_px = field<double>(l, "screen_h_px", line);
    h.pupil_rate_hz = field<double>(j, "pupil_rate_hz", line);
    h.gaze_rate_hz = field<double>(j, "gaze_rate_hz", line);
    auto b = field<std::vector<Millis>>(j, "baseline", line);
    if (b.size() != 2) throw ParseError(line, "baseline must be [t0, t1]");
    h.baseline_start = b[0];
    h.baseline_end = b[1];
    try {
        check_header(h);
    } catch (const DomainError& e) {
        throw ParseError(line, e.what());
    }
    return h;
}

}  // namespace

void validate(const SessionRecording& rec) {
    check_header(rec.header);
    if (!sorted_by_time(rec.gaze) || !sorted_by_time(rec.pupil) || !sorted_by_time(rec.scrolls) ||
        !sorted_by_time(rec.edits) || !sorted_by_time(rec.bugs) || !sorted_by_time(rec.controls))
        throw DomainError("streams must be sorted by timestamp");
    for (const auto& g : rec.gaze) {
        if (g.t < 0) throw DomainError("negative timestamp");
        if (g.valid && (g.x_norm < 0.0 || g.x_norm > 1.0 || g.y_norm < 0.0 || g.y_norm > 1.0))
            throw DomainError("gaze coordinates must lie in [0, 1]");
    }
    for (const auto& p : rec.pupil) {
        if (!(p.diameter_mm > 0.0)) throw DomainError("pupil diameter must be > 0");
    }
    for (const auto& s : rec.scrolls) {
        if (s.first_visible_line < 0 || s.first_visible_line >= rec.header.layout.total_lines)
            throw DomainError("scroll line outside document");
    }
    for (const auto& e : rec.edits) {
        if (e.lines_changed < 1) throw DomainError("edit must change at least one line");
    }
    std::set<std::string> ids;
    for (const auto& b : rec.bugs) {
        if (!ids.insert(b.bug_id).second) throw DomainError("bug '" + b.bug_id + "' fixed twice");
    }
}

SessionRecording parse_session(std::istream& in) {
    SessionRecording rec;
    std::string text;
    std::size_t line_no = 0;
    bool have_header = false;
    std::map<std::pair<int, int>, Millis> last_t;
    std::set<std::string> bug_ids;

    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!have_header) {
            if (j.contains("type")) throw ParseError(line_no, "missing header");
            rec.header = parse_header(j, line_no);
            have_header = true;
            continue;
        }
        if (!j.is_object()) throw ParseError(line_no, "event must be a JSON object");
        const Kind kind = parse_kind(field<std::string>(j, "type", line_no), line_no);
        const Millis t = time_field(j, line_no);
        int who = -1;

        switch (kind) {
            case Kind::Gaze: {
                GazeSample g;
                g.t = t;
                g.participant = participant_field(j, line_no);
                g.valid = field<bool>(j, "valid", line_no);
                if (g.valid) {
                    g.x_norm = field<double>(j, "x", line_no);
                    g.y_norm = field<double>(j, "y", line_no);
                    if (g.x_norm < 0.0 || g.x_norm > 1.0 || g.y_norm < 0.0 || g.y_norm > 1.0)
                        throw ParseError(line_no, "gaze coordinates must lie in [0, 1]");
                } else if (j.contains("x") || j.contains("y")) {
                    throw ParseError(line_no, "invalid gaze sample must not carry coordinates");
                }
                who = static_cast<int>(g.participant);
                rec.gaze.push_back(g);
                break;
            }
            case Kind::Pupil: {
                PupilSample p;
                p.t = t;
                p.participant = participant_field(j, line_no);
                p.diameter_mm = field<double>(j, "d", line_no);
                if (!(p.diameter_mm > 0.0)) throw ParseError(line_no, "pupil diameter must be > 0");
                who = static_cast<int>(p.participant);
                rec.pupil.push_back(p);
                break;
            }
            case Kind::Scroll: {
                ScrollEvent s{t, field<int>(j, "line", line_no)};
                if (s.first_visible_line < 0 || s.first_visible_line >= rec.header.layout.total_lines)
                    throw ParseError(line_no, "scroll line outside document");
                rec.scrolls.push_back(s);
                break;
            }
            case Kind::Edit: {
                CodeEditEvent e;
                e.t = t;
                e.participant = participant_field(j, line_no);
                e.lines_changed = field<int>(j, "lines", line_no);
                if (e.lines_changed < 1) throw ParseError(line_no, "edit must change at least one line");
                who = static_cast<int>(e.participant);
                rec.edits.push_back(e);
                break;
            }
            case Kind::Bug: {
                BugEvent b{t, field<std::string>(j, "id", line_no)};
                if (field<std::string>(j, "status", line_no) != "fixed")
                    throw ParseError(line_no, "bug status must be \"fixed\"");
                if (!bug_ids.insert(b.bug_id).second)
                    throw ParseError(line_no, "bug '" + b.bug_id + "' fixed twice");
                rec.bugs.push_back(std::move(b));
                break;
            }
            case Kind::Control: {
                auto k = parse_control_kind(field<std::string>(j, "kind", line_no));
                if (!k) throw ParseError(line_no, "control kind must be pause, cancel or ignore");
                rec.controls.push_back({t, *k});
                break;
            }
        }

        const auto key = std::make_pair(static_cast<int>(kind), who);
        auto [it, inserted] = last_t.try_emplace(key, t);
        if (!inserted) {
            if (t < it->second) throw ParseError(line_no, "out-of-order timestamp");
            it->second = t;
        }
    }
    if (!have_header) throw ParseError(std::max<std::size_t>(line_no, 1), "missing header");

    // Per-participant streams may interleave arbitrarily in the file; merge
    // them while keeping each stream's own order.
    stable_time_sort(rec.gaze);
    stable_time_sort(rec.pupil);
    stable_time_sort(rec.edits);
    return rec;
}

SessionRecording load_session(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open session file " + path.string());
    return parse_session(in);
}

void serialize_session(const SessionRecording& rec, std::ostream& out) {
    const auto& h = rec.header;
    OrderedJson header;
    header["layout"] = {{"doc_top_px", h.layout.doc_top_px},
                        {"line_height_px", h.layout.line_height_px},
                        {"total_lines", h.layout.total_lines},
                        {"screen_w_px", h.layout.screen_w_px},
                        {"screen_h_px", h.layout.screen_h_px}};
    header["pupil_rate_hz"] = h.pupil_rate_hz;
    header["gaze_rate_hz"] = h.gaze_rate_hz;
    header["baseline"] = {h.baseline_start, h.baseline_end};
    out << header.dump() << '\n';

    struct Ref {
        Millis t;
        int kind;
        int who;
        std::size_t index;
    };
    std::vector<Ref> refs;
    refs.reserve(rec.event_count());
    for (std::size_t i = 0; i < rec.gaze.size(); ++i)
        refs.push_back({rec.gaze[i].t, 0, static_cast<int>(rec.gaze[i].participant), i});
    for (std::size_t i = 0; i < rec.pupil.size(); ++i)
        refs.push_back({rec.pupil[i].t, 1, static_cast<int>(rec.pupil[i].participant), i});
    for (std::size_t i = 0; i < rec.scrolls.size(); ++i) refs.push_back({rec.scrolls[i].t, 2, 0, i});
    for (std::size_t i = 0; i < rec.edits.size(); ++i)
        refs.push_back({rec.edits[i].t, 3, static_cast<int>(rec.edits[i].participant), i});
    for (std::size_t i = 0; i < rec.bugs.size(); ++i) refs.push_back({rec.bugs[i].t, 4, 0, i});
    for (std::size_t i = 0; i < rec.controls.size(); ++i) refs.push_back({rec.controls[i].t, 5, 0, i});
    std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
        return std::tie(a.t, a.kind, a.who, a.index) < std::tie(b.t, b.kind, b.who, b.index);
    });

    for (const auto& r : refs) {
        OrderedJson j;
        switch (r.kind) {
            case 0: {
                const auto& g = rec.gaze[r.index];
                j["type"] = "gaze";
                j["t"] = g.t;
                j["p"] = to_string(g.participant);
                if (g.valid) {
                    j["x"] = g.x_norm;
                    j["y"] = g.y_norm;
                }
                j["valid"] = g.valid;
                break;
            }
            case 1: {
                const auto& p = rec.pupil[r.index];
                j["type"] = "pupil";
                j["t"] = p.t;
                j["p"] = to_string(p.participant);
                j["d"] = p.diameter_mm;
                break;
            }
            case 2:
                j["type"] = "scroll";
                j["t"] = rec.scrolls[r.index].t;
                j["line"] = rec.scrolls[r.index].first_visible_line;
                break;
            case 3: {
                const auto& e = rec.edits[r.index];
                j["type"] = "edit";
                j["t"] = e.t;
                j["p"] = to_string(e.participant);
                j["lines"] = e.lines_changed;
                break;
            }
            case 4:
                j["type"] = "bug";
                j["t"] = rec.bugs[r.index].t;
                j["id"] = rec.bugs[r.index].bug_id;
                j["status"] = "fixed";
                break;
            default:
                j["type"] = "control";
                j["t"] = rec.controls[r.index].t;
                j["kind"] = to_string(rec.controls[r.index].kind);
                break;
        }
        out << j.dump() << '\n';
    }
}

std::string serialize_session(const SessionRecording& rec) {
    std::ostringstream out;
    serialize_session(rec, out);
    return out.str();
}

void save_session(const SessionRecording& rec, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_session(rec));
}

}  // namespace ssrl
