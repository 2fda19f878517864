// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

#include "ssrl/effort.hpp"
#include "ssrl/gaze.hpp"

namespace ssrl {

namespace {

using nlohmann::json;

// --- script JSON -------------------------------------------------------------

std::array<Level, 4> parse_target(const json& j) {
    if (!j.is_array() || j.size() != 4) throw DomainError("script: target must list 4 levels");
    std::array<Level, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!j[i].is_string()) throw DomainError("script: target levels must be strings");
        const auto l = parse_level(j[i].get<std::string>());
        if (!l) throw DomainError("script: unknown level '" + j[i].get<std::string>() + "'");
        out[i] = *l;
    }
    return out;
}

ScenarioScript script_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("script: expected an object");
    ScenarioScript s;
    try {
        s.name = j.value("name", std::string{});
        s.rest_ms = j.value("rest_ms", s.rest_ms);
        if (j.contains("expect_scenario")) s.expect_scenario = j.at("expect_scenario").get<int>();
        if (!j.contains("segments") || !j.at("segments").is_array())
            throw DomainError("script: missing segments");
        for (const auto& js : j.at("segments")) {
            ScriptSegment seg;
            seg.duration_ms = js.at("duration_ms").get<Millis>();
            seg.target = parse_target(js.at("target"));
            if (js.contains("jva_mix")) {
                const auto& m = js.at("jva_mix");
                if (!m.is_array() || m.size() != 2) throw DomainError("script: jva_mix needs 2 values");
                seg.jva_mix = std::array<double, 2>{m[0].get<double>(), m[1].get<double>()};
            }
            seg.edits_per_min = js.value("edits_per_min", 0.0);
            if (js.contains("bug_fix_times"))
                seg.bug_fix_times = js.at("bug_fix_times").get<std::vector<Millis>>();
            s.segments.push_back(std::move(seg));
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("script: ") + e.what());
    }
    s.validate();
    return s;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("script: ") + e.what());
    }
}

// --- randomness ----------------------------------------------------------------
// Own helpers over mt19937_64 so output doesn't depend on the standard
// library's distribution implementations.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}

    double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int below(int n) { return static_cast<int>(uniform() * n); }
    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(static_cast<int>(i)))]);
        }
    }

  private:
    std::mt19937_64 g_;
};

// --- effort plan ------------------------------------------------------------------

constexpr int kMaxSpikes = 18;
constexpr int kContext = 6;
constexpr int kWindowsPerTick = static_cast<int>(kGeneratorTickMs / kGeneratorMeWindowMs);
constexpr int kSamplesPerMeWindow = 600;  // 60 Hz
constexpr double kMargin = 0.02;

// Anchors pin each participant's whole-session ME range to [0, 1.8].
constexpr std::array<std::array<int, 3>, 2> kAnchor{{{0, kMaxSpikes, 9}, {kMaxSpikes, 0, 9}}};
// Resting spike counts; both sets land on bins {2, 3, 4}.
constexpr std::array<std::array<int, 3>, 2> kRestSet{{{3, 5, 7}, {4, 6, 8}}};

int bin_of(int k) { return me_bin(k / 10.0, 0.0, kMaxSpikes / 10.0); }

double crqa_of(const std::array<int, kContext>& a, const std::array<int, kContext>& b) {
    std::array<int, kMeLevels> ha{}, hb{};
    for (int i = 0; i < kContext; ++i) {
        ++ha[static_cast<std::size_t>(a[i])];
        ++hb[static_cast<std::size_t>(b[i])];
    }
    int m = 0;
    for (int v = 0; v < kMeLevels; ++v) m += ha[v] * hb[v];
    return double(m) / (kContext * kContext);
}

struct Band {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

Band band_of(Metric m, std::span<const double> rest) {
    const auto b = compute_baseline(m, rest);
    return {b.mean, b.mean - kDefaultSdK * b.sd, b.mean + kDefaultSdK * b.sd};
}

bool in_level(double v, Level l, const Band& b) {
    switch (l) {
        case Level::H: return v > b.hi + kMargin;
        case Level::L: return v < b.lo - kMargin;
        case Level::AVG: return v >= b.lo + kMargin && v <= b.hi - kMargin;
    }
    return false;
}

std::vector<int> spike_set(Level l, const Band& b) {
    std::vector<int> out;
    const int centre = static_cast<int>(std::lround(b.mean * 10));
    for (int k = 0; k <= kMaxSpikes; ++k) {
        if (!in_level(k / 10.0, l, b)) continue;
        if (l == Level::L && k > 2) continue;
        if (l == Level::H && k < 14) continue;
        if (l == Level::AVG && std::abs(k - centre) > 1) continue;
        out.push_back(k);
    }
    return out;
}

// Smallest spike count for each bin.
std::array<int, kMeLevels> bin_representatives() {
    std::array<int, kMeLevels> rep{};
    rep.fill(-1);
    for (int k = kMaxSpikes; k >= 0; --k) rep[static_cast<std::size_t>(bin_of(k))] = k;
    return rep;
}

struct EffortPlan {
    std::vector<std::array<int, 2>> spikes;  // per ME window
    std::array<Band, 2> me_band;
};

/// Resting JME values exactly as the pipeline computes them.
std::vector<double> rest_jme(const std::vector<std::array<int, 2>>& spikes, std::size_t first,
                             std::size_t count) {
    std::vector<double> out;
    for (std::size_t k = first + kContext - 1; k < first + count; ++k) {
        std::array<int, kContext> a{}, b{};
        for (int i = 0; i < kContext; ++i) {
            a[i] = bin_of(spikes[k + 1 - kContext + i][0]);
            b[i] = bin_of(spikes[k + 1 - kContext + i][1]);
        }
        out.push_back(crqa_of(a, b));
    }
    return out;
}

bool workable(const Band& jme) {
    if (!(jme.hi + kMargin < 0.6 && jme.lo - kMargin > 0.12)) return false;
    for (int m = 0; m <= kContext * kContext; ++m) {
        const double v = double(m) / (kContext * kContext);
        if (in_level(v, Level::AVG, jme)) return true;
    }
    return false;
}

std::string describe(const std::array<Level, 4>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < 4; ++i) {
        if (i) s += ",";
        s += to_string(t[i]);
    }
    return s + ")";
}

EffortPlan plan_effort(const ScenarioScript& script, Rng& rng) {
    const auto rest_n = static_cast<std::size_t>(script.rest_ms / kGeneratorMeWindowMs);
    const std::size_t first_rest = kAnchor[0].size();
    EffortPlan plan;
    Band jme_band;

    for (int attempt = 0;; ++attempt) {
        if (attempt == 1000) throw UnreachableTargetError("generator: no usable resting baseline");
        plan.spikes.clear();
        for (std::size_t i = 0; i < first_rest; ++i) plan.spikes.push_back({kAnchor[0][i], kAnchor[1][i]});
        std::array<std::vector<int>, 2> seq;
        for (int p = 0; p < 2; ++p) {
            while (seq[p].size() < rest_n) {
                std::vector<int> block(kRestSet[p].begin(), kRestSet[p].end());
                rng.shuffle(block);
                seq[p].insert(seq[p].end(), block.begin(), block.end());
            }
        }
        for (std::size_t i = 0; i < rest_n; ++i) plan.spikes.push_back({seq[0][i], seq[1][i]});
        jme_band = band_of(Metric::JME, rest_jme(plan.spikes, first_rest, rest_n));
        if (workable(jme_band)) break;
    }
    for (int p = 0; p < 2; ++p) {
        std::vector<double> me;
        for (std::size_t i = 0; i < rest_n; ++i) me.push_back(plan.spikes[first_rest + i][p] / 10.0);
        plan.me_band[p] = band_of(p == 0 ? Metric::ME1 : Metric::ME2, me);
    }

    // Pairs of filler bins, order-free for the recurrence count.
    const auto rep = bin_representatives();
    std::vector<std::array<int, 2>> filler_pairs;
    for (int x = 0; x < kMeLevels; ++x)
        for (int y = x; y < kMeLevels; ++y) filler_pairs.push_back({rep[x], rep[y]});

    struct Choice {
        std::array<int, 2> fa, fb;
        int w1, w2;
    };

    for (std::size_t s = 0; s < script.segments.size(); ++s) {
        const auto& seg = script.segments[s];
        const auto ticks = seg.duration_ms / kGeneratorTickMs;
        const auto w1_set = spike_set(seg.target[2], plan.me_band[0]);
        const auto w2_set = spike_set(seg.target[3], plan.me_band[1]);
        if (w1_set.empty() || w2_set.empty())
            throw UnreachableTargetError("segment " + std::to_string(s) + ": ME target " +
                                         describe(seg.target) + " not reachable");
        const Level jme_level = seg.target[1];

        struct Scored {
            Choice c;
            bool ok;
            double score;
        };
        // Every candidate for the three new windows after `prev`, scored
        // against the segment's JME target.
        const auto candidates = [&](const std::array<std::array<int, 2>, 3>& prev) {
            std::array<int, kContext> a{}, b{};
            for (int i = 0; i < kContext - kWindowsPerTick; ++i) {
                a[i] = bin_of(prev[i][0]);
                b[i] = bin_of(prev[i][1]);
            }
            std::vector<Scored> out;
            for (const auto& fa : filler_pairs) {
                for (const auto& fb : filler_pairs) {
                    for (int w1 : w1_set) {
                        for (int w2 : w2_set) {
                            a[3] = bin_of(fa[0]), a[4] = bin_of(fa[1]), a[5] = bin_of(w1);
                            b[3] = bin_of(fb[0]), b[4] = bin_of(fb[1]), b[5] = bin_of(w2);
                            const double v = crqa_of(a, b);
                            const double score = jme_level == Level::H   ? v
                                                 : jme_level == Level::L ? -v
                                                                         : -std::abs(v - jme_band.mean);
                            out.push_back({{fa, fb, w1, w2}, in_level(v, jme_level, jme_band), score});
                        }
                    }
                }
            }
            return out;
        };
        const auto windows_of = [](const Choice& c) {
            return std::array<std::array<int, 2>, 3>{{{c.fa[0], c.fb[0]}, {c.fa[1], c.fb[1]}, {c.w1, c.w2}}};
        };
        const auto next_reachable = [&](const Choice& c) {
            const auto next = candidates(windows_of(c));
            return std::any_of(next.begin(), next.end(), [](const Scored& x) { return x.ok; });
        };

        for (Millis j = 0; j < ticks; ++j) {
            const std::size_t base = plan.spikes.size();
            std::array<std::array<int, 2>, 3> prev{};
            for (int i = 0; i < kContext - kWindowsPerTick; ++i)
                prev[i] = plan.spikes[base - (kContext - kWindowsPerTick) + i];
            const auto all = candidates(prev);
            double best = -std::numeric_limits<double>::infinity();
            bool best_ok = false;
            std::vector<Choice> ties;
            for (const auto& x : all) {
                if ((x.ok && !best_ok) || (x.ok == best_ok && x.score > best + 1e-12)) {
                    best = x.score;
                    best_ok = x.ok;
                    ties.clear();
                }
                if (x.ok == best_ok && std::abs(x.score - best) <= 1e-12) ties.push_back(x.c);
            }
            // Steady state: the whole context lies inside this segment.
            if (!best_ok && j >= 1) {
                throw UnreachableTargetError("segment " + std::to_string(s) + ": JME " +
                                             std::string(to_string(jme_level)) + " with " +
                                             describe(seg.target) + " not reachable");
            }
            auto c = ties[static_cast<std::size_t>(rng.below(static_cast<int>(ties.size())))];
            // On a transition tick the pick also fixes half of the next
            // context; fall back to the best pick that keeps it reachable.
            if (j == 0 && ticks >= 2 && !next_reachable(c)) {
                std::vector<Scored> ranked = all;
                std::stable_sort(ranked.begin(), ranked.end(), [](const Scored& x, const Scored& y) {
                    return x.ok != y.ok ? x.ok : x.score > y.score;
                });
                const auto it = std::find_if(ranked.begin(), ranked.end(),
                                             [&](const Scored& x) { return next_reachable(x.c); });
                if (it != ranked.end()) c = it->c;
            }
            if (rng.below(2)) std::swap(c.fa[0], c.fa[1]);
            if (rng.below(2)) std::swap(c.fb[0], c.fb[1]);
            plan.spikes.push_back({c.fa[0], c.fb[0]});
            plan.spikes.push_back({c.fa[1], c.fb[1]});
            plan.spikes.push_back({c.w1, c.w2});
        }
    }
    return plan;
}

// --- gaze plan ------------------------------------------------------------------------

std::vector<double> plan_mixing(const ScenarioScript& script, Rng& rng) {
    std::vector<double> mix;
    mix.push_back(0.5);  // anchor window
    const auto rest_n = static_cast<std::size_t>(script.rest_ms / kGeneratorTickMs);
    std::vector<double> rest;
    while (rest.size() < rest_n) {
        std::vector<double> block{0.42, 0.45, 0.48, 0.52, 0.55, 0.58};
        rng.shuffle(block);
        rest.insert(rest.end(), block.begin(), block.end());
    }
    mix.insert(mix.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(rest_n));
    for (const auto& seg : script.segments) {
        const auto n = seg.duration_ms / kGeneratorTickMs;
        for (Millis i = 0; i < n; ++i) {
            if (seg.jva_mix) {
                const double f = (double(i) + 0.5) / double(n);
                mix.push_back((*seg.jva_mix)[0] + ((*seg.jva_mix)[1] - (*seg.jva_mix)[0]) * f);
                continue;
            }
            switch (seg.target[0]) {
                case Level::H: mix.push_back(rng.uniform(0.97, 1.0)); break;
                case Level::L: mix.push_back(rng.uniform(0.0, 0.03)); break;
                case Level::AVG: mix.push_back(rng.uniform(0.49, 0.51)); break;
            }
        }
    }
    return mix;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

void ScenarioScript::validate() const {
    if (rest_ms <= 0 || rest_ms % kGeneratorTickMs != 0)
        throw DomainError("script: rest_ms must be a positive multiple of 30000");
    if (rest_ms < 3 * kGeneratorTickMs) throw DomainError("script: rest_ms must be at least 90000");
    if (segments.empty()) throw DomainError("script: no segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        const auto where = "script: segment " + std::to_string(i) + ": ";
        if (s.duration_ms <= 0 || s.duration_ms % kGeneratorTickMs != 0)
            throw DomainError(where + "duration_ms must be a positive multiple of 30000");
        if (s.edits_per_min < 0) throw DomainError(where + "edits_per_min must be >= 0");
        if (s.jva_mix) {
            for (double m : *s.jva_mix)
                if (!(m >= 0.0 && m <= 1.0)) throw DomainError(where + "jva_mix must be in [0,1]");
        }
        for (auto t : s.bug_fix_times)
            if (t < 0 || t >= s.duration_ms) throw DomainError(where + "bug_fix_time outside segment");
    }
}

std::string ScenarioScript::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["rest_ms"] = rest_ms;
    if (expect_scenario) j["expect_scenario"] = *expect_scenario;
    auto segs = nlohmann::ordered_json::array();
    for (const auto& s : segments) {
        nlohmann::ordered_json js;
        js["duration_ms"] = s.duration_ms;
        auto t = nlohmann::ordered_json::array();
        for (auto l : s.target) t.push_back(std::string(to_string(l)));
        js["target"] = t;
        if (s.jva_mix) js["jva_mix"] = {(*s.jva_mix)[0], (*s.jva_mix)[1]};
        js["edits_per_min"] = s.edits_per_min;
        js["bug_fix_times"] = s.bug_fix_times;
        segs.push_back(js);
    }
    j["segments"] = segs;
    return j.dump(2);
}

std::vector<ScenarioScript> parse_scripts(std::string_view text) {
    const auto j = parse_json(text);
    std::vector<ScenarioScript> out;
    if (j.is_object() && j.contains("scripts")) {
        if (!j.at("scripts").is_array()) throw DomainError("script bundle: scripts must be a list");
        for (const auto& s : j.at("scripts")) out.push_back(script_from_json(s));
    } else {
        out.push_back(script_from_json(j));
    }
    if (out.empty()) throw DomainError("script bundle: empty");
    return out;
}

ScenarioScript parse_script(std::string_view text) { return script_from_json(parse_json(text)); }

SessionRecording generate_session(const ScenarioScript& script, std::uint64_t seed) {
    script.validate();
    Rng rng(seed);

    SessionRecording rec;
    rec.header.pupil_rate_hz = 60.0;
    rec.header.gaze_rate_hz = 30.0;
    rec.header.baseline_start = kAnchorMs;
    rec.header.baseline_end = kAnchorMs + script.rest_ms;
    const auto& layout = rec.header.layout;

    Millis end = rec.header.baseline_end;
    for (const auto& s : script.segments) end += s.duration_ms;

    const auto effort = plan_effort(script, rng);
    const auto mix = plan_mixing(script, rng);

    // Pupil: a flat base per ME window plus exactly K isolated spikes.
    const auto n_me = effort.spikes.size();
    std::vector<std::array<double, 2>> base(n_me + 1);
    std::vector<std::array<std::set<int>, 2>> spike_at(n_me);
    std::vector<std::array<std::vector<double>, 2>> spike_amp(n_me);
    std::array<double, 2> level{3.6, 3.9};
    for (std::size_t w = 0; w <= n_me; ++w) {
        for (int p = 0; p < 2; ++p) {
            level[p] = std::clamp(level[p] + 0.05 * rng.normal(), 3.0, 4.5);
            base[w][p] = round_to(level[p], 0.01);
            if (w == n_me) continue;
            const int k = effort.spikes[w][p];
            const double slot = double(kSamplesPerMeWindow) / std::max(k, 1);
            for (int s = 0; s < k; ++s) {
                const int pos = static_cast<int>(std::lround(slot * (s + 0.5))) + rng.below(5) - 2;
                spike_at[w][p].insert(pos);
                spike_amp[w][p].push_back(round_to(rng.uniform(0.1, 0.5), 0.01));
            }
        }
    }
    for (std::int64_t i = 0;; ++i) {
        const Millis t = static_cast<Millis>(std::llround(double(i) * 1000.0 / 60.0));
        if (t > end) break;
        const auto w = static_cast<std::size_t>(i / kSamplesPerMeWindow);
        const int local = static_cast<int>(i % kSamplesPerMeWindow);
        for (int p = 0; p < 2; ++p) {
            double d = base[std::min(w, n_me)][p];
            if (w < n_me) {
                const auto& at = spike_at[w][p];
                if (auto it = at.find(local); it != at.end()) {
                    d = round_to(d + spike_amp[w][p][static_cast<std::size_t>(std::distance(at.begin(), it))], 0.01);
                }
            }
            rec.pupil.push_back({t, static_cast<Participant>(p), d});
        }
    }

    // Scrolling between three offsets; gaze targets are absolute code lines.
    constexpr std::array<int, 3> kOffsets{0, 6, 12};
    int fv = 0;
    for (Millis t = static_cast<Millis>(rng.uniform(20000, 60000)); t < end;
         t += static_cast<Millis>(rng.uniform(20000, 60000))) {
        int next = kOffsets[static_cast<std::size_t>(rng.below(3))];
        if (next == fv) next = kOffsets[(static_cast<std::size_t>(next / 6) + 1) % 3];
        fv = next;
        rec.scrolls.push_back({t, fv});
    }

    // Gaze: each sample comes from the shared cell set with probability m,
    // else from the participant's private set.
    std::vector<CellIndex> cells;
    for (int r = 2; r <= 6; ++r)
        for (int c = 0; c < 10; ++c) cells.push_back({r, c});
    rng.shuffle(cells);
    const std::array<std::vector<CellIndex>, 3> sets{
        std::vector<CellIndex>(cells.begin(), cells.begin() + 10),
        std::vector<CellIndex>(cells.begin() + 10, cells.begin() + 20),
        std::vector<CellIndex>(cells.begin() + 20, cells.begin() + 30)};
    for (std::int64_t i = 0;; ++i) {
        const Millis t = static_cast<Millis>(std::llround(double(i) * 1000.0 / 30.0));
        if (t > end) break;
        const auto w = std::min(static_cast<std::size_t>(t / kGeneratorTickMs), mix.size() - 1);
        const int offset = scroll_at(rec.scrolls, t);
        for (int p = 0; p < 2; ++p) {
            GazeSample g{t, static_cast<Participant>(p), 0.0, 0.0, true};
            if (rng.uniform() < 0.02) {
                g.valid = false;
            } else {
                const auto& set = rng.uniform() < mix[w] ? sets[0] : sets[static_cast<std::size_t>(1 + p)];
                const auto cell = set[static_cast<std::size_t>(rng.below(10))];
                const int line = cell.row * 6 + rng.below(6);
                const double y_px = layout.doc_top_px + (line - offset + 0.5) * layout.line_height_px;
                g.y_norm = round_to(y_px / layout.screen_h_px, 1e-4);
                g.x_norm = round_to((cell.col + rng.uniform(0.1, 0.9)) / 10.0, 1e-4);
            }
            rec.gaze.push_back(g);
        }
    }

    // Task events.
    Millis seg_start = rec.header.baseline_end;
    int bug_no = 0;
    for (const auto& seg : script.segments) {
        if (seg.edits_per_min > 0) {
            for (double t = seg_start + rng.exponential(seg.edits_per_min / 60000.0);
                 t < double(seg_start + seg.duration_ms);
                 t += rng.exponential(seg.edits_per_min / 60000.0)) {
                rec.edits.push_back({static_cast<Millis>(t), static_cast<Participant>(rng.below(2)),
                                     1 + rng.below(5)});
            }
        }
        auto fixes = seg.bug_fix_times;
        std::sort(fixes.begin(), fixes.end());
        for (auto t : fixes) rec.bugs.push_back({seg_start + t, "bug-" + std::to_string(++bug_no)});
        seg_start += seg.duration_ms;
    }

    validate(rec);
    return rec;
}

}  // namespace ssrl
