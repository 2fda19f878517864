// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ssrl/gaze.hpp"
#include "ssrl/io.hpp"

namespace ssrl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Millis sample_period(double rate_hz) {
    return static_cast<Millis>(std::ceil(1000.0 / rate_hz));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

void PipelineConfig::validate() const {
    if (jva_window_ms <= 0 || jme_window_ms <= 0) throw DomainError("windows must be positive");
    if (jva_window_ms % jme_window_ms != 0)
        throw DomainError("jva window must be a whole number of jme windows");
    if (!(sd_k > 0)) throw DomainError("sd_k must be positive");
    if (cols < 1) throw DomainError("cols must be at least 1");
    if (jme_context < 1) throw DomainError("jme context must be at least 1");
}

std::string session_hash(const SessionRecording& rec) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_session(rec))));
    return buf;
}

MetricTimeline compute_timeline(const SessionRecording& rec, const PipelineConfig& cfg) {
    cfg.validate();
    const auto& h = rec.header;
    const Millis horizon =
        rec.last_timestamp() +
        sample_period(std::min(h.pupil_rate_hz, h.gaze_rate_hz));
    const Millis b0 = h.baseline_start;
    const Millis b1 = h.baseline_end;

    MetricTimeline tl;
    tl.session_hash = session_hash(rec);

    // ME per participant.
    const std::span<const PupilSample> pupil(rec.pupil);
    for (const auto& slice : windows(pupil, cfg.jme_window_ms, cfg.jme_window_ms, horizon)) {
        if (slice.window.end > horizon) break;
        MeWindow mw;
        mw.window = slice.window;
        mw.rest = slice.window.start >= b0 && slice.window.end <= b1;
        for (int p = 0; p < 2; ++p) {
            try {
                mw.me[p] = ipa(slice.samples, slice.window, static_cast<Participant>(p),
                               h.pupil_rate_hz, cfg.ipa)
                               .value;
            } catch (const PupilDataError&) {
                mw.me[p] = kNaN;
            }
        }
        tl.me.push_back(mw);
    }

    for (int p = 0; p < 2; ++p) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& mw : tl.me) {
            if (std::isnan(mw.me[p])) continue;
            lo = std::min(lo, mw.me[p]);
            hi = std::max(hi, mw.me[p]);
        }
        if (lo > hi) lo = hi = 0.0;
        tl.me_range[p] = {lo, hi};
        for (auto& mw : tl.me) {
            if (!std::isnan(mw.me[p])) mw.bin[p] = me_bin(mw.me[p], lo, hi);
        }
    }

    // JME over the trailing context ending at each ME window.
    const auto ctx = static_cast<std::size_t>(cfg.jme_context);
    for (std::size_t k = 0; k < tl.me.size(); ++k) {
        tl.me[k].jme = kNaN;
        if (k + 1 < ctx) continue;
        std::vector<int> a, b;
        std::vector<double> ra, rb;
        bool ok = true;
        for (std::size_t i = k + 1 - ctx; i <= k && ok; ++i) {
            const auto& mw = tl.me[i];
            ok = mw.bin[0] >= 0 && mw.bin[1] >= 0;
            a.push_back(mw.bin[0]);
            b.push_back(mw.bin[1]);
            ra.push_back(mw.me[0]);
            rb.push_back(mw.me[1]);
        }
        if (!ok) continue;
        tl.me[k].jme = cfg.jme_method == JmeMethod::Crqa ? jme_crqa(a, b).value
                                                         : jme_cosine(ra, rb).value;
    }

    // JVA per window.
    const auto spec = GridSpec::for_layout(h.layout, cfg.cols);
    const std::span<const GazeSample> gaze(rec.gaze);
    std::vector<Window> jva_windows;
    for (const auto& slice : windows(gaze, cfg.jva_window_ms, cfg.jva_window_ms, horizon)) {
        if (slice.window.end > horizon) break;
        const auto g1 = accumulate(slice.samples, h.layout, rec.scrolls, spec, slice.window,
                                   Participant::P1);
        const auto g2 = accumulate(slice.samples, h.layout, rec.scrolls, spec, slice.window,
                                   Participant::P2);
        tl.jva.push_back(jva_cosine(g1, g2).value);
        jva_windows.push_back(slice.window);
    }

    // Resting baselines.
    std::array<std::vector<double>, 4> rest;
    for (std::size_t j = 0; j < jva_windows.size(); ++j) {
        if (jva_windows[j].start >= b0 && jva_windows[j].end <= b1) {
            rest[0].push_back(tl.jva[j]);
        }
    }
    for (std::size_t k = 0; k < tl.me.size(); ++k) {
        const auto& mw = tl.me[k];
        if (!mw.rest) continue;
        if (!std::isnan(mw.me[0])) rest[2].push_back(mw.me[0]);
        if (!std::isnan(mw.me[1])) rest[3].push_back(mw.me[1]);
        // JME counts only when its whole context lies in the rest segment.
        if (k + 1 >= ctx && tl.me[k + 1 - ctx].rest && !std::isnan(mw.jme)) {
            rest[1].push_back(mw.jme);
        }
    }
    for (auto m : kMetrics) {
        tl.baselines[static_cast<std::size_t>(m)] =
            compute_baseline(m, rest[static_cast<std::size_t>(m)]);
    }

    // Task ticks. A missing ME or JME value holds the previous tick's value,
    // or the baseline mean before the first.
    const Millis per_tick = cfg.jva_window_ms / cfg.jme_window_ms;
    MetricVector carry{};
    for (auto m : kMetrics) carry[static_cast<std::size_t>(m)] = tl.baselines[static_cast<std::size_t>(m)].mean;
    std::int64_t index = 0;
    for (std::size_t j = 0; j < jva_windows.size(); ++j) {
        const auto& w = jva_windows[j];
        if (w.start < b1) continue;
        MetricVector raw = carry;
        raw[0] = tl.jva[j];
        const auto k = static_cast<std::size_t>(w.index * per_tick + per_tick - 1);
        if (k < tl.me.size()) {
            const auto& mw = tl.me[k];
            if (!std::isnan(mw.jme)) raw[1] = mw.jme;
            if (!std::isnan(mw.me[0])) raw[2] = mw.me[0];
            if (!std::isnan(mw.me[1])) raw[3] = mw.me[1];
        }
        carry = raw;
        tl.ticks.push_back({index++, make_state(w, raw, tl.baselines, cfg.sd_k)});
    }
    return tl;
}

MetricSeries MetricTimeline::series() const {
    MetricSeries s;
    s.baselines = baselines;
    s.session_hash = session_hash;
    s.values.reserve(ticks.size());
    for (const auto& t : ticks) s.values.push_back(t.raw());
    return s;
}

void MetricTimeline::write_ticks_csv(std::ostream& out) const {
    out << "tick,t,jva,jme,me1,me2,jva_level,jme_level,me1_level,me2_level,scenario\n";
    const auto& table = ScenarioTable::builtin();
    for (const auto& t : ticks) {
        out << t.index << ',' << t.t();
        for (double v : t.raw()) out << ',' << fmt(v);
        for (auto l : t.state.level) out << ',' << to_string(l);
        out << ',' << table.classify(t.state.level).id << '\n';
    }
}

void MetricTimeline::write_effort_csv(std::ostream& out) const {
    out << "t,participant,value\n";
    for (const auto& mw : me) {
        const auto t = mw.window.end;
        out << t << ",P1," << fmt(mw.me[0]) << '\n';
        out << t << ",P2," << fmt(mw.me[1]) << '\n';
        if (!std::isnan(mw.jme)) out << t << ",joint," << fmt(mw.jme) << '\n';
    }
}

}  // namespace ssrl
