// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/effort.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ssrl/similarity.hpp"

namespace ssrl {

namespace {

constexpr std::array<double, 16> kSym8 = {
    -0.0033824159510061256, -0.00054213233179114812,
    0.031695087811492981,   0.0076074873249176054,
    -0.14329423835080971,   -0.061273359067658524,
    0.48135965125837221,    0.77718575170052351,
    0.3644418948353314,     -0.051945838107709037,
    -0.027219029917056003,  0.049137179673607506,
    0.0038087520138906151,  -0.014952258337048231,
    -0.0003029205147213668, 0.0018899503327594609,
};

constexpr std::array<double, 32> kSym16 = {
    6.2300067012207606e-06,  -3.1135564076219692e-06,
    -0.00010943147929529757, 2.8078582128442894e-05,
    0.00085235471080470952,  -0.0001084456223089688,
    -0.0038809122526038786,  0.00071821197883178923,
    0.012666731659857348,    -0.0031265171722710075,
    -0.031051202843553064,   0.0048692744049046071,
    0.032333091610663785,    -0.066983049070217779,
    -0.034574228416972504,   0.39712293362064416,
    0.75652498787569711,     0.47534280601152273,
    -0.054040601387606135,   -0.15959219218520598,
    0.03072113906330156,     0.078037852903419913,
    -0.0035102750683740089,  -0.024952758046290123,
    0.001359844742484172,    0.0069377611308027096,
    -0.00022211647621176323, -0.0013387206066921965,
    3.656592483348223e-05,   0.00016545679579108483,
    -5.3964831793152419e-06, -1.0797982104319795e-05,
};

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// One analysis step; `x` is already even-length.
void analysis_step(std::span<const double> x, std::span<const double> lo,
                   std::span<const double> hi, std::vector<double>& approx,
                   std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t taps = lo.size();
    const std::size_t half = n / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        // x index (2k + taps/2 - j) mod n, kept non-negative.
        const std::size_t base = 2 * k + taps / 2 + n * (taps / n + 1);
        for (std::size_t j = 0; j < taps; ++j) {
            const double v = x[(base - j) % n];
            a += lo[j] * v;
            d += hi[j] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

}  // namespace

std::span<const double> wavelet_lowpass(WaveletFamily family) {
    if (family == WaveletFamily::Sym16) return kSym16;
    return kSym8;
}

std::vector<double> wavelet_highpass(WaveletFamily family) {
    const auto lo = wavelet_lowpass(family);
    const std::size_t taps = lo.size();
    std::vector<double> hi(taps);
    for (std::size_t j = 0; j < taps; ++j) {
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;
        hi[j] = sign * lo[taps - 1 - j];
    }
    return hi;
}

WaveletDecomposition dwt_periodized(std::span<const double> signal, WaveletFamily family,
                                    int levels) {
    if (levels < 1) throw DomainError("dwt: at least one level required");
    if (signal.size() < 2) throw DomainError("dwt: signal needs at least two samples");
    const auto lo = wavelet_lowpass(family);
    const auto hi = wavelet_highpass(family);

    WaveletDecomposition out;
    std::vector<double> current(signal.begin(), signal.end());
    for (int level = 0; level < levels; ++level) {
        if (current.size() % 2 == 1) current.push_back(current.back());
        std::vector<double> approx;
        std::vector<double> detail;
        analysis_step(current, lo, hi, approx, detail);
        out.details.push_back(std::move(detail));
        current = std::move(approx);
    }
    out.approximation = std::move(current);
    return out;
}

std::vector<double> modulus_maxima(std::span<const double> detail) {
    const std::size_t n = detail.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double here = std::abs(detail[i]);
        const double left = i >= 1 ? std::abs(detail[i - 1]) : here;
        const double right = i + 1 < n ? std::abs(detail[i + 1]) : here;
        if (left <= here && here >= right && (left < here || here > right)) out[i] = here;
    }
    return out;
}

IpaConfig IpaConfig::duchowski() {
    IpaConfig c;
    c.wavelet = WaveletFamily::Sym16;
    c.levels = 2;
    c.detail_level = 2;
    c.noise = NoiseEstimate::MaximaStdDev;
    c.log = ThresholdLog::Base2;
    return c;
}

IpaCount ipa_count(std::span<const double> signal, const IpaConfig& cfg) {
    if (cfg.detail_level < 1 || cfg.detail_level > cfg.levels)
        throw DomainError("ipa: detail level must lie in 1..levels");
    const auto dec = dwt_periodized(signal, cfg.wavelet, cfg.levels);
    const auto& d = dec.details[static_cast<std::size_t>(cfg.detail_level - 1)];
    const auto maxima = modulus_maxima(d);
    const std::size_t n = d.size();

    double sigma = 0.0;
    if (cfg.noise == NoiseEstimate::MedianAbsoluteDeviation) {
        const double med = median_of(d);
        std::vector<double> dev(n);
        std::transform(d.begin(), d.end(), dev.begin(),
                       [med](double v) { return std::abs(v - med); });
        sigma = median_of(std::move(dev)) / 0.6745;
    } else {
        const double mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / double(n);
        double ss = 0.0;
        for (double m : maxima) ss += (m - mean) * (m - mean);
        sigma = std::sqrt(ss / double(n));
    }
    const double logn = cfg.log == ThresholdLog::Natural ? std::log(double(n)) : std::log2(double(n));
    const double lambda = sigma * std::sqrt(2.0 * logn);

    double peak = 0.0;
    for (double v : signal) peak = std::max(peak, std::abs(v));
    const double floor = 1e-9 * peak;

    IpaCount out;
    out.threshold = lambda;
    for (double m : maxima) {
        if (m > floor && m >= lambda) ++out.surviving_maxima;
    }
    return out;
}

double ipa_signal(std::span<const double> signal, double duration_s, const IpaConfig& cfg) {
    if (!(duration_s > 0.0)) throw DomainError("ipa: duration must be positive");
    return static_cast<double>(ipa_count(signal, cfg).surviving_maxima) / duration_s;
}

std::vector<double> preprocess_pupil(std::span<const PupilSample> samples, const Window& window,
                                     double rate_hz, const IpaConfig& cfg) {
    if (samples.size() < 2) throw PupilDataError("ipa: fewer than two pupil samples in window");
    if (!(rate_hz > 0.0)) throw DomainError("ipa: sampling rate must be positive");

    // Blinks show up as sharp drops well below the window's typical diameter.
    std::vector<double> diam(samples.size());
    std::transform(samples.begin(), samples.end(), diam.begin(),
                   [](const PupilSample& s) { return s.diameter_mm; });
    const double med = median_of(diam);
    std::vector<double> dev(diam.size());
    std::transform(diam.begin(), diam.end(), dev.begin(),
                   [med](double v) { return std::abs(v - med); });
    const double mad = median_of(dev);
    std::vector<const PupilSample*> kept;
    kept.reserve(samples.size());
    for (const auto& s : samples) {
        if (mad > 0.0 && s.diameter_mm < med - cfg.blink_mad_k * mad) continue;
        kept.push_back(&s);
    }
    if (kept.size() < 2) throw PupilDataError("ipa: fewer than two usable pupil samples");

    const double period = 1000.0 / rate_hz;
    double missing = std::max(0.0, double(kept.front()->t - window.start) - period);
    missing += std::max(0.0, double(window.end - kept.back()->t) - 1.5 * period);
    for (std::size_t i = 1; i < kept.size(); ++i) {
        const double dt = double(kept[i]->t - kept[i - 1]->t);
        if (dt > 1.5 * period) missing += dt - period;
    }
    if (missing > cfg.max_gap_fraction * double(window.duration()))
        throw PupilDataError("ipa: pupil gaps exceed the allowed fraction of the window");

    std::vector<double> out;
    out.reserve(samples.size() + 16);
    out.push_back(kept.front()->diameter_mm);
    for (std::size_t i = 1; i < kept.size(); ++i) {
        const double dt = double(kept[i]->t - kept[i - 1]->t);
        const double a = kept[i - 1]->diameter_mm;
        const double b = kept[i]->diameter_mm;
        if (dt > 1.5 * period && dt - period <= double(cfg.interpolate_gap_ms)) {
            const auto steps = static_cast<int>(std::lround(dt / period));
            for (int s = 1; s < steps; ++s) out.push_back(a + (b - a) * double(s) / double(steps));
        }
        out.push_back(b);
    }
    return out;
}

MeValue ipa(std::span<const PupilSample> samples, const Window& window, Participant participant,
            double rate_hz, const IpaConfig& cfg) {
    std::vector<PupilSample> mine;
    mine.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.participant == participant && window.contains(s.t)) mine.push_back(s);
    }
    const auto signal = preprocess_pupil(mine, window, rate_hz, cfg);
    const double duration_s = double(window.duration()) / 1000.0;
    return {ipa_signal(signal, duration_s, cfg), window, participant};
}

int me_bin(double v, double lo, double hi) {
    if (!(hi > lo)) return 5;
    const double scaled = (v - lo) / (hi - lo) * double(kMeLevels - 1);
    const auto bin = static_cast<int>(std::floor(scaled + 0.5));
    return std::clamp(bin, 0, kMeLevels - 1);
}

std::vector<int> discretize_me(std::span<const double> series) {
    if (series.empty()) throw DomainError("discretize_me: empty series");
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    return discretize_me(series, *lo, *hi);
}

std::vector<int> discretize_me(std::span<const double> series, double lo, double hi) {
    if (series.empty()) throw DomainError("discretize_me: empty series");
    std::vector<int> out(series.size());
    std::transform(series.begin(), series.end(), out.begin(),
                   [lo, hi](double v) { return me_bin(v, lo, hi); });
    return out;
}

JmeScore jme_crqa(std::span<const int> a, std::span<const int> b) {
    if (a.empty() || b.empty()) throw DomainError("jme_crqa: empty series");
    // Order-free over the cross product, so a value histogram suffices.
    std::array<std::int64_t, kMeLevels> ha{};
    std::array<std::int64_t, kMeLevels> hb{};
    for (int v : a) {
        if (v < 0 || v >= kMeLevels) throw DomainError("jme_crqa: value outside 0..10");
        ++ha[static_cast<std::size_t>(v)];
    }
    for (int v : b) {
        if (v < 0 || v >= kMeLevels) throw DomainError("jme_crqa: value outside 0..10");
        ++hb[static_cast<std::size_t>(v)];
    }
    std::int64_t hits = 0;
    for (std::size_t v = 0; v < ha.size(); ++v) hits += ha[v] * hb[v];
    const double denom = double(a.size()) * double(b.size());
    return {double(hits) / denom, JmeMethod::Crqa};
}

JmeScore jme_cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("jme_cosine: length mismatch");
    for (double v : a) {
        if (v < 0.0) throw DomainError("jme_cosine: values must be non-negative");
    }
    for (double v : b) {
        if (v < 0.0) throw DomainError("jme_cosine: values must be non-negative");
    }
    return {cosine_similarity(a, b), JmeMethod::Cosine};
}

}  // namespace ssrl
