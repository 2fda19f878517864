// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssrl/error.hpp"
#include "ssrl/session.hpp"

namespace ssrl {

// --- wavelet primitives ---------------------------------------------------

/// Symlet mother wavelets: sym8 has 16 taps, sym16 has 32.
enum class WaveletFamily { Sym8, Sym16 };

/// Decomposition low-pass filter of the family.
std::span<const double> wavelet_lowpass(WaveletFamily family);

/// Quadrature-mirror high-pass filter derived from the low-pass.
std::vector<double> wavelet_highpass(WaveletFamily family);

struct WaveletDecomposition {
    std::vector<double> approximation;
    /// details[0] is level 1 (finest), details[levels-1] the coarsest.
    std::vector<std::vector<double>> details;
};

/// Multi-level DWT with periodic extension. Odd-length inputs at any level
/// are extended by repeating their last sample.
WaveletDecomposition dwt_periodized(std::span<const double> signal, WaveletFamily family,
                                    int levels);

/// |d[i]| where |d[i]| is a local maximum of |d| (ties allowed on one side
/// only), 0 elsewhere. Edges compare against themselves.
std::vector<double> modulus_maxima(std::span<const double> detail);

// --- Index of Pupillary Activity -----------------------------------------

enum class NoiseEstimate {
    /// median(|d - median(d)|) / 0.6745 over the detail coefficients.
    MedianAbsoluteDeviation,
    /// Population standard deviation of the modulus-maxima sequence.
    MaximaStdDev,
};

enum class ThresholdLog { Natural, Base2 };

struct IpaConfig {
    WaveletFamily wavelet = WaveletFamily::Sym8;
    int levels = 2;
    int detail_level = 1;
    NoiseEstimate noise = NoiseEstimate::MedianAbsoluteDeviation;
    ThresholdLog log = ThresholdLog::Natural;

    // Preprocessing of raw pupil samples.
    double max_gap_fraction = 0.10;
    Millis interpolate_gap_ms = 200;
    double blink_mad_k = 3.0;

    /// sym16, second detail level, std-dev of maxima, log2. Matches the
    /// original published reference code.
    static IpaConfig duchowski();
};

/// Raised when a pupil window cannot yield an IPA value.
class PupilDataError : public DomainError {
  public:
    using DomainError::DomainError;
};

struct IpaCount {
    std::size_t surviving_maxima = 0;
    double threshold = 0.0;
};

/// Counts modulus maxima of the configured detail level that reach the
/// universal threshold sigma * sqrt(2 log n). Maxima below 1e-9 of the
/// signal's peak magnitude are filter round-off and never counted.
IpaCount ipa_count(std::span<const double> signal, const IpaConfig& cfg = {});

/// Surviving maxima per second.
double ipa_signal(std::span<const double> signal, double duration_s, const IpaConfig& cfg = {});

/// Blink removal and gap handling for one participant's samples inside a
/// window. Throws PupilDataError on fewer than two samples or when missing
/// time exceeds cfg.max_gap_fraction of the window.
std::vector<double> preprocess_pupil(std::span<const PupilSample> samples, const Window& window,
                                     double rate_hz, const IpaConfig& cfg = {});

struct MeValue {
    double value = 0.0;
    Window window;
    Participant participant = Participant::P1;
};

/// Mental effort of one participant over one window.
MeValue ipa(std::span<const PupilSample> samples, const Window& window, Participant participant,
            double rate_hz, const IpaConfig& cfg = {});

// --- discretization and joint mental effort -------------------------------

inline constexpr int kMeLevels = 11;  // integers 0..10

/// Min-max bin of v in [lo, hi], round half up, clamped to 0..10. A
/// degenerate range maps to the middle bin.
int me_bin(double v, double lo, double hi);

/// Bins against the series' own min and max.
std::vector<int> discretize_me(std::span<const double> series);

/// Bins against explicit bounds (shared across both participants of a session).
std::vector<int> discretize_me(std::span<const double> series, double lo, double hi);

enum class JmeMethod { Crqa, Cosine };

struct JmeScore {
    double value = 0.0;
    JmeMethod method = JmeMethod::Crqa;
};

/// Categorical cross-recurrence rate with radius 0:
/// |{(i, j) : a_i == b_j}| / (|a| * |b|).
JmeScore jme_crqa(std::span<const int> a, std::span<const int> b);

/// Cosine of two equal-length non-negative ME vectors.
JmeScore jme_cosine(std::span<const double> a, std::span<const double> b);

}  // namespace ssrl
