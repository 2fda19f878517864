// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssrl/error.hpp"

namespace ssrl {

enum class StatKind { Anova1, Anova2, WelchT, PairedT, PooledT };

std::string_view to_string(StatKind k);

struct GroupComparison {
    StatKind kind = StatKind::Anova1;
    std::string term;      // anova2 effect name; empty otherwise
    double statistic = 0;  // F or t
    double df1 = 0;        // numerator df for F, df for t
    double df2 = 0;        // denominator df for F; 0 for t
    double p = 1;
    std::optional<double> effect_size;  // Cohen's d for two-sample tests
};

/// F = MS_between / MS_within with df (g-1, N-g).
GroupComparison one_way_anova(std::span<const std::vector<double>> groups);

struct TwoWayAnova {
    GroupComparison a;
    GroupComparison b;
    GroupComparison interaction;
    double residual_df = 0;
    double residual_ss = 0;
};

/// Balanced two-factor ANOVA. Factors are level labels per observation;
/// every (a, b) cell must hold the same number (>= 2) of values.
TwoWayAnova two_way_anova(std::span<const double> values, std::span<const std::string> factor_a,
                          std::span<const std::string> factor_b, std::string_view name_a = "a",
                          std::string_view name_b = "b");

/// Welch–Satterthwaite t; effect_size carries Cohen's d.
GroupComparison welch_t(std::span<const double> a, std::span<const double> b);
GroupComparison pooled_t(std::span<const double> a, std::span<const double> b);
GroupComparison paired_t(std::span<const double> a, std::span<const double> b);

/// (mean(a) - mean(b)) / pooled sd.
double cohens_d(std::span<const double> a, std::span<const double> b);

/// min(1, m * p) each.
std::vector<double> bonferroni(std::span<const double> p_values, int m);

double mean(std::span<const double> x);
/// Sample (n - 1) variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace ssrl
