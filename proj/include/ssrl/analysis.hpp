// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <span>
#include <string>

#include "ssrl/replay.hpp"

namespace ssrl {

struct AnalysisOptions {
    /// Dependent variable for the condition comparison: debugging_success,
    /// time_on_task_s, uptake_total, delivered, suppressed or a1..a5.
    std::string metric = "debugging_success";
    /// Performance split on debugging_success; the per-condition median when
    /// unset. Sessions strictly above the threshold count as high performers.
    std::optional<double> split_threshold;
};

double metric_value(const MetricsRow& row, const std::string& metric);

/// JSON report: per-condition summaries, one-way ANOVA across conditions,
/// pairwise Welch t with Cohen's d and Bonferroni-adjusted p, and per
/// condition a performance x feedback-type ANOVA on action counts. Throws
/// DomainError with fewer than two conditions.
std::string analyze_report(std::span<const MetricsRow> rows, const AnalysisOptions& opts = {});

}  // namespace ssrl
