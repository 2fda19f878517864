// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "ssrl/stats.hpp"

namespace ssrl {

namespace {

using Json = nlohmann::ordered_json;

Json comparison_json(const GroupComparison& g) {
    Json j;
    j["statistic"] = std::string(to_string(g.kind));
    if (!g.term.empty()) j["term"] = g.term;
    const bool f = g.kind == StatKind::Anova1 || g.kind == StatKind::Anova2;
    j[f ? "F" : "t"] = g.statistic;
    if (f) {
        j["df"] = {g.df1, g.df2};
    } else {
        j["df"] = g.df1;
    }
    j["p"] = g.p;
    if (g.effect_size) j["d"] = *g.effect_size;
    return j;
}

// Known conditions in their declared order, then anything else by name.
int condition_rank(const std::string& name) {
    const auto c = parse_condition(name);
    return c ? static_cast<int>(*c) : 100;
}

}  // namespace

double metric_value(const MetricsRow& row, const std::string& metric) {
    const auto& m = row.metrics;
    if (metric == "debugging_success") return m.debugging_success;
    if (metric == "time_on_task_s") return m.time_on_task_s;
    if (metric == "uptake_total") return double(m.uptake_total);
    if (metric == "delivered") return double(m.delivered);
    if (metric == "suppressed") return double(m.suppressed);
    if (metric.size() == 2 && metric[0] == 'a' && metric[1] >= '1' && metric[1] <= '5')
        return double(m.action_counts[static_cast<std::size_t>(metric[1] - '1')]);
    throw DomainError("analyze: unknown metric '" + metric + "'");
}

std::string analyze_report(std::span<const MetricsRow> rows, const AnalysisOptions& opts) {
    std::map<std::string, std::vector<const MetricsRow*>> by_condition;
    for (const auto& r : rows) by_condition[r.condition].push_back(&r);
    std::vector<std::string> names;
    for (const auto& [k, v] : by_condition) names.push_back(k);
    std::stable_sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
        return condition_rank(a) < condition_rank(b);
    });
    if (names.size() < 2) throw DomainError("analyze: anova needs at least two conditions");

    std::vector<std::vector<double>> groups;
    for (const auto& n : names) {
        std::vector<double> g;
        for (const auto* r : by_condition[n]) g.push_back(metric_value(*r, opts.metric));
        groups.push_back(std::move(g));
    }

    Json report;
    report["metric"] = opts.metric;
    report["sessions"] = rows.size();

    Json summary = Json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        Json g;
        g["condition"] = names[i];
        g["n"] = groups[i].size();
        g["mean"] = mean(groups[i]);
        if (groups[i].size() >= 2) g["sd"] = std::sqrt(variance(groups[i]));
        summary.push_back(g);
    }
    report["groups"] = summary;

    try {
        report["anova1"] = comparison_json(one_way_anova(groups));
    } catch (const DomainError& e) {
        report["anova1"] = {{"error", e.what()}};
    }

    // Pairwise Welch tests, Bonferroni over all pairs.
    Json pairs = Json::array();
    std::vector<double> ps;
    std::vector<std::size_t> slot;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t k = i + 1; k < names.size(); ++k) {
            Json j;
            j["a"] = names[i];
            j["b"] = names[k];
            try {
                const auto w = welch_t(groups[i], groups[k]);
                auto c = comparison_json(w);
                for (auto& [key, v] : c.items()) j[key] = v;
                ps.push_back(w.p);
                slot.push_back(pairs.size());
            } catch (const DomainError& e) {
                j["error"] = e.what();
            }
            pairs.push_back(j);
        }
    }
    const int m = static_cast<int>(names.size() * (names.size() - 1) / 2);
    const auto adj = bonferroni(ps, m);
    for (std::size_t i = 0; i < adj.size(); ++i) pairs[slot[i]]["p_bonferroni"] = adj[i];
    report["pairwise"] = pairs;
    report["bonferroni_m"] = m;

    // Performance x feedback type on delivered action counts.
    Json two_way = Json::array();
    for (const auto& n : names) {
        const auto cond = parse_condition(n);
        Json j;
        j["condition"] = n;
        if (!cond || toolset(*cond).empty()) {
            j["error"] = "no feedback types";
            two_way.push_back(j);
            continue;
        }
        std::vector<double> success;
        for (const auto* r : by_condition[n]) success.push_back(r->metrics.debugging_success);
        const double thr = opts.split_threshold ? *opts.split_threshold : median(success);
        j["split"] = {{"rule", opts.split_threshold ? "threshold" : "median"}, {"threshold", thr}};
        std::vector<double> y;
        std::vector<std::string> perf, type;
        for (const auto* r : by_condition[n]) {
            for (auto a : toolset(*cond).list()) {
                y.push_back(double(r->metrics.action_counts[static_cast<std::size_t>(a)]));
                perf.emplace_back(r->metrics.debugging_success > thr ? "high" : "low");
                type.emplace_back(to_string(a));
            }
        }
        try {
            const auto t = two_way_anova(y, perf, type, "performance", "feedback_type");
            j["terms"] = Json::array({comparison_json(t.a), comparison_json(t.b),
                                      comparison_json(t.interaction)});
            j["residual"] = {{"df", t.residual_df}, {"ss", t.residual_ss}};
        } catch (const DomainError& e) {
            j["error"] = e.what();
        }
        two_way.push_back(j);
    }
    report["anova2"] = two_way;
    return report.dump(2) + "\n";
}

}  // namespace ssrl
