// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/analysis.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include "ssrl/stats.hpp"

using namespace ssrl;
using Json = nlohmann::json;

namespace {

MetricsRow row(const std::string& cond, int success, std::array<std::int64_t, 5> actions = {}) {
    MetricsRow r{cond + std::to_string(success), cond, "reactive", {}};
    r.metrics.debugging_success = success;
    r.metrics.action_counts = actions;
    return r;
}

}  // namespace

TEST(Analyze, IdenticalGroupsGiveZeroEffect) {
    std::vector<MetricsRow> rows;
    for (const char* c : {"control", "jva", "combined"}) {
        for (int s : {2, 3, 5, 6}) rows.push_back(row(c, s));
    }
    const auto j = Json::parse(analyze_report(rows));
    EXPECT_EQ(j["sessions"], 12);
    EXPECT_EQ(j["groups"][0]["condition"], "control");
    EXPECT_EQ(j["groups"][2]["condition"], "combined");
    EXPECT_EQ(j["anova1"]["F"].get<double>(), 0.0);
    EXPECT_EQ(j["anova1"]["p"].get<double>(), 1.0);
    EXPECT_EQ(j["bonferroni_m"], 3);
    for (const auto& p : j["pairwise"]) {
        EXPECT_EQ(p["d"].get<double>(), 0.0);
        EXPECT_EQ(p["p_bonferroni"].get<double>(), 1.0);
    }
}

TEST(Analyze, MatchesDirectStatistics) {
    const std::vector<double> a{1, 4, 2, 5}, b{6, 7, 9, 8, 7};
    std::vector<MetricsRow> rows;
    for (double v : a) rows.push_back(row("control", int(v)));
    for (double v : b) rows.push_back(row("combined", int(v)));
    const auto j = Json::parse(analyze_report(rows));
    const auto w = welch_t(a, b);
    EXPECT_DOUBLE_EQ(j["pairwise"][0]["t"].get<double>(), w.statistic);
    EXPECT_DOUBLE_EQ(j["pairwise"][0]["p_bonferroni"].get<double>(), w.p);
    EXPECT_DOUBLE_EQ(j["anova1"]["F"].get<double>(), one_way_anova(std::vector{a, b}).statistic);
}

TEST(Analyze, TwoWayPerCondition) {
    std::vector<MetricsRow> rows;
    // Combined offers A3..A5. Two sessions above the median, two below.
    rows.push_back(row("combined", 1, {3, 1, 2, 0, 1}));
    rows.push_back(row("combined", 2, {2, 2, 1, 1, 0}));
    rows.push_back(row("combined", 5, {1, 3, 4, 2, 2}));
    rows.push_back(row("combined", 6, {0, 4, 3, 3, 1}));
    rows.push_back(row("control", 3));
    rows.push_back(row("control", 4));
    const auto j = Json::parse(analyze_report(rows));
    ASSERT_EQ(j["anova2"].size(), 2u);
    EXPECT_TRUE(j["anova2"][0].contains("error"));  // control has no feedback types
    const auto& c = j["anova2"][1];
    EXPECT_EQ(c["split"]["threshold"].get<double>(), 3.5);
    ASSERT_EQ(c["terms"].size(), 3u);
    EXPECT_EQ(c["terms"][2]["term"], "performance:feedback_type");
    EXPECT_EQ(c["residual"]["df"], 6);  // 12 observations in 6 cells
}

TEST(Analyze, Preconditions) {
    const std::vector<MetricsRow> one{row("jva", 1), row("jva", 2)};
    EXPECT_THROW(analyze_report(one), DomainError);
    AnalysisOptions o;
    o.metric = "nope";
    const std::vector<MetricsRow> two{row("jva", 1), row("jme", 2)};
    EXPECT_THROW(analyze_report(two, o), DomainError);
}
