// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/stats.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

using namespace ssrl;

namespace {

// Reference values from tests/oracles/stats_oracle.py (scipy/statsmodels).
constexpr double kRel = 1e-9;

void expect_rel(double got, double want) {
    EXPECT_LE(std::fabs(got - want), kRel * std::fabs(want)) << got << " vs " << want;
}

const std::vector<double> kA{27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1,
                             21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
const std::vector<double> kB{27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0,
                             24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};

}  // namespace

TEST(Anova1, OracleSmallGroups) {
    const std::vector<std::vector<double>> g{{1, 2, 3}, {2, 3, 4}, {5, 6, 7}};
    const auto r = one_way_anova(g);
    expect_rel(r.statistic, 13.0);
    expect_rel(r.p, 0.006591796875);
    EXPECT_EQ(r.df1, 2);
    EXPECT_EQ(r.df2, 6);
}

TEST(Anova1, OracleUnequalSizes) {
    const std::vector<std::vector<double>> g{
        {4.1, 5.3, 6.2, 5.9, 4.4}, {6.8, 7.1, 5.6, 8.0}, {3.2, 4.0, 4.9, 3.7, 4.4, 5.1}};
    const auto r = one_way_anova(g);
    expect_rel(r.statistic, 11.425695235605033);
    expect_rel(r.p, 0.0016663522680238634);
}

TEST(Anova1, IdenticalGroupsGiveZero) {
    const std::vector<std::vector<double>> g{{1, 2, 3}, {1, 2, 3}};
    const auto r = one_way_anova(g);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p, 1.0);
}

TEST(Anova1, TwoGroupsEqualPooledTSquared) {
    const std::vector<std::vector<double>> g{kA, kB};
    const auto f = one_way_anova(g);
    const auto t = pooled_t(kA, kB);
    expect_rel(f.statistic, t.statistic * t.statistic);
    expect_rel(f.statistic, 6.028775042604019);
    expect_rel(f.p, t.p);
}

TEST(Anova1, Preconditions) {
    EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}}), DomainError);
    EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1}, {2, 3}}), DomainError);
    EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 1}, {2, 2}}), DomainError);
}

namespace {

struct TwoWayData {
    std::vector<double> y;
    std::vector<std::string> perf, fb;
};

TwoWayData oracle_cells() {
    TwoWayData d;
    const auto add = [&](const char* a, const char* b, std::vector<double> v) {
        for (double x : v) {
            d.y.push_back(x);
            d.perf.emplace_back(a);
            d.fb.emplace_back(b);
        }
    };
    add("lo", "A", {3.1, 2.7, 3.5});
    add("lo", "B", {4.0, 4.6, 3.9});
    add("lo", "C", {5.2, 4.8, 5.9});
    add("hi", "A", {6.3, 5.8, 6.1});
    add("hi", "B", {6.0, 6.9, 6.4});
    add("hi", "C", {9.1, 8.4, 8.8});
    return d;
}

}  // namespace

TEST(Anova2, OracleTwoByThree) {
    const auto d = oracle_cells();
    const auto r = two_way_anova(d.y, d.perf, d.fb, "perf", "fb");
    expect_rel(r.a.statistic, 226.31561461794035);
    expect_rel(r.a.p, 3.7589947126896925e-09);
    expect_rel(r.b.statistic, 56.93355481727581);
    expect_rel(r.b.p, 7.509550121474387e-07);
    expect_rel(r.interaction.statistic, 3.259136212624576);
    expect_rel(r.interaction.p, 0.07404311198486697);
    EXPECT_EQ(r.a.df1, 1);
    EXPECT_EQ(r.b.df1, 2);
    EXPECT_EQ(r.interaction.df1, 2);
    EXPECT_EQ(r.residual_df, 12);
    expect_rel(r.residual_ss, 2.006666666666667);
    EXPECT_EQ(r.interaction.term, "perf:fb");
}

TEST(Anova2, AdditiveMeansHaveNoInteraction) {
    TwoWayData d;
    const std::vector<double> noise{-0.5, 0.0, 0.5};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (double e : noise) {
                d.y.push_back(10.0 * a + 3.0 * b + e);
                d.perf.push_back(std::to_string(a));
                d.fb.push_back(std::to_string(b));
            }
        }
    }
    const auto r = two_way_anova(d.y, d.perf, d.fb);
    EXPECT_NEAR(r.interaction.statistic, 0.0, 1e-9);
}

TEST(Anova2, AllEqualGivesZeroEverywhere) {
    auto d = oracle_cells();
    for (auto& v : d.y) v = 4.2;
    const auto r = two_way_anova(d.y, d.perf, d.fb);
    EXPECT_EQ(r.a.statistic, 0.0);
    EXPECT_EQ(r.b.statistic, 0.0);
    EXPECT_EQ(r.interaction.statistic, 0.0);
}

TEST(Anova2, UnbalancedIsReported) {
    auto d = oracle_cells();
    d.y.pop_back();
    d.perf.pop_back();
    d.fb.pop_back();
    EXPECT_THROW(two_way_anova(d.y, d.perf, d.fb), DomainError);
}

TEST(WelchT, Oracle) {
    const auto r = welch_t(kA, kB);
    expect_rel(r.statistic, -2.455356398286006);
    expect_rel(r.df1, 24.988529290231416);
    expect_rel(r.p, 0.021378001462866985);
    ASSERT_TRUE(r.effect_size.has_value());
    expect_rel(*r.effect_size, -0.8965693907039232);
}

TEST(WelchT, EqualSizesAndVariancesMatchPooled) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{3, 4, 5, 6, 7};
    expect_rel(welch_t(a, b).statistic, pooled_t(a, b).statistic);
    expect_rel(welch_t(a, b).p, pooled_t(a, b).p);
}

TEST(PooledT, Oracle) {
    const auto r = pooled_t(kA, kB);
    expect_rel(r.statistic * r.statistic, 6.028775042604028);
    expect_rel(r.p, 0.020544522734125933);
}

TEST(PairedT, Oracle) {
    const std::vector<double> a{12.9, 13.5, 12.8, 15.6, 17.2, 19.2, 12.6, 15.3, 14.4, 11.3};
    const std::vector<double> b{12.7, 13.6, 12.0, 15.2, 16.8, 20.0, 12.0, 15.9, 16.0, 11.1};
    const auto r = paired_t(a, b);
    expect_rel(r.statistic, -0.2133084751273905);
    EXPECT_EQ(r.df1, 9);
    expect_rel(r.p, 0.8358400057139277);
}

TEST(PairedT, IdenticalPairsGiveZero) {
    const auto r = paired_t(kA, kA);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p, 1.0);
}

TEST(PairedT, Preconditions) {
    EXPECT_THROW(paired_t(kA, std::vector<double>{1, 2}), DomainError);
    const std::vector<double> shifted{2, 3, 4};
    EXPECT_THROW(paired_t(std::vector<double>{1, 2, 3}, shifted), DomainError);
}

TEST(CohensD, UnitShiftIsMinusOne) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const double sd = std::sqrt(variance(a));
    std::vector<double> b;
    for (double v : a) b.push_back(v + sd);
    EXPECT_NEAR(cohens_d(a, b), -1.0, 1e-12);
    EXPECT_NEAR(cohens_d(b, a), 1.0, 1e-12);
}

TEST(CohensD, IdenticalIsZeroAndConstantThrows) {
    EXPECT_EQ(cohens_d(kA, kA), 0.0);
    const std::vector<double> c{2, 2, 2};
    EXPECT_THROW(cohens_d(c, c), DomainError);
}

TEST(Bonferroni, OracleAndEdges) {
    const std::vector<double> p{0.01, 0.04, 0.2, 0.5, 0.003, 0.0125};
    const std::vector<double> want{0.06, 0.24, 1.0, 1.0, 0.018000000000000002, 0.07500000000000001};
    const auto got = bonferroni(p, 6);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) expect_rel(got[i], want[i]);
    EXPECT_EQ(bonferroni(p, 1), p);
    EXPECT_THROW(bonferroni(std::vector<double>{1.5}, 2), DomainError);
}
