// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace ssrl {

namespace {

double f_pvalue(double f, double d1, double d2) {
    if (!(f > 0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

double t_pvalue(double t, double df) {
    if (t == 0) return 1.0;
    const boost::math::students_t_distribution<double> dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

void need(std::span<const double> x, std::size_t n, const char* what) {
    if (x.size() < n) throw DomainError(std::string(what) + ": each sample needs at least " +
                                        std::to_string(n) + " values");
}

GroupComparison f_test(StatKind kind, std::string term, double ss, double df, double ss_err,
                       double df_err) {
    GroupComparison g;
    g.kind = kind;
    g.term = std::move(term);
    g.df1 = df;
    g.df2 = df_err;
    if (ss <= 0) {
        g.statistic = 0.0;
        g.p = 1.0;
        return g;
    }
    if (ss_err <= 0) throw DomainError(std::string(to_string(kind)) + ": zero residual variance");
    g.statistic = (ss / df) / (ss_err / df_err);
    g.p = f_pvalue(g.statistic, df, df_err);
    return g;
}

}  // namespace

std::string_view to_string(StatKind k) {
    switch (k) {
        case StatKind::Anova1: return "anova1";
        case StatKind::Anova2: return "anova2";
        case StatKind::WelchT: return "welch_t";
        case StatKind::PairedT: return "paired_t";
        case StatKind::PooledT: return "pooled_t";
    }
    return "?";
}

double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of an empty sample");
    long double s = 0;
    for (double v : x) s += v;
    return static_cast<double>(s / x.size());
}

double variance(std::span<const double> x) {
    need(x, 2, "variance");
    const double m = mean(x);
    long double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return static_cast<double>(s / (x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) throw DomainError("median of an empty sample");
    std::sort(x.begin(), x.end());
    const auto n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

GroupComparison one_way_anova(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) throw DomainError("anova1: needs at least two groups");
    std::size_t n = 0;
    long double total = 0;
    for (const auto& g : groups) {
        need(g, 2, "anova1");
        n += g.size();
        for (double v : g) total += v;
    }
    const double grand = static_cast<double>(total / n);
    long double ss_between = 0, ss_within = 0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ss_between += g.size() * (m - grand) * (m - grand);
        for (double v : g) ss_within += (v - m) * (v - m);
    }
    if (ss_within <= 0) throw DomainError("anova1: zero within-group variance");
    const double k = double(groups.size());
    return f_test(StatKind::Anova1, "", static_cast<double>(ss_between), k - 1,
                  static_cast<double>(ss_within), double(n) - k);
}

TwoWayAnova two_way_anova(std::span<const double> values, std::span<const std::string> factor_a,
                          std::span<const std::string> factor_b, std::string_view name_a,
                          std::string_view name_b) {
    if (values.size() != factor_a.size() || values.size() != factor_b.size())
        throw DomainError("anova2: values and factors differ in length");
    std::vector<std::string> la, lb;
    const auto index_of = [](std::vector<std::string>& levels, const std::string& s) {
        auto it = std::find(levels.begin(), levels.end(), s);
        if (it == levels.end()) {
            levels.push_back(s);
            return levels.size() - 1;
        }
        return static_cast<std::size_t>(it - levels.begin());
    };
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
    for (std::size_t i = 0; i < values.size(); ++i) {
        cells[{index_of(la, factor_a[i]), index_of(lb, factor_b[i])}].push_back(values[i]);
    }
    const std::size_t I = la.size(), J = lb.size();
    if (I < 2 || J < 2) throw DomainError("anova2: each factor needs at least two levels");
    if (cells.size() != I * J) throw DomainError("anova2: unbalanced design (empty cell)");
    const std::size_t n = cells.begin()->second.size();
    for (const auto& [k, v] : cells) {
        if (v.size() != n) throw DomainError("anova2: unbalanced design (unequal cell counts)");
    }
    if (n < 2) throw DomainError("anova2: cells need at least two values");

    const double grand = mean(values);
    std::vector<double> ma(I, 0.0), mb(J, 0.0);
    std::vector<std::vector<double>> mc(I, std::vector<double>(J));
    for (const auto& [k, v] : cells) {
        const double m = mean(v);
        mc[k.first][k.second] = m;
        ma[k.first] += m / double(J);
        mb[k.second] += m / double(I);
    }
    long double ss_a = 0, ss_b = 0, ss_ab = 0, ss_e = 0;
    for (std::size_t i = 0; i < I; ++i) ss_a += double(n * J) * (ma[i] - grand) * (ma[i] - grand);
    for (std::size_t j = 0; j < J; ++j) ss_b += double(n * I) * (mb[j] - grand) * (mb[j] - grand);
    for (const auto& [k, v] : cells) {
        const double r = mc[k.first][k.second] - ma[k.first] - mb[k.second] + grand;
        ss_ab += double(n) * r * r;
        for (double y : v) {
            const double e = y - mc[k.first][k.second];
            ss_e += e * e;
        }
    }
    TwoWayAnova out;
    out.residual_df = double(I * J * (n - 1));
    out.residual_ss = static_cast<double>(ss_e);
    out.a = f_test(StatKind::Anova2, std::string(name_a), static_cast<double>(ss_a), double(I - 1),
                   out.residual_ss, out.residual_df);
    out.b = f_test(StatKind::Anova2, std::string(name_b), static_cast<double>(ss_b), double(J - 1),
                   out.residual_ss, out.residual_df);
    out.interaction = f_test(StatKind::Anova2, std::string(name_a) + ":" + std::string(name_b),
                             static_cast<double>(ss_ab), double((I - 1) * (J - 1)),
                             out.residual_ss, out.residual_df);
    return out;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
    need(a, 2, "cohens_d");
    need(b, 2, "cohens_d");
    const double na = double(a.size()), nb = double(b.size());
    const double sp =
        std::sqrt(((na - 1) * variance(a) + (nb - 1) * variance(b)) / (na + nb - 2));
    if (!(sp > 0)) throw DomainError("cohens_d: zero pooled standard deviation");
    return (mean(a) - mean(b)) / sp;
}

GroupComparison welch_t(std::span<const double> a, std::span<const double> b) {
    need(a, 2, "welch_t");
    need(b, 2, "welch_t");
    const double na = double(a.size()), nb = double(b.size());
    const double qa = variance(a) / na, qb = variance(b) / nb;
    if (!(qa + qb > 0)) throw DomainError("welch_t: zero variance");
    GroupComparison g;
    g.kind = StatKind::WelchT;
    g.statistic = (mean(a) - mean(b)) / std::sqrt(qa + qb);
    g.df1 = (qa + qb) * (qa + qb) / (qa * qa / (na - 1) + qb * qb / (nb - 1));
    g.p = t_pvalue(g.statistic, g.df1);
    g.effect_size = cohens_d(a, b);
    return g;
}

GroupComparison pooled_t(std::span<const double> a, std::span<const double> b) {
    need(a, 2, "pooled_t");
    need(b, 2, "pooled_t");
    const double na = double(a.size()), nb = double(b.size());
    const double sp2 = ((na - 1) * variance(a) + (nb - 1) * variance(b)) / (na + nb - 2);
    if (!(sp2 > 0)) throw DomainError("pooled_t: zero variance");
    GroupComparison g;
    g.kind = StatKind::PooledT;
    g.statistic = (mean(a) - mean(b)) / std::sqrt(sp2 * (1 / na + 1 / nb));
    g.df1 = na + nb - 2;
    g.p = t_pvalue(g.statistic, g.df1);
    g.effect_size = cohens_d(a, b);
    return g;
}

GroupComparison paired_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("paired_t: samples differ in length");
    need(a, 2, "paired_t");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    GroupComparison g;
    g.kind = StatKind::PairedT;
    g.df1 = double(d.size() - 1);
    const double md = mean(d);
    const double vd = variance(d);
    if (vd <= 0) {
        // Identical pairs carry no evidence of a difference.
        if (md == 0) return g;
        throw DomainError("paired_t: zero variance of differences");
    }
    g.statistic = md / std::sqrt(vd / double(d.size()));
    g.p = t_pvalue(g.statistic, g.df1);
    return g;
}

std::vector<double> bonferroni(std::span<const double> p_values, int m) {
    if (m < 1) throw DomainError("bonferroni: m must be at least 1");
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        if (!(p >= 0 && p <= 1)) throw DomainError("bonferroni: p outside [0,1]");
        out.push_back(std::min(1.0, p * m));
    }
    return out;
}

}  // namespace ssrl
