#!/usr/bin/env python3
"""Offline reference values for the statistics module.

Uses scipy.stats and statsmodels only; the printed numbers are frozen into
tests/stats_test.cpp and the acceptance suite.
"""
import numpy as np
import pandas as pd
from scipy import stats
import statsmodels.api as sm
from statsmodels.formula.api import ols


def show(label, **kv):
    body = " ".join(f"{k}={float(v)!r}" for k, v in kv.items())
    print(f"{label}: {body}")


def main():
    # one-way ANOVA
    g = [[1, 2, 3], [2, 3, 4], [5, 6, 7]]
    r = stats.f_oneway(*g)
    show("anova1 {1,2,3},{2,3,4},{5,6,7}", F=r.statistic, p=r.pvalue)

    g2 = [[4.1, 5.3, 6.2, 5.9, 4.4], [6.8, 7.1, 5.6, 8.0], [3.2, 4.0, 4.9, 3.7, 4.4, 5.1]]
    r = stats.f_oneway(*g2)
    show("anova1 unequal", F=r.statistic, p=r.pvalue)

    # two-way balanced ANOVA, 2x3 with 3 replicates
    a_lv = ["lo", "hi"]
    b_lv = ["A", "B", "C"]
    cells = {
        ("lo", "A"): [3.1, 2.7, 3.5],
        ("lo", "B"): [4.0, 4.6, 3.9],
        ("lo", "C"): [5.2, 4.8, 5.9],
        ("hi", "A"): [6.3, 5.8, 6.1],
        ("hi", "B"): [6.0, 6.9, 6.4],
        ("hi", "C"): [9.1, 8.4, 8.8],
    }
    rows = [(a, b, v) for a in a_lv for b in b_lv for v in cells[(a, b)]]
    df = pd.DataFrame(rows, columns=["perf", "fb", "y"])
    model = ols("y ~ C(perf, Sum) * C(fb, Sum)", data=df).fit()
    tab = sm.stats.anova_lm(model, typ=2)
    for idx in tab.index:
        if idx == "Residual":
            show("anova2 residual", df=tab.loc[idx, "df"], SS=tab.loc[idx, "sum_sq"])
        else:
            show(f"anova2 {idx}", F=tab.loc[idx, "F"], df=tab.loc[idx, "df"],
                 p=tab.loc[idx, "PR(>F)"])

    # Welch t
    a = [27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4]
    b = [27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4]
    r = stats.ttest_ind(a, b, equal_var=False)
    va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
    na, nb = len(a), len(b)
    dfw = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    show("welch", t=r.statistic, df=dfw, p=r.pvalue)

    # paired t
    pa = [12.9, 13.5, 12.8, 15.6, 17.2, 19.2, 12.6, 15.3, 14.4, 11.3]
    pb = [12.7, 13.6, 12.0, 15.2, 16.8, 20.0, 12.0, 15.9, 16.0, 11.1]
    r = stats.ttest_rel(pa, pb)
    show("paired", t=r.statistic, df=len(pa) - 1, p=r.pvalue)

    # pooled t for the F = t^2 identity and Cohen's d
    r = stats.ttest_ind(a, b, equal_var=True)
    show("pooled", t=r.statistic, t2=r.statistic ** 2, p=r.pvalue)
    f = stats.f_oneway(a, b)
    show("anova1 two-group", F=f.statistic, p=f.pvalue)
    sp = np.sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    show("cohens_d", d=(np.mean(a) - np.mean(b)) / sp)

    # Bonferroni via statsmodels
    from statsmodels.stats.multitest import multipletests
    ps = [0.01, 0.04, 0.2, 0.5, 0.003, 0.0125]
    _, adj, _, _ = multipletests(ps, method="bonferroni")
    print("bonferroni: " + " ".join(repr(float(x)) for x in adj))


if __name__ == "__main__":
    main()
