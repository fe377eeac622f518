"""
Cohort statistics with invalidated entries
==========================================

Aggregate a small cohort under both conventions for invalidated totals and
both standard-deviation formulas.
"""

from cohort_audit.report import ReportConfig, cohort_stats
from cohort_audit.rubric import RubricScore


def score(sid, r1, r2, r3, r4):
    valid = r1 > 0
    total = r1 + r2 + r3 + r4
    return RubricScore(sid, r1, r2, r3, r4, total if valid else 0.0, valid, valid and total >= 60)


cohort = [
    score("a", 20, 18, 30, 22),
    score("b", 16, 15, 27, 20),
    score("c", 0, 17, 31, 21),  # no transcript
    score("d", 12, 9, 14, 10),
]

for invalid in ("nominal", "zero"):
    for std in ("population", "sample"):
        s = cohort_stats(cohort, config=ReportConfig(std=std, invalid_totals=invalid))
        print(f"{invalid:8s} {std:10s} mean={s.mean:6.2f} std={s.std:6.2f} median={s.median:5.1f} pass={s.count_pass}")

# the mean of component sums equals the sum of component means
s = cohort_stats(cohort)
print("component means", [round(c, 2) for c in s.component_means], "sum", round(sum(s.component_means), 2))
