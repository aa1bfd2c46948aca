#!/usr/bin/env python3
"""Reproduce the reported answer-table arithmetic from its published counts.

The per-student data behind the group comparison is not published, so this
script checks the parts that are reproducible: per-question success rates
from the answer counts, the U -> CLES arithmetic for each comparison row,
and the Bonferroni-corrected alpha.
"""

import itertools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qlc.stats import AnswerRow, bonferroni_alpha, cles, format_cles, format_p, success_rates

ANSWER_COUNTS = [
    # (type, correct, total, variant)
    ("Q1", 249, 291, None),
    ("Q2", 207, 243, None),
    ("Q3", 227, 234, "input"),
    ("Q3", 54, 57, "division"),
]

COMPARISON_ROWS = [
    # (type, U, nT, nF, reported CLES)
    ("Q1", 4932, 249, 42, ".47"),
    ("Q2", 4716, 207, 36, ".63"),
    ("Q3", 2124, 281, 10, ".76"),
]


def build_log():
    rows = []
    counter = itertools.count()
    for qlc_type, correct, total, variant in ANSWER_COUNTS:
        for i in range(total):
            rows.append(AnswerRow(f"s{next(counter)}", qlc_type, i < correct, variant=variant))
    return rows


def main() -> int:
    print("Success rates from answer counts")
    print(f"{'type':<10}{'correct':>9}{'total':>8}{'rate':>7}")
    rates = success_rates(build_log())
    for qlc_type, rate in rates.items():
        print(f"{qlc_type:<10}{rate.correct_count:>9}{rate.total_count:>8}{rate.display:>7}")
        for name, sub in sorted(rate.variants.items()):
            label = f"  {qlc_type}[{name}]"
            print(f"{label:<10}{sub.correct_count:>9}{sub.total_count:>8}{sub.display:>7}")

    print("\nEffect sizes from U statistics")
    print(f"{'type':<6}{'U':>7}{'nT':>5}{'nF':>5}{'CLES':>7}{'reported':>10}{'match':>7}")
    all_match = True
    for qlc_type, u, n_t, n_f, reported in COMPARISON_ROWS:
        value = cles(u, n_t, n_f)
        shown = format_cles(value)
        match = shown == reported
        all_match &= match
        print(f"{qlc_type:<6}{u:>7}{n_t:>5}{n_f:>5}{shown:>7}{reported:>10}{str(match):>7}")

    alpha = bonferroni_alpha(0.05, 3)
    print(f"\nBonferroni-corrected alpha for 3 comparisons: {format_p(alpha)}")
    print("all reproduced" if all_match else "MISMATCH")
    return 0 if all_match else 1


if __name__ == "__main__":
    raise SystemExit(main())
