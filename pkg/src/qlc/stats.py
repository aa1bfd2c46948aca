"""Answer-log statistics: success rates, error tallies and group comparison
of course points by answer correctness.

The group comparison is a Mann-Whitney U test.  U counts the pairs (t, f)
with t > f plus half of the tied pairs, so U / (nT * nF) is the
common-language effect size: the probability that a randomly chosen
member of the correct group outranks a randomly chosen member of the
incorrect group.  The two-sided p-value is exact (full permutation
distribution) for small tie-free samples and otherwise uses the normal
approximation with tie correction and continuity correction.  Display
formatting matches the conventions used in test reports: whole-percent
success rates, effect sizes to two decimals and p-values to three, both
without a leading zero.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path

EXACT_P_MAX_TOTAL = 30


class StatsError(Exception):
    pass


class EmptyLog(StatsError):
    pass


class DegenerateGroups(StatsError):
    pass


class RangeError(StatsError):
    pass


# --- answer log -------------------------------------------------------------

@dataclass(frozen=True)
class AnswerRow:
    session_id: str
    qlc_type: str  # "Q1" | "Q2" | "Q3"
    correct: bool
    error_categories: tuple[str, ...] = ()
    course_points: float | None = None
    variant: str | None = None


AnswerLog = list[AnswerRow]


@dataclass
class SuccessRate:
    correct_count: int
    total_count: int
    variants: dict[str, "SuccessRate"] = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.correct_count / self.total_count

    @property
    def display(self) -> str:
        return format_percent(self.rate)


def success_rates(log: AnswerLog) -> dict[str, SuccessRate]:
    """Per-question-type success rates, with per-variant breakdowns when tagged."""
    if not log:
        raise EmptyLog("answer log has no rows")
    rates: dict[str, SuccessRate] = {}
    for row in log:
        overall = rates.setdefault(row.qlc_type, SuccessRate(0, 0))
        overall.total_count += 1
        overall.correct_count += int(row.correct)
        if row.variant:
            sub = overall.variants.setdefault(row.variant, SuccessRate(0, 0))
            sub.total_count += 1
            sub.correct_count += int(row.correct)
    return dict(sorted(rates.items()))


def error_category_counts(log: AnswerLog) -> dict[str, dict[str, int]]:
    """How many answers of each type hit each error category."""
    counts: dict[str, dict[str, int]] = {}
    for row in log:
        per_type = counts.setdefault(row.qlc_type, {})
        for category in row.error_categories:
            per_type[category] = per_type.get(category, 0) + 1
    return {k: dict(sorted(v.items())) for k, v in sorted(counts.items())}


# --- Mann-Whitney U -----------------------------------------------------------

@dataclass
class GroupComparison:
    median_t: float
    median_f: float
    n_t: int
    n_f: int
    df: int
    u: float
    p_two_sided: float
    cles: float
    alpha: float | None = None
    significant: bool | None = None

    def to_dict(self) -> dict:
        data = {
            "medianT": self.median_t,
            "medianF": self.median_f,
            "nT": self.n_t,
            "nF": self.n_f,
            "df": self.df,
            "U": self.u,
            "pTwoSided": self.p_two_sided,
            "cles": self.cles,
        }
        if self.alpha is not None:
            data["alpha"] = self.alpha
            data["significant"] = self.significant
        return data


def _rank_all(values: list[float]) -> list[float]:
    """Fractional ranks (ties share the mean of their rank range)."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _p_normal_approximation(u: float, n_t: int, n_f: int, pooled: list[float]) -> float:
    n = n_t + n_f
    mu = n_t * n_f / 2.0
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    tie_term = sum(c**3 - c for c in seen.values())
    variance = (n_t * n_f / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return 1.0
    diff = u - mu
    if diff > 0:
        diff -= 0.5
    elif diff < 0:
        diff += 0.5
    z = diff / math.sqrt(variance)
    return min(1.0, 2.0 * _normal_sf(abs(z)))


def _exact_u_distribution(n_t: int, n_f: int) -> list[int]:
    """Counts of labelings by U value for tie-free samples.

    Entry u of the result is the number of ways to choose which n_t of the
    pooled ranks belong to group T such that the U statistic equals u.
    """
    n = n_t + n_f
    max_sum = n * (n + 1) // 2
    # ways[j][s] = number of j-subsets of ranks 1..r with rank sum s
    ways = [[0] * (max_sum + 1) for _ in range(n_t + 1)]
    ways[0][0] = 1
    for rank in range(1, n + 1):
        for j in range(min(rank, n_t), 0, -1):
            row = ways[j]
            prev = ways[j - 1]
            for s in range(max_sum, rank - 1, -1):
                if prev[s - rank]:
                    row[s] += prev[s - rank]
    offset = n_t * (n_t + 1) // 2  # U = rank sum - offset
    return [ways[n_t][offset + u] for u in range(n_t * n_f + 1)]


def _p_exact(u: float, n_t: int, n_f: int) -> float:
    counts = _exact_u_distribution(n_t, n_f)
    total = sum(counts)
    # compare distances from the center in half-units to stay in integers
    d_obs = abs(round(2 * u) - n_t * n_f)
    hits = sum(c for value, c in enumerate(counts) if abs(2 * value - n_t * n_f) >= d_obs)
    return hits / total


def mann_whitney_u(group_t: list[float], group_f: list[float]) -> GroupComparison:
    """Compare two groups of numbers; group T first (by convention, the
    correct-answer group), group F second."""
    if not group_t or not group_f:
        raise DegenerateGroups("both groups need at least one value")
    n_t, n_f = len(group_t), len(group_f)
    pooled = list(group_t) + list(group_f)
    ranks = _rank_all(pooled)
    rank_sum_t = sum(ranks[:n_t])
    u = rank_sum_t - n_t * (n_t + 1) / 2.0

    has_ties = len(set(pooled)) != len(pooled)
    if not has_ties and n_t + n_f <= EXACT_P_MAX_TOTAL:
        p = _p_exact(u, n_t, n_f)
    else:
        p = _p_normal_approximation(u, n_t, n_f, pooled)

    return GroupComparison(
        median_t=statistics.median(group_t),
        median_f=statistics.median(group_f),
        n_t=n_t,
        n_f=n_f,
        df=n_t + n_f - 2,
        u=u,
        p_two_sided=p,
        cles=cles(u, n_t, n_f),
    )


def cles(u: float, n_t: int, n_f: int) -> float:
    """Common-language effect size U / (nT * nF)."""
    if n_t < 1 or n_f < 1:
        raise RangeError("group sizes must be positive")
    if not 0 <= u <= n_t * n_f:
        raise RangeError(f"U={u} outside [0, {n_t * n_f}]")
    return u / (n_t * n_f)


def bonferroni_alpha(alpha: float, m: int) -> float:
    """Per-comparison significance level alpha / m."""
    if not 0 < alpha < 1:
        raise RangeError("alpha must be strictly between 0 and 1")
    if m < 1:
        raise RangeError("number of comparisons must be at least 1")
    return alpha / m


def compare_by_question(log: AnswerLog, qlc_type: str, alpha: float = 0.05) -> GroupComparison:
    """Mann-Whitney comparison of course points between correct and incorrect
    answerers of one question type, flagged against the Bonferroni-corrected
    alpha for the number of question types in the log."""
    rows = [r for r in log if r.qlc_type == qlc_type and r.course_points is not None]
    group_t = [r.course_points for r in rows if r.correct]
    group_f = [r.course_points for r in rows if not r.correct]
    if not group_t or not group_f:
        raise DegenerateGroups(
            f"{qlc_type}: need course points for both correct and incorrect answerers"
        )
    comparison = mann_whitney_u(group_t, group_f)  # type: ignore[arg-type]
    m = len({r.qlc_type for r in log})
    comparison.alpha = bonferroni_alpha(alpha, m)
    comparison.significant = comparison.p_two_sided < comparison.alpha
    return comparison


# --- display formatting --------------------------------------------------------

def format_percent(rate: float) -> str:
    return f"{round(rate * 100)}%"


def _strip_leading_zero(text: str) -> str:
    if text.startswith("0."):
        return text[1:]
    if text.startswith("-0."):
        return "-" + text[2:]
    return text


def format_p(p: float) -> str:
    return _strip_leading_zero(f"{p:.3f}")


def format_cles(value: float) -> str:
    return _strip_leading_zero(f"{value:.2f}")


# --- CSV I/O ---------------------------------------------------------------------

ANSWER_COLUMNS = ["sessionId", "qlcType", "correct", "categories", "variant"]
POINTS_COLUMNS = ["sessionId", "points"]


def load_answer_log(path: str | Path) -> AnswerLog:
    """Read an answer log CSV: sessionId,qlcType,correct,categories[,variant].

    ``categories`` holds the error categories joined by ";".  A header row
    is optional.  Course points live in a separate file (see
    load_course_points) and are merged by session id.
    """
    rows: AnswerLog = []
    with open(path, newline="", encoding="utf-8") as handle:
        for index, record in enumerate(csv.reader(handle)):
            if not record or (index == 0 and record[0] == "sessionId"):
                continue
            if len(record) < 3:
                raise StatsError(f"{path}: row {index + 1} needs at least 3 columns")
            raw_correct = record[2].strip().lower()
            if raw_correct not in ("true", "false", "1", "0"):
                raise StatsError(f"{path}: row {index + 1} has non-boolean correct value")
            categories = tuple(c for c in record[3].split(";") if c) if len(record) > 3 else ()
            variant = record[4].strip() or None if len(record) > 4 else None
            rows.append(
                AnswerRow(
                    session_id=record[0].strip(),
                    qlc_type=record[1].strip(),
                    correct=raw_correct in ("true", "1"),
                    error_categories=categories,
                    variant=variant,
                )
            )
    return rows


def load_course_points(path: str | Path) -> dict[str, float]:
    """Read a course-points CSV: sessionId,points (header optional)."""
    points: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for index, record in enumerate(csv.reader(handle)):
            if not record or (index == 0 and record[0] == "sessionId"):
                continue
            if len(record) < 2:
                raise StatsError(f"{path}: row {index + 1} needs 2 columns")
            try:
                points[record[0].strip()] = float(record[1])
            except ValueError as exc:
                raise StatsError(f"{path}: row {index + 1} has non-numeric points") from exc
    return points


def merge_course_points(log: AnswerLog, points: dict[str, float]) -> AnswerLog:
    """Attach course points to every row whose session id has them."""
    return [
        AnswerRow(
            row.session_id, row.qlc_type, row.correct, row.error_categories,
            points.get(row.session_id, row.course_points), row.variant,
        )
        for row in log
    ]
