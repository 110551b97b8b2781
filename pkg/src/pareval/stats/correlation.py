"""Rank correlations with significance, multiple-testing correction, and the
score-vs-rating correlation matrix."""

from __future__ import annotations

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass
from itertools import permutations
from typing import Mapping, Sequence

from ..corpus import RatingTable, ScoreTable
from ..errors import InputError


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    n: int
    p_raw: float
    p_adjusted: float | None = None
    p_method: str = "normal-approximation"


def _validate_pair(x: Sequence[float], y: Sequence[float]) -> int:
    if len(x) != len(y):
        raise InputError(f"sequence lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise InputError("need at least 2 paired observations")
    return len(x)


def _tie_groups(values: Sequence[float]) -> list[int]:
    return [c for c in Counter(values).values() if c > 1]


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Kendall's tau-b with tie corrections.

    tau = (C - D) / sqrt((n0 - n1) (n0 - n2)) over all pairs, with n1/n2 the
    tie corrections for x/y. The two-sided p-value uses the normal
    approximation with tie-adjusted variance of C - D.
    """
    n = _validate_pair(x, y)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            prod = (x[i] - x[j]) * (y[i] - y[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    ties_x = _tie_groups(x)
    ties_y = _tie_groups(y)
    n1 = sum(t * (t - 1) // 2 for t in ties_x)
    n2 = sum(u * (u - 1) // 2 for u in ties_y)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0:
        raise InputError("correlation undefined: at least one input is constant")
    tau = (concordant - discordant) / denom

    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in ties_x)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in ties_y)
    v1 = (
        sum(t * (t - 1) for t in ties_x) * sum(u * (u - 1) for u in ties_y)
        / (2 * n * (n - 1))
    )
    v2 = 0.0
    if n > 2:
        v2 = (
            sum(t * (t - 1) * (t - 2) for t in ties_x)
            * sum(u * (u - 1) * (u - 2) for u in ties_y)
            / (9 * n * (n - 1) * (n - 2))
        )
    var = (v0 - vt - vu) / 18 + v1 + v2
    if var <= 0:
        p_raw = 1.0
    else:
        z = (concordant - discordant) / math.sqrt(var)
        p_raw = math.erfc(abs(z) / math.sqrt(2))
    return CorrelationResult(coefficient=tau, n=n, p_raw=p_raw)


def kendall_tau_b_exact_p(x: Sequence[float], y: Sequence[float]) -> float:
    """Exact permutation p-value for tau-b (enumeration; n <= 8 only).

    Two-sided: fraction of permutations of y whose |tau| reaches the observed
    |tau|. Cross-check for the normal approximation at leaderboard sizes.
    """
    n = _validate_pair(x, y)
    if n > 8:
        raise InputError("exact enumeration is limited to n <= 8")
    observed = abs(kendall_tau_b(x, y).coefficient)
    hits = total = 0
    for perm in permutations(y):
        total += 1
        if abs(kendall_tau_b(x, perm).coefficient) >= observed - 1e-12:
            hits += 1
    return hits / total


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman's rho: Pearson correlation of midranks, p via t-approximation."""
    n = _validate_pair(x, y)
    rx = _midranks(x)
    ry = _midranks(y)
    mean = (n + 1) / 2
    sxx = math.fsum((r - mean) ** 2 for r in rx)
    syy = math.fsum((r - mean) ** 2 for r in ry)
    if sxx == 0 or syy == 0:
        raise InputError("correlation undefined: at least one input is constant")
    sxy = math.fsum((a - mean) * (b - mean) for a, b in zip(rx, ry))
    rho = sxy / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    df = n - 2
    if df <= 0:
        p_raw = 1.0
    elif 1 - rho * rho <= 0:
        p_raw = 0.0
    else:
        from scipy.special import stdtr

        t = rho * math.sqrt(df / (1 - rho * rho))
        p_raw = 2 * float(stdtr(df, -abs(t)))
    return CorrelationResult(coefficient=rho, n=n, p_raw=p_raw, p_method="t-approximation")


def bonferroni(p_values: Sequence[float], m: int) -> list[float]:
    """Bonferroni adjustment: p * m, clamped to 1."""
    if m < len(p_values):
        raise InputError(f"family size {m} smaller than the number of p-values {len(p_values)}")
    for p in p_values:
        if not 0 <= p <= 1:
            raise InputError(f"p-value {p} outside [0, 1]")
    return [min(1.0, p * m) for p in p_values]


_METHODS = {"kendall": kendall_tau_b, "spearman": spearman_rho}


@dataclass(frozen=True)
class CorrelationMatrix:
    metrics: tuple[str, ...]
    ratings: tuple[str, ...]
    systems: tuple[str, ...]
    cells: Mapping[tuple[str, str], CorrelationResult | None]
    method: str


def correlation_matrix(
    scores: ScoreTable,
    ratings: RatingTable,
    method: str = "kendall",
) -> CorrelationMatrix:
    """Correlate every score column against every rating column.

    Systems are inner-joined on id; the Bonferroni family is the full matrix.
    Cells whose correlation is undefined (constant column after the join) are
    emitted as absent.
    """
    if method not in _METHODS:
        raise InputError(f"unknown correlation method {method!r}")
    corr = _METHODS[method]
    joined = tuple(sorted(set(scores.rows) & set(ratings.rows)))
    if len(joined) < 2:
        raise InputError(f"need at least 2 systems present in both tables, got {len(joined)}")
    family = len(scores.dimensions) * len(ratings.dimensions)
    cells: dict[tuple[str, str], CorrelationResult | None] = {}
    for metric in scores.dimensions:
        xs = scores.column(metric, joined)
        for rating in ratings.dimensions:
            ys = ratings.column(rating, joined)
            try:
                result = corr(xs, ys)
            except InputError:
                cells[(metric, rating)] = None
                continue
            adjusted = min(1.0, result.p_raw * family)
            cells[(metric, rating)] = dataclasses.replace(result, p_adjusted=adjusted)
    return CorrelationMatrix(
        metrics=scores.dimensions,
        ratings=ratings.dimensions,
        systems=joined,
        cells=cells,
        method=method,
    )


def correlation_matrix_csv(matrix: CorrelationMatrix) -> str:
    """Render rows = metrics, columns = ratings, cells "coef;p_raw;p_adj;n"."""
    lines = ["metric," + ",".join(matrix.ratings)]
    for metric in matrix.metrics:
        cells = []
        for rating in matrix.ratings:
            result = matrix.cells[(metric, rating)]
            if result is None:
                cells.append("NA")
            else:
                cells.append(
                    f"{result.coefficient:.6f};{result.p_raw:.6g};{result.p_adjusted:.6g};{result.n}"
                )
        lines.append(metric + "," + ",".join(cells))
    return "\n".join(lines) + "\n"
