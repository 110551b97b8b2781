"""Weighted kappa inter-annotator agreement for ordinal ratings."""

from __future__ import annotations

import logging
from itertools import combinations
from typing import Mapping, Sequence

from ..errors import InputError

logger = logging.getLogger("pareval")

_WEIGHTS = ("linear", "quadratic")


def weighted_kappa(
    rater_a: Sequence,
    rater_b: Sequence,
    weights: str,
    categories: Sequence,
) -> float:
    """Cohen's weighted kappa between two raters over ordered categories.

    kappa_w = 1 - sum(w * observed) / sum(w * expected), with disagreement
    weights |i-j| (linear) or (i-j)^2 (quadratic) over category positions and
    the chance-expected matrix built from the marginals. Undefined (error) when
    the expected disagreement is zero, i.e. both raters are constant and equal.
    """
    if weights not in _WEIGHTS:
        raise InputError(f"weights must be one of {_WEIGHTS}, got {weights!r}")
    if len(rater_a) != len(rater_b):
        raise InputError("rater sequences must have equal length")
    if not rater_a:
        raise InputError("rater sequences must be non-empty")
    index = {c: i for i, c in enumerate(categories)}
    if len(index) != len(categories):
        raise InputError("categories must be unique")
    for value in list(rater_a) + list(rater_b):
        if value not in index:
            raise InputError(f"value {value!r} not in the declared categories")
    k = len(categories)
    n = len(rater_a)
    observed = [[0.0] * k for _ in range(k)]
    for a, b in zip(rater_a, rater_b):
        observed[index[a]][index[b]] += 1 / n
    marg_a = [sum(observed[i][j] for j in range(k)) for i in range(k)]
    marg_b = [sum(observed[i][j] for i in range(k)) for j in range(k)]

    def weight(i: int, j: int) -> float:
        return abs(i - j) if weights == "linear" else (i - j) ** 2

    expected_dis = sum(
        weight(i, j) * marg_a[i] * marg_b[j] for i in range(k) for j in range(k)
    )
    if expected_dis == 0:
        raise InputError("kappa undefined: expected disagreement is zero")
    observed_dis = sum(
        weight(i, j) * observed[i][j] for i in range(k) for j in range(k)
    )
    return 1 - observed_dis / expected_dis


def grouped_weighted_kappa(
    groups: Mapping[str, Sequence[Sequence]],
    weights: str,
    categories: Sequence,
) -> float:
    """Mean pairwise weighted kappa over rater pairs within each group.

    ``groups`` maps a group id (e.g. a system) to that group's raters, each a
    sequence of ratings over the same items. All within-group rater pairs are
    pooled; pairs with undefined kappa are skipped with a warning.
    """
    kappas: list[float] = []
    for group_id, raters in groups.items():
        for a, b in combinations(range(len(raters)), 2):
            try:
                kappas.append(weighted_kappa(raters[a], raters[b], weights, categories))
            except InputError:
                logger.warning(
                    "group %r: kappa undefined for rater pair (%d, %d); skipped",
                    group_id, a, b,
                )
    if not kappas:
        raise InputError("no rater pair with a defined kappa")
    return sum(kappas) / len(kappas)
