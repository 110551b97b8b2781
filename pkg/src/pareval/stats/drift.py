"""Sliding-window correlation between a target metric and human ratings over
submission time, for monitoring validity erosion."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping

from ..corpus import RatingTable, ScoreTable, SubmissionLog
from ..errors import InputError
from .correlation import CorrelationResult, kendall_tau_b


@dataclass(frozen=True)
class DriftWindow:
    start: dt.date
    end: dt.date  # exclusive
    n_systems: int
    correlations: Mapping[str, CorrelationResult | None]


def _month_index(d: dt.date) -> int:
    return d.year * 12 + d.month - 1


def _month_start(index: int) -> dt.date:
    return dt.date(index // 12, index % 12 + 1, 1)


def drift_analysis(
    scores: ScoreTable,
    ratings: RatingTable,
    submissions: SubmissionLog,
    target_metric: str,
    window_months: int = 12,
    step_months: int = 1,
    min_systems: int = 4,
) -> list[DriftWindow]:
    """Correlate ``target_metric`` with every rating inside calendar windows.

    Windows cover [start, start + window_months) whole months and advance by
    ``step_months`` from the earliest to the latest submission month. Windows
    holding fewer than ``min_systems`` systems are emitted with absent
    correlations, as are cells whose correlation is undefined in a window.
    """
    if window_months < 1 or step_months < 1:
        raise InputError("window_months and step_months must be >= 1")
    if target_metric not in scores.dimensions:
        raise InputError(f"unknown target metric {target_metric!r}")
    systems = tuple(sorted(set(scores.rows) & set(ratings.rows)))
    if not systems:
        raise InputError("no system present in both the score and rating tables")
    undated = [s for s in systems if s not in submissions.dates]
    if undated:
        raise InputError(f"systems without a submission date: {', '.join(undated)}")
    months = {s: _month_index(submissions.dates[s]) for s in systems}
    first = min(months.values())
    last = max(months.values())
    windows: list[DriftWindow] = []
    for start in range(first, last + 1, step_months):
        end = start + window_months
        members = tuple(s for s in systems if start <= months[s] < end)
        correlations: dict[str, CorrelationResult | None] = {}
        for rating in ratings.dimensions:
            if len(members) < min_systems:
                correlations[rating] = None
                continue
            xs = scores.column(target_metric, members)
            ys = ratings.column(rating, members)
            try:
                correlations[rating] = kendall_tau_b(xs, ys)
            except InputError:
                correlations[rating] = None
        windows.append(
            DriftWindow(
                start=_month_start(start),
                end=_month_start(end),
                n_systems=len(members),
                correlations=correlations,
            )
        )
    return windows


def drift_series_csv(windows: list[DriftWindow]) -> str:
    lines = ["window_start,window_end,rating,coef,p,n"]
    for window in windows:
        for rating, result in window.correlations.items():
            if result is None:
                lines.append(
                    f"{window.start.isoformat()},{window.end.isoformat()},{rating},NA,NA,{window.n_systems}"
                )
            else:
                lines.append(
                    f"{window.start.isoformat()},{window.end.isoformat()},{rating},"
                    f"{result.coefficient:.6f},{result.p_raw:.6g},{result.n}"
                )
    return "\n".join(lines) + "\n"
