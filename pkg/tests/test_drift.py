import datetime as dt

import pytest

from pareval.corpus import Direction, SubmissionLog, ValueTable
from pareval.errors import InputError
from pareval.stats import drift_analysis, drift_series_csv
from pareval.stats.correlation import kendall_tau_b


def month(i: int) -> dt.date:
    return dt.date(2019 + i // 12, i % 12 + 1, 15)


def one_dim_table(name, values):
    return ValueTable(
        dimensions=(name,),
        rows={s: {name: v} for s, v in values.items()},
        directions={name: Direction.HIGHER_BETTER},
    )


def degrading_series(n_months=24, per_month=2, switch=12):
    """Systems whose score-rating relation flips from +1 to -1 at ``switch``."""
    scores, ratings, dates = {}, {}, {}
    k = 0
    for m in range(n_months):
        for _ in range(per_month):
            name = f"s{k:03d}"
            scores[name] = float(k)
            ratings[name] = float(k) if m < switch else float(-k)
            dates[name] = month(m)
            k += 1
    return (
        one_dim_table("score", scores),
        one_dim_table("rating", ratings),
        SubmissionLog(dates=dates),
    )


class TestDriftAnalysis:
    def test_single_month_single_window_equals_global_tau(self):
        scores = one_dim_table("score", {"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0})
        ratings = one_dim_table("rating", {"a": 1.0, "b": 3.0, "c": 2.0, "d": 4.0})
        log = SubmissionLog(dates={s: dt.date(2020, 3, x + 1) for x, s in enumerate("abcd")})
        windows = drift_analysis(scores, ratings, log, "score", window_months=12)
        assert len(windows) == 1
        expected = kendall_tau_b([1, 2, 3, 4], [1, 3, 2, 4]).coefficient
        assert windows[0].correlations["rating"].coefficient == pytest.approx(expected)
        assert windows[0].n_systems == 4

    def test_degrading_series_strictly_decreasing(self):
        scores, ratings, log = degrading_series()
        windows = drift_analysis(scores, ratings, log, "score", window_months=12, min_systems=4)
        taus = [
            w.correlations["rating"].coefficient
            for w in windows
            if w.correlations["rating"] is not None
        ]
        assert taus[0] == 1.0
        assert taus[-1] == -1.0
        full_windows = [t for w, t in zip(windows, taus) if w.n_systems == 24]
        assert all(b < a for a, b in zip(full_windows, full_windows[1:]))

    def test_windows_ordered_and_monthly(self):
        scores, ratings, log = degrading_series()
        windows = drift_analysis(scores, ratings, log, "score", window_months=12, step_months=1)
        starts = [w.start for w in windows]
        assert starts == sorted(starts)
        assert starts[0] == dt.date(2019, 1, 1)
        assert (windows[0].end - dt.timedelta(days=1)).month == 12
        assert len(windows) == 24  # one start per submission month

    def test_small_windows_emitted_without_correlation(self):
        scores, ratings, log = degrading_series(n_months=24, per_month=1)
        windows = drift_analysis(scores, ratings, log, "score", window_months=2, min_systems=4)
        assert all(w.correlations["rating"] is None for w in windows)
        assert all(w.n_systems <= 2 for w in windows)

    def test_step_months(self):
        scores, ratings, log = degrading_series()
        monthly = drift_analysis(scores, ratings, log, "score", window_months=12, step_months=1)
        quarterly = drift_analysis(scores, ratings, log, "score", window_months=12, step_months=3)
        assert len(quarterly) == (len(monthly) + 2) // 3

    def test_missing_dates_error(self):
        scores = one_dim_table("score", {"a": 1.0, "b": 2.0})
        ratings = one_dim_table("rating", {"a": 1.0, "b": 2.0})
        with pytest.raises(InputError, match="without a submission date: b"):
            drift_analysis(scores, ratings, SubmissionLog(dates={"a": dt.date(2020, 1, 1)}), "score")

    def test_unknown_metric(self):
        scores, ratings, log = degrading_series()
        with pytest.raises(InputError, match="unknown target metric"):
            drift_analysis(scores, ratings, log, "accuracy")

    def test_no_joined_systems(self):
        scores = one_dim_table("score", {"a": 1.0})
        ratings = one_dim_table("rating", {"z": 1.0})
        with pytest.raises(InputError, match="no system present in both"):
            drift_analysis(scores, ratings, SubmissionLog(dates={}), "score")

    def test_csv_render(self):
        scores, ratings, log = degrading_series(n_months=6, per_month=2, switch=3)
        windows = drift_analysis(scores, ratings, log, "score", window_months=3, min_systems=4)
        text = drift_series_csv(windows)
        lines = text.strip().splitlines()
        assert lines[0] == "window_start,window_end,rating,coef,p,n"
        assert lines[1].startswith("2019-01-01,2019-04-01,rating,")
