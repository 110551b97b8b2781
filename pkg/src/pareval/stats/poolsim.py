"""Question-pool-size stability simulation: how stable are score-vs-rating
correlations when the evaluation uses only a subset of questions?"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..corpus import Corpus, PredictionSet
from ..errors import InputError
from ..metrics import evaluate_system
from .correlation import kendall_tau_b


@dataclass(frozen=True)
class PoolSimPoint:
    pool_size: int
    tau_mean: float | None
    tau_sd: float | None
    valid_repeats: int
    repeats: int


def _substream(seed: int, pool_size: int, repeat: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}\x1f{pool_size}\x1f{repeat}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def pool_simulation_from_tables(
    metric_values: Mapping[str, Mapping[str, float]],
    rating_values: Mapping[str, Mapping[str, float]],
    pool_sizes: Sequence[int],
    repeats: int,
    seed: int,
) -> list[PoolSimPoint]:
    """Core engine over per-(system, question) metric and rating tables.

    For each pool size, questions are resampled ``repeats`` times (without
    replacement, per-(size, repeat) substreams); each draw correlates the
    per-system metric means against the per-system rating means over the same
    subset. Draws with an undefined correlation are skipped and reported via
    ``valid_repeats``. The standard deviation is the population SD.
    """
    if repeats < 1:
        raise InputError("repeats must be >= 1")
    systems = sorted(metric_values)
    if len(systems) < 2:
        raise InputError("need at least 2 systems")
    if sorted(rating_values) != systems:
        raise InputError("metric and rating tables must cover the same systems")
    questions = sorted(metric_values[systems[0]])
    if not questions:
        raise InputError("no questions present")
    for system in systems:
        if sorted(metric_values[system]) != questions or sorted(rating_values[system]) != questions:
            raise InputError(f"system {system!r} does not cover the common question set")
    points: list[PoolSimPoint] = []
    for size in pool_sizes:
        if not 1 <= size <= len(questions):
            raise InputError(f"pool size {size} exceeds the question count {len(questions)}")
        taus: list[float] = []
        for repeat in range(repeats):
            rng = _substream(seed, size, repeat)
            subset = rng.sample(questions, size)
            xs = [math.fsum(metric_values[s][q] for q in subset) / size for s in systems]
            ys = [math.fsum(rating_values[s][q] for q in subset) / size for s in systems]
            try:
                taus.append(kendall_tau_b(xs, ys).coefficient)
            except InputError:
                continue
        if taus:
            mean = math.fsum(taus) / len(taus)
            sd = math.sqrt(math.fsum((t - mean) ** 2 for t in taus) / len(taus))
            points.append(PoolSimPoint(size, mean, sd, len(taus), repeats))
        else:
            points.append(PoolSimPoint(size, None, None, 0, repeats))
    return points


def question_pool_simulation(
    corpus: Corpus,
    predictions: Mapping[str, PredictionSet],
    ratings: Mapping[str, Mapping[str, float]],
    pool_sizes: Sequence[int],
    repeats: int,
    seed: int,
    target_metric: str = "joint_f1",
) -> list[PoolSimPoint]:
    """Stability curves from a corpus, per-system predictions and per-question ratings.

    ``ratings`` maps system id -> instance id -> rating. The target metric is
    recomputed per instance from the predictions; both tables are then fed to
    the subset-resampling engine.
    """
    if len(predictions) < 2:
        raise InputError("need predictions for at least 2 systems")
    metric_values: dict[str, dict[str, float]] = {}
    for system, preds in sorted(predictions.items()):
        evaluation = evaluate_system(corpus, preds)
        values = {}
        for inst_id, inst_scores in evaluation.per_instance:
            try:
                values[inst_id] = float(getattr(inst_scores, target_metric))
            except AttributeError:
                raise InputError(f"unknown target metric {target_metric!r}") from None
        metric_values[system] = values
    rating_values: dict[str, dict[str, float]] = {}
    for system in metric_values:
        if system not in ratings:
            raise InputError(f"no per-question ratings for system {system!r}")
        missing = [i.id for i in corpus if i.id not in ratings[system]]
        if missing:
            raise InputError(
                f"system {system!r}: missing ratings for {len(missing)} questions "
                f"(first: {missing[0]!r})"
            )
        rating_values[system] = {i.id: float(ratings[system][i.id]) for i in corpus}
    return pool_simulation_from_tables(metric_values, rating_values, pool_sizes, repeats, seed)


def pool_sim_csv(points: list[PoolSimPoint]) -> str:
    lines = ["pool_size,tau_mean,tau_sd,valid_repeats,repeats"]
    for point in points:
        mean = "NA" if point.tau_mean is None else f"{point.tau_mean:.6f}"
        sd = "NA" if point.tau_sd is None else f"{point.tau_sd:.6f}"
        lines.append(f"{point.pool_size},{mean},{sd},{point.valid_repeats},{point.repeats}")
    return "\n".join(lines) + "\n"
