"""Ranking strategies over multi-dimensional system scores: single score with
tiebreakers, (weighted) averages, and ranked Pareto fronts that never condense
the dimensions into one number."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Direction, ValueTable
from .errors import InputError

logger = logging.getLogger("pareval")


def _oriented(value: float, direction: Direction) -> float:
    return value if direction is Direction.HIGHER_BETTER else -value


@dataclass(frozen=True)
class RankingInput:
    """Validated ranking problem: every system has a value for every dimension."""

    systems: tuple[str, ...]
    dimensions: tuple[str, ...]
    values: Mapping[str, Mapping[str, float]]
    directions: Mapping[str, Direction]

    @classmethod
    def from_table(
        cls,
        table: ValueTable,
        dimensions: Sequence[str] | None = None,
        *,
        drop_incomplete: bool = False,
    ) -> "RankingInput":
        """Build a ranking input from a value table, optionally on a dimension subset.

        Systems lacking a value for some selected dimension are an error, or
        are dropped with a warning when ``drop_incomplete`` is set.
        """
        dims = tuple(dimensions) if dimensions is not None else table.dimensions
        for dim in dims:
            if dim not in table.dimensions:
                raise InputError(f"unknown dimension {dim!r}")
            if dim not in table.directions:
                raise InputError(f"no direction declared for dimension {dim!r}")
        systems = []
        for system, row in table.rows.items():
            holes = [d for d in dims if d not in row]
            if holes:
                if not drop_incomplete:
                    raise InputError(
                        f"system {system!r} has no value for {holes[0]!r} "
                        "(use drop-incomplete mode to exclude such systems)"
                    )
                logger.warning(
                    "dropping system %r: missing value for %s", system, ", ".join(holes)
                )
                continue
            systems.append(system)
        if not systems:
            raise InputError("no system with complete values for the selected dimensions")
        return cls(
            systems=tuple(systems),
            dimensions=dims,
            values={s: {d: table.rows[s][d] for d in dims} for s in systems},
            directions={d: table.directions[d] for d in dims},
        )


def dominates(
    a: Mapping[str, float],
    b: Mapping[str, float],
    directions: Mapping[str, Direction],
) -> bool:
    """True iff a is at least as good as b everywhere and strictly better somewhere."""
    if set(a) != set(b) or set(a) != set(directions):
        raise InputError("domination check requires identical dimension sets")
    strictly_better = False
    for dim, direction in directions.items():
        va = _oriented(a[dim], direction)
        vb = _oriented(b[dim], direction)
        if va < vb:
            return False
        if va > vb:
            strictly_better = True
    return strictly_better


@dataclass(frozen=True)
class ParetoRanking:
    """Ordered fronts partitioning the system set; rank maps id -> 1-based front."""

    fronts: tuple[tuple[str, ...], ...]
    rank: Mapping[str, int]


def ranked_pareto_fronts(inp: RankingInput) -> ParetoRanking:
    """Iteratively peel non-dominated sets until every system is ranked.

    Equal vectors share a front. Within-front listing order is ascending
    system id and carries no rank meaning.
    """
    remaining = set(inp.systems)
    fronts: list[tuple[str, ...]] = []
    rank: dict[str, int] = {}
    while remaining:
        front = sorted(
            s for s in remaining
            if not any(
                dominates(inp.values[t], inp.values[s], inp.directions)
                for t in remaining
                if t != s
            )
        )
        fronts.append(tuple(front))
        for system in front:
            rank[system] = len(fronts)
        remaining.difference_update(front)
    return ParetoRanking(fronts=tuple(fronts), rank=rank)


@dataclass(frozen=True)
class RankGroup:
    """One rank position; ``systems`` are tied (equal on every sort key)."""

    rank: int
    systems: tuple[str, ...]
    score: float | None = None


def _group_by_key(inp: RankingInput, key: Mapping[str, tuple], scores: Mapping[str, float] | None) -> list[RankGroup]:
    ordered = sorted(inp.systems, key=lambda s: (tuple(-v for v in key[s]), s))
    groups: list[RankGroup] = []
    for system in ordered:
        if groups and key[system] == key[groups[-1].systems[-1]]:
            last = groups[-1]
            groups[-1] = RankGroup(last.rank, last.systems + (system,), last.score)
        else:
            groups.append(
                RankGroup(
                    rank=len(groups) + 1,
                    systems=(system,),
                    score=scores[system] if scores is not None else None,
                )
            )
    return groups


def rank_single(
    inp: RankingInput,
    dimension: str,
    tiebreakers: Sequence[str] = (),
) -> list[RankGroup]:
    """Direction-aware sort on one dimension, then tiebreakers, then system id.

    Systems equal on the dimension and on every tiebreaker form one tie group.
    """
    for dim in (dimension, *tiebreakers):
        if dim not in inp.dimensions:
            raise InputError(f"unknown dimension {dim!r}")
    keys = {
        s: tuple(
            _oriented(inp.values[s][d], inp.directions[d]) for d in (dimension, *tiebreakers)
        )
        for s in inp.systems
    }
    scores = {s: inp.values[s][dimension] for s in inp.systems}
    return _group_by_key(inp, keys, scores)


def rank_weighted(inp: RankingInput, weights: Mapping[str, float]) -> list[RankGroup]:
    """Descending sort on the direction-oriented weighted sum of a dimension subset."""
    for dim in weights:
        if dim not in inp.dimensions:
            raise InputError(f"weight on unknown dimension {dim!r}")
    scores = {
        s: math.fsum(
            weights[d] * _oriented(inp.values[s][d], inp.directions[d])
            for d in sorted(weights)
        )
        for s in inp.systems
    }
    keys = {s: (scores[s],) for s in inp.systems}
    return _group_by_key(inp, keys, scores)


def rank_average(inp: RankingInput) -> list[RankGroup]:
    """Equal-weight average over all dimensions (oriented values)."""
    weight = 1.0 / len(inp.dimensions)
    return rank_weighted(inp, {d: weight for d in inp.dimensions})


# ---------------------------------------------------------------------------
# Output formats


def pareto_to_json(ranking: ParetoRanking) -> dict:
    return {
        "strategy": "pareto",
        "fronts": [list(front) for front in ranking.fronts],
    }


def order_to_json(strategy: str, groups: list[RankGroup]) -> dict:
    return {
        "strategy": strategy,
        "order": [
            {
                "rank": g.rank,
                "systems": list(g.systems),
                **({"score": g.score} if g.score is not None else {}),
            }
            for g in groups
        ],
    }


def pareto_markdown(ranking: ParetoRanking) -> str:
    lines = ["| Rank | Systems |", "|---|---|"]
    for i, front in enumerate(ranking.fronts, start=1):
        lines.append(f"| {i} | " + ", ".join(front) + " |")
    return "\n".join(lines) + "\n"


def order_markdown(groups: list[RankGroup]) -> str:
    lines = ["| Rank | Systems | Score |", "|---|---|---|"]
    for g in groups:
        score = "" if g.score is None else f"{g.score:.4f}"
        lines.append(f"| {g.rank} | " + ", ".join(g.systems) + f" | {score} |")
    return "\n".join(lines) + "\n"


def pareto_csv(ranking: ParetoRanking) -> str:
    lines = ["rank,system"]
    for i, front in enumerate(ranking.fronts, start=1):
        for system in front:
            lines.append(f"{i},{system}")
    return "\n".join(lines) + "\n"


def order_csv(groups: list[RankGroup]) -> str:
    lines = ["rank,system,score"]
    for g in groups:
        score = "" if g.score is None else f"{g.score:.6f}"
        for system in g.systems:
            lines.append(f"{g.rank},{system},{score}")
    return "\n".join(lines) + "\n"
