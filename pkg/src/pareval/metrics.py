"""Proxy scores for explainable QA: answer/fact/joint overlap, answer-location
coupling, and explanation-length statistics, per instance and per system."""

from __future__ import annotations

import logging
import math
import re
import string
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, NamedTuple

from .corpus import Corpus, FactRef, Instance, Prediction, PredictionSet
from .errors import InputError

logger = logging.getLogger("pareval")

_EMPTY_PREDICTION = Prediction(answer="", facts=frozenset())

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)
_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")


def normalize_answer(raw: str) -> str:
    """Lowercase, strip punctuation, drop articles and collapse whitespace."""
    text = raw.lower().translate(_PUNCT_TABLE)
    text = _ARTICLE_RE.sub(" ", text)
    return " ".join(text.split())


class ScoreTuple(NamedTuple):
    em: int
    precision: float
    recall: float
    f1: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def answer_scores(pred: str, gold: str) -> ScoreTuple:
    """Token-overlap scores between predicted and gold answer.

    Overlap is multiset (bag) intersection of whitespace tokens of the
    normalized strings; EM is equality of the normalized strings.
    """
    pred_norm = normalize_answer(pred)
    gold_norm = normalize_answer(gold)
    pred_tokens = pred_norm.split()
    gold_tokens = gold_norm.split()
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    precision = overlap / len(pred_tokens) if pred_tokens else 0.0
    recall = overlap / len(gold_tokens) if gold_tokens else 0.0
    return ScoreTuple(int(pred_norm == gold_norm), precision, recall, _f1(precision, recall))


def sp_scores(pred: frozenset[FactRef], gold: frozenset[FactRef]) -> ScoreTuple:
    """Set-overlap scores between predicted and gold supporting facts."""
    if not pred and not gold:
        return ScoreTuple(1, 1.0, 1.0, 1.0)
    if not pred or not gold:
        return ScoreTuple(0, 0.0, 0.0, 0.0)
    tp = len(pred & gold)
    precision = tp / len(pred)
    recall = tp / len(gold)
    return ScoreTuple(int(pred == gold), precision, recall, _f1(precision, recall))


def joint_scores(answer: ScoreTuple, sp: ScoreTuple) -> ScoreTuple:
    """Joint scores: instance-wise products of EM/precision/recall, F1 recomposed."""
    jp = answer.precision * sp.precision
    jr = answer.recall * sp.recall
    return ScoreTuple(answer.em * sp.em, jp, jr, _f1(jp, jr))


class SurfaceStats(NamedTuple):
    num_facts: int
    num_words: int
    num_excess_facts: int


def surface_stats(
    pred_facts: frozenset[FactRef],
    gold_facts: frozenset[FactRef],
    instance: Instance,
) -> SurfaceStats:
    """Explanation length: fact count, total word count, excess over gold."""
    num_words = sum(len(instance.resolve(ref).split()) for ref in pred_facts)
    return SurfaceStats(len(pred_facts), num_words, len(pred_facts) - len(gold_facts))


class Location(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    NOT_COUNTED = "not_counted"


def answer_inside(pred_answer: str, pred_facts: frozenset[FactRef], instance: Instance) -> Location:
    """Locate the predicted answer relative to the predicted facts.

    Yes/no/empty answers are not counted (substring matching for them is
    meaningless). Otherwise the normalized answer must occur as a contiguous
    substring of the normalized predicted-fact text, concatenated in context
    order with single spaces.
    """
    norm = normalize_answer(pred_answer)
    if norm in ("", "yes", "no"):
        return Location.NOT_COUNTED
    parts = []
    for art in instance.context:
        for idx in range(len(art.sentences)):
            if FactRef(art.title, idx) in pred_facts:
                parts.append(art.sentences[idx])
    haystack = normalize_answer(" ".join(parts))
    return Location.INSIDE if norm in haystack else Location.OUTSIDE


class LocaCounts(NamedTuple):
    inside: int
    outside: int
    counted: int


class LocaResult(NamedTuple):
    score: float
    counts: LocaCounts


def loca(locations: Iterable[Location]) -> LocaResult:
    """Answer-explanation coupling score inside/(counted + outside).

    Equals 1 iff every counted answer lies inside its predicted facts and 0
    iff none does. Undefined (error) when no instance was counted.
    """
    inside = outside = 0
    for loc in locations:
        if loc is Location.INSIDE:
            inside += 1
        elif loc is Location.OUTSIDE:
            outside += 1
    counted = inside + outside
    if counted == 0:
        raise InputError("coupling score undefined: no counted answers (all yes/no/empty)")
    return LocaResult(inside / (counted + outside), LocaCounts(inside, outside, counted))


@dataclass(frozen=True)
class InstanceScores:
    answer_em: int
    answer_precision: float
    answer_recall: float
    answer_f1: float
    sp_em: int
    sp_precision: float
    sp_recall: float
    sp_f1: float
    joint_em: int
    joint_precision: float
    joint_recall: float
    joint_f1: float
    answer_inside: int
    answer_location: str
    num_facts: int
    num_words: int
    num_excess_facts: int


#: Metric names aggregated into per-system means, in output order.
MEAN_METRICS = (
    "answer_em", "answer_precision", "answer_recall", "answer_f1",
    "sp_em", "sp_precision", "sp_recall", "sp_f1",
    "joint_em", "joint_precision", "joint_recall", "joint_f1",
    "num_facts", "num_words", "num_excess_facts",
)

#: Rate metrics that are exactly 1.0 for a perfect system.
RATE_METRICS = MEAN_METRICS[:12]


@dataclass(frozen=True)
class SystemScores:
    system_id: str
    means: Mapping[str, float]
    loca: float | None
    loca_counts: LocaCounts

    def metrics(self) -> dict[str, float]:
        out = dict(self.means)
        if self.loca is not None:
            out["loca"] = self.loca
        return out


@dataclass(frozen=True)
class SystemEvaluation:
    system: SystemScores
    per_instance: tuple[tuple[str, InstanceScores], ...]


def score_instance(instance: Instance, pred_answer: str, pred_facts: frozenset[FactRef]) -> InstanceScores:
    ans = answer_scores(pred_answer, instance.gold_answer)
    sp = sp_scores(pred_facts, instance.gold_facts)
    joint = joint_scores(ans, sp)
    surface = surface_stats(pred_facts, instance.gold_facts, instance)
    location = answer_inside(pred_answer, pred_facts, instance)
    return InstanceScores(
        answer_em=ans.em, answer_precision=ans.precision,
        answer_recall=ans.recall, answer_f1=ans.f1,
        sp_em=sp.em, sp_precision=sp.precision, sp_recall=sp.recall, sp_f1=sp.f1,
        joint_em=joint.em, joint_precision=joint.precision,
        joint_recall=joint.recall, joint_f1=joint.f1,
        answer_inside=int(location is Location.INSIDE),
        answer_location=location.value,
        num_facts=surface.num_facts,
        num_words=surface.num_words,
        num_excess_facts=surface.num_excess_facts,
    )


def evaluate_system(corpus: Corpus, preds: PredictionSet, *, strict: bool = False) -> SystemEvaluation:
    """Score one system over a corpus.

    Instances without a prediction score zero on all rates with an empty fact
    set (and a warning); in strict mode they are an error instead. Means are
    unweighted over all corpus instances; fsum keeps them independent of
    instance order.
    """
    if len(corpus) == 0:
        raise InputError("cannot evaluate on an empty corpus")
    missing = preds.missing_ids(corpus)
    if missing and strict:
        raise InputError(
            f"system {preds.system_id!r}: missing predictions for "
            f"{len(missing)} instances (first: {missing[0]!r})"
        )
    per_instance = []
    for inst in corpus:
        pred = preds.entries.get(inst.id, _EMPTY_PREDICTION)
        per_instance.append((inst.id, score_instance(inst, pred.answer, pred.facts)))
    n = len(per_instance)
    means = {
        name: math.fsum(getattr(scores, name) for _, scores in per_instance) / n
        for name in MEAN_METRICS
    }
    locations = [Location(scores.answer_location) for _, scores in per_instance]
    try:
        loca_result = loca(locations)
        loca_value: float | None = loca_result.score
        counts = loca_result.counts
    except InputError:
        logger.warning(
            "system %r: coupling score undefined (no counted answers)", preds.system_id
        )
        loca_value = None
        counts = LocaCounts(0, 0, 0)
    system = SystemScores(
        system_id=preds.system_id,
        means=means,
        loca=loca_value,
        loca_counts=counts,
    )
    return SystemEvaluation(system=system, per_instance=tuple(per_instance))


def system_scores_to_json(scores: SystemScores) -> dict:
    return {
        "system_id": scores.system_id,
        "metrics": {k: scores.metrics()[k] for k in sorted(scores.metrics())},
        "loca_counts": {
            "I": scores.loca_counts.inside,
            "O": scores.loca_counts.outside,
            "A": scores.loca_counts.counted,
        },
    }
