"""Synthetic reference systems derived from gold annotations.

Each variant is deterministic given (corpus, variant, seed): every instance
draws from its own substream keyed by (seed, purpose, instance id), so adding
or reordering instances never perturbs the draws of existing ones.
"""

from __future__ import annotations

import hashlib
import random
from enum import Enum

from .corpus import Corpus, FactRef, Instance, Prediction, PredictionSet
from .errors import InfeasibleSamplingError, InputError


class SyntheticVariant(Enum):
    GOLD_GOLD = "gold-gold"
    GOLD_ANSWERS_RANDOM_FACTS = "gold-answers-random-facts"
    RANDOM_ANSWERS_GOLD_FACTS = "random-answers-gold-facts"
    RANDOM_ANSWERS_RANDOM_FACTS = "random-answers-random-facts"
    GOLD_ANSWERS_ALL_FACTS = "gold-answers-all-facts"


def _substream(seed: int, purpose: str, instance_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}\x1f{purpose}\x1f{instance_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _all_facts(instance: Instance) -> frozenset[FactRef]:
    return frozenset(
        FactRef(art.title, idx)
        for art in instance.context
        for idx in range(len(art.sentences))
    )


def _sample_facts(instance: Instance, rng: random.Random) -> frozenset[FactRef] | None:
    """Sample |gold_facts| facts from articles that contain no gold fact."""
    gold_titles = {ref.title for ref in instance.gold_facts}
    eligible = [
        FactRef(art.title, idx)
        for art in instance.context
        if art.title not in gold_titles
        for idx in range(len(art.sentences))
    ]
    need = len(instance.gold_facts)
    if len(eligible) < need:
        return None
    return frozenset(rng.sample(eligible, need))


def _sample_answer(instance: Instance, rng: random.Random) -> str | None:
    """Sample a contiguous context token span with the gold answer's word count."""
    length = len(instance.gold_answer.split())
    if length == 0:
        return ""
    positions: list[tuple[int, int]] = []
    article_tokens: list[list[str]] = []
    for art_idx, art in enumerate(instance.context):
        tokens = " ".join(art.sentences).split()
        article_tokens.append(tokens)
        positions.extend((art_idx, start) for start in range(len(tokens) - length + 1))
    if not positions:
        return None
    art_idx, start = positions[rng.randrange(len(positions))]
    return " ".join(article_tokens[art_idx][start:start + length])


def derive_synthetic(corpus: Corpus, variant: SyntheticVariant, seed: int) -> PredictionSet:
    """Build one of the five gold-derived reference systems."""
    if len(corpus) == 0:
        raise InputError("cannot derive a synthetic system from an empty corpus")
    entries: dict[str, Prediction] = {}
    infeasible: list[str] = []
    random_answers = variant in (
        SyntheticVariant.RANDOM_ANSWERS_GOLD_FACTS,
        SyntheticVariant.RANDOM_ANSWERS_RANDOM_FACTS,
    )
    random_facts = variant in (
        SyntheticVariant.GOLD_ANSWERS_RANDOM_FACTS,
        SyntheticVariant.RANDOM_ANSWERS_RANDOM_FACTS,
    )
    for inst in corpus:
        answer = inst.gold_answer
        facts = inst.gold_facts
        if variant is SyntheticVariant.GOLD_ANSWERS_ALL_FACTS:
            facts = _all_facts(inst)
        if random_facts:
            sampled = _sample_facts(inst, _substream(seed, "facts", inst.id))
            if sampled is None:
                infeasible.append(inst.id)
                continue
            facts = sampled
        if random_answers:
            span = _sample_answer(inst, _substream(seed, "answer", inst.id))
            if span is None:
                infeasible.append(inst.id)
                continue
            answer = span
        entries[inst.id] = Prediction(answer=answer, facts=facts)
    if infeasible:
        shown = ", ".join(infeasible[:10]) + ("..." if len(infeasible) > 10 else "")
        raise InfeasibleSamplingError(
            f"variant {variant.value!r}: sampling infeasible for "
            f"{len(infeasible)} instances ({shown})",
            infeasible,
        )
    return PredictionSet(system_id=variant.value, entries=entries)
