"""Data model and ingestion for gold data, predictions, ratings and submissions.

Gold files use the HotpotQA distractor-setting layout; prediction files use the
official submission layout. Both are accepted bit-for-bit as distributed.
Loaded structures are immutable and safe to share across workers.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping

from .errors import InputError

logger = logging.getLogger("pareval")


class Direction(Enum):
    """Orientation of a score/rating dimension."""

    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"


def _nfc(text: str) -> str:
    # Titles are exact keys; NFC guards against encoder drift between files.
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Article:
    title: str
    sentences: tuple[str, ...]


@dataclass(frozen=True, order=True)
class FactRef:
    """Reference to one context sentence: (article title, 0-based index)."""

    title: str
    sentence_index: int


@dataclass(frozen=True)
class Instance:
    id: str
    question: str
    context: tuple[Article, ...]
    gold_answer: str
    gold_facts: frozenset[FactRef]

    def article(self, title: str) -> Article:
        for art in self.context:
            if art.title == title:
                return art
        raise InputError(f"instance {self.id!r}: no context article titled {title!r}")

    def resolve(self, ref: FactRef) -> str:
        """Return the sentence a fact reference points at."""
        art = self.article(ref.title)
        if not 0 <= ref.sentence_index < len(art.sentences):
            raise InputError(
                f"instance {self.id!r}: fact ({ref.title!r}, {ref.sentence_index}) "
                f"out of range (article has {len(art.sentences)} sentences)"
            )
        return art.sentences[ref.sentence_index]


@dataclass(frozen=True)
class Corpus:
    instances: tuple[Instance, ...]
    by_id: Mapping[str, Instance] = field(compare=False)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    @classmethod
    def from_instances(cls, instances: tuple[Instance, ...]) -> "Corpus":
        by_id: dict[str, Instance] = {}
        for inst in instances:
            if inst.id in by_id:
                raise InputError(f"duplicate instance id {inst.id!r}")
            by_id[inst.id] = inst
        return cls(instances=instances, by_id=by_id)


@dataclass(frozen=True)
class Prediction:
    answer: str
    facts: frozenset[FactRef]


@dataclass(frozen=True)
class PredictionSet:
    system_id: str
    entries: Mapping[str, Prediction]

    def missing_ids(self, corpus: Corpus) -> tuple[str, ...]:
        return tuple(i.id for i in corpus if i.id not in self.entries)


@dataclass(frozen=True)
class ValueTable:
    """Systems x dimensions matrix with per-dimension directions.

    Used both for automatic score tables and for human rating tables.
    ``rows`` may omit dimensions only when loaded with ``allow_missing``;
    the strict loaders guarantee a complete matrix.
    """

    dimensions: tuple[str, ...]
    rows: Mapping[str, Mapping[str, float]]
    directions: Mapping[str, Direction]

    def systems(self) -> tuple[str, ...]:
        return tuple(self.rows)

    def column(self, dimension: str, systems: tuple[str, ...]) -> list[float]:
        if dimension not in self.dimensions:
            raise InputError(f"unknown dimension {dimension!r}")
        return [self.rows[s][dimension] for s in systems]


# The two table roles share one representation.
RatingTable = ValueTable
ScoreTable = ValueTable


@dataclass(frozen=True)
class SubmissionLog:
    dates: Mapping[str, dt.date]


# ---------------------------------------------------------------------------
# Loaders


def _read_json(path: str | Path):
    raw = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: JSON parse error at line {exc.lineno} column {exc.colno} "
            f"(byte offset {exc.pos}): {exc.msg}"
        ) from exc


def _parse_fact(raw, where: str) -> FactRef:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 2
        or not isinstance(raw[0], str)
        or not isinstance(raw[1], int)
        or isinstance(raw[1], bool)
    ):
        raise InputError(f"{where}: malformed fact reference {raw!r} (expected [title, index])")
    if raw[1] < 0:
        raise InputError(f"{where}: negative sentence index in fact reference {raw!r}")
    return FactRef(title=_nfc(raw[0]), sentence_index=raw[1])


def _check_resolves(inst: Instance, ref: FactRef, where: str) -> None:
    for art in inst.context:
        if art.title == ref.title:
            if ref.sentence_index < len(art.sentences):
                return
            raise InputError(
                f"{where}: dangling fact ({ref.title!r}, {ref.sentence_index}) in instance "
                f"{inst.id!r}: article has only {len(art.sentences)} sentences"
            )
    raise InputError(
        f"{where}: dangling fact ({ref.title!r}, {ref.sentence_index}) in instance "
        f"{inst.id!r}: no such context article"
    )


def load_gold(path: str | Path) -> Corpus:
    """Load a gold corpus from a HotpotQA-format JSON array.

    Unknown per-instance keys are ignored. Duplicate ids, dangling fact
    references and empty gold fact sets are errors.
    """
    data = _read_json(path)
    if not isinstance(data, list):
        raise InputError(f"{path}: expected a JSON array of instance records")
    instances = []
    for pos, rec in enumerate(data):
        where = f"{path}[{pos}]"
        if not isinstance(rec, dict):
            raise InputError(f"{where}: expected an object")
        try:
            inst_id = rec["_id"]
            question = rec["question"]
            answer = rec["answer"]
            context_raw = rec["context"]
            sp_raw = rec["supporting_facts"]
        except KeyError as exc:
            raise InputError(f"{where}: missing required key {exc.args[0]!r}") from exc
        if not isinstance(inst_id, str) or not inst_id:
            raise InputError(f"{where}: '_id' must be a non-empty string")
        context = []
        for art_raw in context_raw:
            if not isinstance(art_raw, (list, tuple)) or len(art_raw) != 2:
                raise InputError(f"{where}: malformed context article {art_raw!r}")
            title, sentences = art_raw
            if not isinstance(title, str) or not title:
                raise InputError(f"{where}: article title must be a non-empty string")
            if not all(isinstance(s, str) for s in sentences):
                raise InputError(f"{where}: article sentences must be strings")
            if not sentences:
                logger.warning("instance %r: context article %r has no sentences", inst_id, title)
            context.append(Article(title=_nfc(title), sentences=tuple(sentences)))
        gold_facts = frozenset(_parse_fact(f, where) for f in sp_raw)
        if not gold_facts:
            raise InputError(f"{where}: instance {inst_id!r} has no supporting facts")
        inst = Instance(
            id=inst_id,
            question=question,
            context=tuple(context),
            gold_answer=answer,
            gold_facts=gold_facts,
        )
        for ref in gold_facts:
            _check_resolves(inst, ref, where)
        instances.append(inst)
    if not instances:
        logger.warning("%s: gold file contains no instances", path)
    return Corpus.from_instances(tuple(instances))


def corpus_to_json(corpus: Corpus) -> list:
    return [
        {
            "_id": inst.id,
            "question": inst.question,
            "answer": inst.gold_answer,
            "context": [[a.title, list(a.sentences)] for a in inst.context],
            "supporting_facts": [[r.title, r.sentence_index] for r in sorted(inst.gold_facts)],
        }
        for inst in corpus
    ]


def save_gold(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(corpus_to_json(corpus), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_predictions(path: str | Path, corpus: Corpus, system_id: str | None = None) -> PredictionSet:
    """Load a prediction file ({"answer": {...}, "sp": {...}}) aligned to a corpus.

    An instance is covered if it appears in either map; the absent half
    defaults to an empty answer / empty fact set (answer-only systems stay
    scoreable). Instances absent from both maps are reported as missing.
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object with 'answer' and 'sp' maps")
    answers = data.get("answer", {})
    sp = data.get("sp", {})
    if not isinstance(answers, dict) or not isinstance(sp, dict):
        raise InputError(f"{path}: 'answer' and 'sp' must be objects keyed by instance id")
    entries: dict[str, Prediction] = {}
    for inst_id in sorted(set(answers) | set(sp)):
        if inst_id not in corpus.by_id:
            raise InputError(f"{path}: prediction for unknown instance id {inst_id!r}")
        inst = corpus.by_id[inst_id]
        answer = answers.get(inst_id, "")
        if not isinstance(answer, str):
            raise InputError(f"{path}: answer for instance {inst_id!r} must be a string")
        facts = frozenset(_parse_fact(f, f"{path}:sp[{inst_id!r}]") for f in sp.get(inst_id, []))
        for ref in facts:
            _check_resolves(inst, ref, f"{path}:sp")
        entries[inst_id] = Prediction(answer=answer, facts=facts)
    preds = PredictionSet(
        system_id=system_id if system_id is not None else Path(path).stem,
        entries=entries,
    )
    missing = preds.missing_ids(corpus)
    if missing:
        shown = ", ".join(missing[:5]) + ("..." if len(missing) > 5 else "")
        logger.warning(
            "%s: %d of %d instances have no prediction (%s); they score zero",
            path, len(missing), len(corpus), shown,
        )
    return preds


def predictions_to_json(preds: PredictionSet) -> dict:
    return {
        "answer": {i: p.answer for i, p in sorted(preds.entries.items())},
        "sp": {
            i: [[r.title, r.sentence_index] for r in sorted(p.facts)]
            for i, p in sorted(preds.entries.items())
        },
    }


def save_predictions(preds: PredictionSet, path: str | Path) -> None:
    # Canonical key order keeps identical inputs byte-identical on disk.
    Path(path).write_text(
        json.dumps(predictions_to_json(preds), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_directions(path: str | Path) -> dict[str, Direction]:
    """Load a direction spec: [{"name": ..., "direction": "higher"|"lower"}, ...]."""
    data = _read_json(path)
    if not isinstance(data, list):
        raise InputError(f"{path}: direction spec must be a JSON array")
    directions: dict[str, Direction] = {}
    for entry in data:
        try:
            name = entry["name"]
            raw = entry["direction"]
        except (TypeError, KeyError):
            raise InputError(f"{path}: malformed direction entry {entry!r}") from None
        try:
            directions[name] = Direction(raw)
        except ValueError:
            raise InputError(
                f"{path}: direction for {name!r} must be 'higher' or 'lower', got {raw!r}"
            ) from None
    return directions


def _read_csv_rows(path: str | Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [row for row in csv.reader(fh) if row]


def load_ratings(
    path: str | Path,
    directions: Mapping[str, Direction],
    *,
    allow_missing: bool = False,
) -> ValueTable:
    """Load a system table CSV (header: system_id,<dim>,...) with directions.

    Every header dimension must be covered by the direction spec. Empty cells
    are errors unless ``allow_missing`` is set, in which case the value is
    simply absent from that system's row.
    """
    rows = _read_csv_rows(path)
    if not rows:
        raise InputError(f"{path}: empty CSV")
    header = rows[0]
    if not header or header[0] != "system_id":
        raise InputError(f"{path}: first header column must be 'system_id'")
    dims = tuple(header[1:])
    if not dims:
        raise InputError(f"{path}: no dimension columns")
    if len(set(dims)) != len(dims):
        raise InputError(f"{path}: duplicate dimension columns in header")
    for dim in dims:
        if dim not in directions:
            raise InputError(f"{path}: dimension {dim!r} not covered by the direction spec")
    table: dict[str, dict[str, float]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        system = row[0]
        if system in table:
            raise InputError(f"{path}:{lineno}: duplicate system id {system!r}")
        values: dict[str, float] = {}
        for dim, cell in zip(dims, row[1:]):
            if cell.strip() == "":
                if allow_missing:
                    continue
                raise InputError(f"{path}:{lineno}: missing value for {dim!r}")
            try:
                values[dim] = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}:{lineno}: non-numeric value {cell!r} for {dim!r}"
                ) from None
        table[system] = values
    return ValueTable(
        dimensions=dims,
        rows=table,
        directions={d: directions[d] for d in dims},
    )


# Score tables share the rating-table CSV contract.
load_score_table = load_ratings


def load_submissions(path: str | Path) -> SubmissionLog:
    """Load a submission log CSV (header: system_id,submitted_on; ISO dates)."""
    rows = _read_csv_rows(path)
    if not rows:
        raise InputError(f"{path}: empty CSV")
    if rows[0][:2] != ["system_id", "submitted_on"]:
        raise InputError(f"{path}: header must be 'system_id,submitted_on'")
    dates: dict[str, dt.date] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) < 2:
            raise InputError(f"{path}:{lineno}: expected 2 cells")
        system, raw = row[0], row[1]
        if system in dates:
            raise InputError(f"{path}:{lineno}: duplicate system id {system!r}")
        try:
            dates[system] = dt.date.fromisoformat(raw)
        except ValueError:
            raise InputError(f"{path}:{lineno}: unparseable date {raw!r} (expected ISO 8601)") from None
    return SubmissionLog(dates=dates)
