"""Command-line surface: evaluate, synth, rank, correlate, drift, factor,
poolsim and report subcommands over the library modules.

Exit codes: 0 success, 2 input/validation error, 1 internal error. Warnings go
to stderr; stdout carries nothing when --out is given. All randomness sits
behind --seed (default PAREVAL_SEED from the environment, else 1729).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import traceback
from pathlib import Path

from . import leaderboard as lb
from .corpus import (
    load_directions,
    load_gold,
    load_predictions,
    load_ratings,
    load_submissions,
    save_predictions,
)
from .errors import InputError
from .metrics import MEAN_METRICS, evaluate_system, system_scores_to_json
from .stats import (
    correlation_matrix,
    correlation_matrix_csv,
    drift_analysis,
    drift_series_csv,
    extract_and_rotate,
    factor_model_markdown,
    factor_model_to_json,
    kaiser_count,
    parallel_analysis,
    pool_sim_csv,
    question_pool_simulation,
)
from .synth import SyntheticVariant, derive_synthetic

DEFAULT_SEED = 1729
FORMAT_VERSION = 1


def _default_seed() -> int:
    raw = os.environ.get("PAREVAL_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"PAREVAL_SEED must be an integer, got {raw!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(payload: dict, out: str | None) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    _emit(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n", out)


def _load_table(path: str, directions_path: str, *, allow_missing: bool = False):
    return load_ratings(path, load_directions(directions_path), allow_missing=allow_missing)


def cmd_evaluate(args: argparse.Namespace) -> int:
    corpus = load_gold(args.gold)
    preds = load_predictions(args.pred, corpus, system_id=args.system_id)
    evaluation = evaluate_system(corpus, preds, strict=args.strict)
    _emit_json(system_scores_to_json(evaluation.system), args.out)
    if args.per_instance:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["instance_id", *MEAN_METRICS, "answer_location"])
        for inst_id, scores in evaluation.per_instance:
            writer.writerow(
                [inst_id]
                + [getattr(scores, name) for name in MEAN_METRICS]
                + [scores.answer_location]
            )
        Path(args.per_instance).write_text(buf.getvalue(), encoding="utf-8")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    corpus = load_gold(args.gold)
    variant = SyntheticVariant(args.variant)
    preds = derive_synthetic(corpus, variant, args.seed)
    save_predictions(preds, args.out)
    return 0


def _read_json_file(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: JSON parse error at byte offset {exc.pos}: {exc.msg}") from exc


def _parse_weights(path: str) -> dict[str, float]:
    raw = _read_json_file(path)
    if not isinstance(raw, dict):
        raise InputError(f"{path}: weight spec must be a JSON object of dimension -> weight")
    try:
        return {k: float(v) for k, v in raw.items()}
    except (TypeError, ValueError):
        raise InputError(f"{path}: weights must be numeric") from None


def cmd_rank(args: argparse.Namespace) -> int:
    table = _load_table(args.table, args.directions, allow_missing=args.drop_incomplete)
    dims = args.dims.split(",") if args.dims else None
    inp = lb.RankingInput.from_table(table, dims, drop_incomplete=args.drop_incomplete)
    strategy = args.strategy
    if strategy == "pareto":
        ranking = lb.ranked_pareto_fronts(inp)
        payload = lb.pareto_to_json(ranking)
        rendered = {"md": lb.pareto_markdown(ranking), "csv": lb.pareto_csv(ranking)}
    else:
        if strategy.startswith("single:"):
            dimension = strategy.split(":", 1)[1]
            tiebreakers = args.tiebreakers.split(",") if args.tiebreakers else ()
            groups = lb.rank_single(inp, dimension, tiebreakers)
        elif strategy == "average":
            groups = lb.rank_average(inp)
        elif strategy.startswith("weighted:"):
            groups = lb.rank_weighted(inp, _parse_weights(strategy.split(":", 1)[1]))
        else:
            raise InputError(
                f"unknown strategy {strategy!r} "
                "(expected pareto, average, single:<dim> or weighted:<weights.json>)"
            )
        payload = lb.order_to_json(strategy, groups)
        rendered = {"md": lb.order_markdown(groups), "csv": lb.order_csv(groups)}
    if args.format == "json":
        _emit_json(payload, args.out)
    else:
        _emit(rendered[args.format], args.out)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    scores = _load_table(args.scores, args.score_directions)
    ratings = _load_table(args.ratings, args.rating_directions)
    matrix = correlation_matrix(scores, ratings, method=args.method)
    _emit(correlation_matrix_csv(matrix), args.out)
    return 0


def cmd_drift(args: argparse.Namespace) -> int:
    scores = _load_table(args.scores, args.score_directions)
    ratings = _load_table(args.ratings, args.rating_directions)
    submissions = load_submissions(args.submissions)
    windows = drift_analysis(
        scores,
        ratings,
        submissions,
        target_metric=args.target_metric,
        window_months=args.window_months,
        step_months=args.step_months,
        min_systems=args.min_systems,
    )
    _emit(drift_series_csv(windows), args.out)
    return 0


def _load_matrix_csv(path: str) -> tuple[list[list[float]], list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2 or rows[0][0] != "system_id":
        raise InputError(f"{path}: expected a CSV with a 'system_id,<var>,...' header")
    variables = rows[0][1:]
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(rows[0]):
            raise InputError(f"{path}:{lineno}: expected {len(rows[0])} cells")
        try:
            data.append([float(c) for c in row[1:]])
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric cell") from None
    return data, variables


def cmd_factor(args: argparse.Namespace) -> int:
    data, variables = _load_matrix_csv(args.table)
    if args.k is not None:
        k = args.k
    elif args.selector == "kaiser":
        k = kaiser_count(data, variables)
    else:
        k = parallel_analysis(data, replicates=args.replicates, seed=args.seed, variables=variables)
    if k < 1:
        raise InputError(f"selector {args.selector!r} chose {k} factors; override with --k")
    model = extract_and_rotate(data, k, variables)
    if args.format == "md":
        _emit(factor_model_markdown(model, suppress_below=args.suppress), args.out)
    else:
        _emit_json({"selector": args.selector, **factor_model_to_json(model)}, args.out)
    return 0


def _load_question_ratings(path: str) -> dict[str, dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or rows[0][:3] != ["system_id", "instance_id", "rating"]:
        raise InputError(f"{path}: header must be 'system_id,instance_id,rating'")
    out: dict[str, dict[str, float]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) < 3:
            raise InputError(f"{path}:{lineno}: expected 3 cells")
        system, inst_id, raw = row[0], row[1], row[2]
        try:
            value = float(raw)
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric rating {raw!r}") from None
        if inst_id in out.setdefault(system, {}):
            raise InputError(f"{path}:{lineno}: duplicate rating for ({system!r}, {inst_id!r})")
        out[system][inst_id] = value
    return out


def cmd_poolsim(args: argparse.Namespace) -> int:
    corpus = load_gold(args.gold)
    predictions = {}
    for spec in args.pred:
        if "=" not in spec:
            raise InputError(f"--pred expects NAME=PATH, got {spec!r}")
        name, path = spec.split("=", 1)
        predictions[name] = load_predictions(path, corpus, system_id=name)
    ratings = _load_question_ratings(args.question_ratings)
    try:
        pool_sizes = [int(s) for s in args.pool_sizes.split(",")]
    except ValueError:
        raise InputError(f"--pool-sizes expects comma-separated integers, got {args.pool_sizes!r}") from None
    points = question_pool_simulation(
        corpus,
        predictions,
        ratings,
        pool_sizes=pool_sizes,
        repeats=args.repeats,
        seed=args.seed,
        target_metric=args.metric,
    )
    _emit(pool_sim_csv(points), args.out)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    payload = _read_json_file(args.input)
    if not isinstance(payload, dict):
        raise InputError(f"{args.input}: expected a JSON object")
    if "fronts" in payload:
        ranking = lb.ParetoRanking(
            fronts=tuple(tuple(front) for front in payload["fronts"]),
            rank={s: i + 1 for i, front in enumerate(payload["fronts"]) for s in front},
        )
        _emit(lb.pareto_markdown(ranking), args.out)
    elif "order" in payload:
        groups = [
            lb.RankGroup(rank=g["rank"], systems=tuple(g["systems"]), score=g.get("score"))
            for g in payload["order"]
        ]
        _emit(lb.order_markdown(groups), args.out)
    elif "metrics" in payload:
        lines = ["| metric | value |", "|---|---|"]
        for name in sorted(payload["metrics"]):
            lines.append(f"| {name} | {payload['metrics'][name]:.4f} |")
        _emit("\n".join(lines) + "\n", args.out)
    elif "loadings" in payload:
        lines = ["| variable | factor |", "|---|---|"]
        for name in payload["variables"]:
            lines.append(f"| {name} | F{payload['assignments'][name]} |")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        raise InputError(f"{args.input}: unrecognized report payload")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareval",
        description="Evaluation engine and multi-criteria leaderboards for explainable QA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score one system's predictions against a gold file")
    p.add_argument("--gold", required=True, help="gold JSON file")
    p.add_argument("--pred", required=True, help="prediction JSON file")
    p.add_argument("--system-id", default=None, help="system id (default: prediction file stem)")
    p.add_argument("--strict", action="store_true", help="error on missing predictions")
    p.add_argument("--per-instance", default=None, metavar="CSV", help="also write per-instance scores")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="derive a synthetic reference system from gold annotations")
    p.add_argument("--gold", required=True)
    p.add_argument("--variant", required=True, choices=[v.value for v in SyntheticVariant])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="prediction JSON output path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rank", help="rank systems from a score/rating table")
    p.add_argument("--table", required=True, help="system table CSV")
    p.add_argument("--directions", required=True, help="direction spec JSON")
    p.add_argument("--strategy", required=True,
                   help="pareto | average | single:<dim> | weighted:<weights.json>")
    p.add_argument("--dims", default=None, help="comma-separated dimension subset")
    p.add_argument("--tiebreakers", default=None, help="comma-separated tiebreaker dimensions")
    p.add_argument("--drop-incomplete", action="store_true",
                   help="drop systems with missing values instead of failing")
    p.add_argument("--format", choices=["json", "md", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("correlate", help="correlate score columns against rating columns")
    p.add_argument("--scores", required=True)
    p.add_argument("--score-directions", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--rating-directions", required=True)
    p.add_argument("--method", choices=["kendall", "spearman"], default="kendall")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("drift", help="sliding-window correlation over submission time")
    p.add_argument("--scores", required=True)
    p.add_argument("--score-directions", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--rating-directions", required=True)
    p.add_argument("--submissions", required=True)
    p.add_argument("--target-metric", required=True)
    p.add_argument("--window-months", type=int, default=12)
    p.add_argument("--step-months", type=int, default=1)
    p.add_argument("--min-systems", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("factor", help="factor-count selection and varimax-rotated loadings")
    p.add_argument("--table", required=True, help="systems x variables CSV")
    p.add_argument("--selector", choices=["kaiser", "parallel"], default="parallel")
    p.add_argument("--k", type=int, default=None, help="override the selected factor count")
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--suppress", type=float, default=0.3,
                   help="blank |loadings| below this in markdown output")
    p.add_argument("--format", choices=["json", "md"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("poolsim", help="question-pool-size stability simulation")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", action="append", required=True, metavar="NAME=PATH",
                   help="per-system prediction file (repeatable)")
    p.add_argument("--question-ratings", required=True,
                   help="CSV with header system_id,instance_id,rating")
    p.add_argument("--metric", default="joint_f1")
    p.add_argument("--pool-sizes", required=True, help="comma-separated pool sizes")
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_poolsim)

    p = sub.add_parser("report", help="render a saved JSON report as markdown")
    p.add_argument("--input", required=True, help="ranking/scores/factor JSON file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    logger = logging.getLogger("pareval")
    logger.setLevel(logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("warning: %(message)s"))
    logger.addHandler(handler)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed"):
            if args.seed is None:
                args.seed = _default_seed()
            if args.seed < 0:
                raise InputError(f"seed must be non-negative, got {args.seed}")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    finally:
        logger.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
