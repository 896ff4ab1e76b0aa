"""roomforge command-line entry point.

Subcommands: filter, bucket plan|schedule, caption compose|chunk,
curate, merge, metrics, gate, gsb serve. Machine-readable output via
--json on stdout; human logs go to stderr (verbosity from the
ROOMFORGE_LOG environment variable). Exit codes are stable: 0 success,
1 validation error, 2 input error, 3 internal error. Every source of
randomness takes an explicit --seed, echoed in outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import bucketing, curation
from .captioning import (
    CaptionParts,
    VocabularyError,
    chunk_caption,
    compose_caption,
    load_vocabulary_files,
)
from .evalproto.eventlog import EventLog, EventLogError
from .evalproto.gate import GateError, dual_gate
from .evalproto.session import SessionError
from .evalproto.store import SessionStore
from .filtering import (
    DropReport,
    MissingLabelError,
    RuleError,
    default_schema,
    evaluate_image,
    load_rules,
    load_schema,
)
from .fusion.archive import ArchiveError, read_archive_file, write_archive_file
from .fusion.merge import MergeError, MergeInput, MergeRecipe, merge
from .manifest import ManifestError, iter_manifest, read_jsonl, read_manifest, write_manifest
from .metrics.features import FeatureFileError, read_features
from .metrics.rates import DetectionRecord, MetricInputError, PromptExpectation
from .metrics.report import MetricInputs, MetricReport, load_metric_vocabulary, metric_report

logger = logging.getLogger("roomforge")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # raise instead of sys.exit(2)
        raise UsageError(message)


@dataclass
class CommandOutcome:
    exit_code: int
    payload: dict[str, Any]


def _build_parser() -> _Parser:
    parser = _Parser(prog="roomforge", description="Diffusion data and evaluation toolkit")
    parser.add_argument("--json", action="store_true", help="emit a JSON payload on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="screen a manifest with discrimination rules")
    p.add_argument("--rules", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--schema", default=None, help="label schema (default: built-in)")
    p.add_argument("--workers", type=int, default=0, help="parallel rule evaluation (0 = auto)")

    bucket = sub.add_parser("bucket", help="aspect-ratio bucket planning and scheduling")
    bsub = bucket.add_subparsers(dest="bucket_command", required=True)
    p = bsub.add_parser("plan", help="enumerate the feasible bucket set")
    p.add_argument("--quantum", type=int, default=64)
    p.add_argument("--min-side", type=int, required=True)
    p.add_argument("--max-side", type=int, required=True)
    p.add_argument("--max-pixels", type=int, required=True)
    p.add_argument("--out", required=True)
    p = bsub.add_parser("schedule", help="deterministic bucket-balanced epoch schedule")
    p.add_argument("--plan", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--batch", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--uniform", action="store_true", help="uniform bucket choice instead of remaining-count weighting")

    caption = sub.add_parser("caption", help="caption composition and chunk planning")
    csub = caption.add_subparsers(dest="caption_command", required=True)
    p = csub.add_parser("compose", help="assemble captions from template fields")
    p.add_argument("--vocab", default=None, help=argparse.SUPPRESS)   # accepted for interface parity
    p.add_argument("--merges", default=None, help=argparse.SUPPRESS)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p = csub.add_parser("chunk", help="plan 77-token chunked encodings")
    p.add_argument("--vocab", required=True)
    p.add_argument("--merges", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hard-split", action="store_true", help="always cut at the full window")

    p = sub.add_parser("curate", help="assemble nested data tiers")
    p.add_argument("--manifest", required=True)
    p.add_argument("--rules", required=True, help="stricter rule profile for the curated tier")
    p.add_argument("--ballots", required=True)
    p.add_argument("--fraction", type=float, default=0.10)
    p.add_argument("--premium-cap", type=int, default=5000)
    p.add_argument("--curated-cap", type=int, default=100_000)
    p.add_argument("--schema", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("merge", help="weighted checkpoint merge")
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="PATH:WEIGHT", help="input archive and weight (repeatable)")
    p.add_argument("--policy", choices=("strict", "intersect"), default="strict")
    p.add_argument("--signed", action="store_true", help="allow negative weights")
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="compute the seven-metric report")
    p.add_argument("--features-a", required=True, help="reference feature set (.rfmx)")
    p.add_argument("--features-b", required=True, help="generated feature set (.rfmx)")
    p.add_argument("--detections", required=True)
    p.add_argument("--expected", required=True)
    p.add_argument("--vocab", default=None, help="metric vocabulary JSON (default: built-in)")
    p.add_argument("--aesthetic", required=True, help="per-image scores JSONL")
    p.add_argument("--image-emb", required=True, help="image embeddings (.rfmx)")
    p.add_argument("--text-emb", required=True, help="text embeddings (.rfmx)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("gate", help="dual-gate two metric reports")
    p.add_argument("--baseline", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--threshold", type=float, default=0.70)
    p.add_argument("--gate-geq", "--geq", dest="geq", action="store_true",
                   help="pass on >= threshold instead of strict >")

    gsb = sub.add_parser("gsb", help="GSB human-evaluation service")
    gsub = gsb.add_subparsers(dest="gsb_command", required=True)
    p = gsub.add_parser("serve", help="run the judging service")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--images", default=None, help="directory of images served at /images")
    p.add_argument("--ui", default=None, help="directory of UI assets served at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8017)

    return parser


# --- command handlers ---------------------------------------------------


def _cmd_filter(args) -> dict[str, Any]:
    schema = load_schema(args.schema) if args.schema else default_schema()
    rules = load_rules(args.rules, schema)
    report = DropReport()
    with open(args.input, "r", encoding="utf-8") as fh:
        numbered = list(iter_manifest(fh))
    records = []
    for line_number, item in numbered:
        if isinstance(item, ManifestError):
            report.malformed += 1
            report.malformed_lines.append(line_number)
            logger.warning("skipping malformed line %d: %s", line_number, item)
        else:
            records.append(item)

    workers = args.workers or (os.cpu_count() or 1)
    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda r: evaluate_image(r.labels, rules), records))
    else:
        verdicts = [evaluate_image(r.labels, rules) for r in records]

    kept = []
    for rec, verdict in zip(records, verdicts):
        if verdict.decision == "keep":
            report.kept += 1
            kept.append(rec)
        else:
            report.dropped += 1
            reason = verdict.deciding_reason or "unspecified"
            report.reasons[reason] = report.reasons.get(reason, 0) + 1

    with open(args.out, "w", encoding="utf-8") as fh:
        write_manifest(kept, fh)
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("kept %d, dropped %d, malformed %d", report.kept, report.dropped, report.malformed)
    return report.to_dict()


def _cmd_bucket_plan(args) -> dict[str, Any]:
    plan = bucketing.generate_buckets(args.quantum, args.min_side, args.max_side, args.max_pixels)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(plan.to_dict(), fh, indent=2)
        fh.write("\n")
    logger.info("%d buckets written to %s", len(plan.buckets), args.out)
    return {"buckets": len(plan.buckets), "out": args.out}


def _cmd_bucket_schedule(args) -> dict[str, Any]:
    with open(args.plan, "r", encoding="utf-8") as fh:
        plan = bucketing.BucketPlan.from_dict(json.load(fh))
    records = read_manifest(args.manifest)
    if not records:
        raise UsageError("manifest contains no records to schedule")
    assignments = [
        bucketing.assign_bucket(rec.width, rec.height, plan, image_id=rec.id) for rec in records
    ]
    schedule = bucketing.plan_epoch(
        assignments, plan, batch_size=args.batch, seed=args.seed, uniform_buckets=args.uniform
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in schedule.iter_lines(plan):
            fh.write(line + "\n")
    logger.info("%d iterations over %d images", len(schedule.iterations), len(assignments))
    return {
        "iterations": len(schedule.iterations),
        "images": len(assignments),
        "seed": args.seed,
        "batch_size": args.batch,
    }


def _cmd_caption_compose(args) -> dict[str, Any]:
    records = read_manifest(args.input)
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in records:
            caption = compose_caption(CaptionParts.from_record_caption(rec.caption))
            fh.write(json.dumps({"image_id": rec.id, "caption": caption}, sort_keys=True) + "\n")
            count += 1
    return {"captions": count, "out": args.out}


def _cmd_caption_chunk(args) -> dict[str, Any]:
    vocab = load_vocabulary_files(args.vocab, args.merges)
    records = read_manifest(args.input)
    count = 0
    chunks_total = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in records:
            caption = compose_caption(CaptionParts.from_record_caption(rec.caption))
            plan = chunk_caption(vocab, caption, hard_split=args.hard_split)
            row = {"image_id": rec.id, "caption": caption}
            row.update(plan.to_dict())
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            count += 1
            chunks_total += len(plan.chunks)
    return {"captions": count, "chunks": chunks_total, "out": args.out}


def _cmd_curate(args) -> dict[str, Any]:
    schema = load_schema(args.schema) if args.schema else default_schema()
    strict_rules = load_rules(args.rules, schema)
    records = read_manifest(args.manifest)
    ballots = [
        curation.RatingBallot(image_id=row["image_id"], rater_id=row["rater_id"], level=row["level"])
        for row in read_jsonl(args.ballots)
    ]
    rated = curation.aggregate_ratings(ballots)
    config = curation.CurationConfig(
        curated_cap=args.curated_cap,
        premium_cap=args.premium_cap,
        premium_fraction=args.fraction,
    )
    layered = curation.build_layers(records, strict_rules, rated, config)
    with open(args.out, "w", encoding="utf-8") as fh:
        for row in layered.tier_rows():
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    result = {
        "screen": len(layered.screen),
        "curated": len(layered.curated),
        "premium": len(layered.premium),
        "out": args.out,
    }
    logger.info("tiers: %(screen)d screen, %(curated)d curated, %(premium)d premium", result)
    return result


def _parse_merge_input(spec: str) -> tuple[str, float]:
    path, sep, weight = spec.rpartition(":")
    if not sep or not path:
        raise UsageError(f"--in expects PATH:WEIGHT, got {spec!r}")
    try:
        return path, float(weight)
    except ValueError:
        raise UsageError(f"invalid weight {weight!r} in {spec!r}") from None


def _cmd_merge(args) -> dict[str, Any]:
    inputs = []
    for spec in args.inputs:
        path, weight = _parse_merge_input(spec)
        archive = read_archive_file(path)
        inputs.append(MergeInput(archive=archive, weight=weight, label=os.path.basename(path)))
    recipe = MergeRecipe(inputs=inputs, policy=args.policy, signed=args.signed)
    merged = merge(recipe)
    write_archive_file(merged, args.out)
    return {
        "tensors": len(merged.entries),
        "inputs": [{"label": i.label, "weight": i.weight} for i in inputs],
        "policy": args.policy,
        "out": args.out,
    }


def _cmd_metrics(args) -> dict[str, Any]:
    vocabulary = load_metric_vocabulary(args.vocab) if args.vocab else None
    if vocabulary is None:
        from .metrics.report import default_metric_vocabulary

        vocabulary = default_metric_vocabulary()
    detections = [DetectionRecord.from_dict(row) for row in read_jsonl(args.detections)]
    expectations = [PromptExpectation.from_dict(row) for row in read_jsonl(args.expected)]
    scores = [row["score"] for row in read_jsonl(args.aesthetic)]
    inputs = MetricInputs(
        features_real=read_features(args.features_a),
        features_generated=read_features(args.features_b),
        image_embeddings=read_features(args.image_emb).data,
        text_embeddings=read_features(args.text_emb).data,
        aesthetic_scores=scores,
        expectations=expectations,
        detections=detections,
        vocabulary=vocabulary,
    )
    report = metric_report(inputs)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    return report.to_dict()


def _cmd_gate(args) -> dict[str, Any]:
    with open(args.baseline, "r", encoding="utf-8") as fh:
        baseline = MetricReport.from_json(fh.read())
    with open(args.candidate, "r", encoding="utf-8") as fh:
        candidate = MetricReport.from_json(fh.read())
    decision = dual_gate(baseline, candidate, threshold=args.threshold, inclusive=args.geq)
    logger.info(
        "gate %s: %d/%d improved",
        "PASS" if decision.passed else "FAIL",
        decision.improved,
        decision.total,
    )
    return decision.to_dict()


def _cmd_gsb_serve(args) -> dict[str, Any]:
    import uvicorn

    from .evalproto.service import create_app

    store = SessionStore(EventLog(args.log))
    app = create_app(store, images_dir=args.images, ui_dir=args.ui)
    logger.info("serving on %s:%d (log: %s)", args.host, args.port, args.log)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return {"served": True}


_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    ManifestError,
    RuleError,
    ArchiveError,
    VocabularyError,
    FeatureFileError,
    EventLogError,
    MetricInputError,
    json.JSONDecodeError,
    KeyError,
)

_VALIDATION_ERRORS = (
    UsageError,
    MergeError,
    GateError,
    SessionError,
    curation.CurationError,
    bucketing.BucketError,
    MissingLabelError,
)


def run(argv: list[str]) -> CommandOutcome:
    """Dispatch a command line; never raises, never exits."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return CommandOutcome(EXIT_VALIDATION, {"error": str(exc)})

    handlers = {
        "filter": _cmd_filter,
        "curate": _cmd_curate,
        "merge": _cmd_merge,
        "metrics": _cmd_metrics,
        "gate": _cmd_gate,
    }
    try:
        if args.command == "bucket":
            payload = _cmd_bucket_plan(args) if args.bucket_command == "plan" else _cmd_bucket_schedule(args)
        elif args.command == "caption":
            payload = _cmd_caption_compose(args) if args.caption_command == "compose" else _cmd_caption_chunk(args)
        elif args.command == "gsb":
            payload = _cmd_gsb_serve(args)
        else:
            payload = handlers[args.command](args)
        return CommandOutcome(EXIT_OK, payload)
    except _VALIDATION_ERRORS as exc:
        # MissingLabelError subclasses RuleError; check validation first
        print(f"error: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_VALIDATION, {"error": str(exc)})
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_INPUT, {"error": str(exc)})
    except Exception as exc:   # pragma: no cover - defensive
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_INTERNAL, {"error": str(exc)})


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.environ.get("ROOMFORGE_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    argv = sys.argv[1:] if argv is None else argv
    json_mode = "--json" in argv
    outcome = run(argv)
    if outcome.exit_code == EXIT_OK or json_mode:
        if json_mode:
            print(json.dumps(outcome.payload, indent=2, sort_keys=True))
        elif outcome.payload:
            for key, value in outcome.payload.items():
                if not isinstance(value, (dict, list)):
                    print(f"{key}: {value}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
