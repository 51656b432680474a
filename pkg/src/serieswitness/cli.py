"""Command-line front end: run constructions, verify documents, list the catalog.

Exit codes for `run`: 0 means a certificate or verdict was produced and
self-verified, 2 means the search exhausted its horizon (an informative
outcome, for instance on a series all of whose selections share one
bound), 1 means an error.  `verify` exits 0 only if every checkpoint in
the document recomputes.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Any

from .certificates import (
    SchemaMismatch,
    document_for_certificate,
    document_for_exhaustion,
    document_for_verdict,
    dumps_document,
    load_document,
    verify_document,
    write_document,
)
from .ideals import DEFAULT_EVIDENCE_THRESHOLD
from .runners import CONSTRUCTIONS, execute_config, resolve_config
from .series import UnknownSeries, catalog_names, catalog_series
from .witnesses import (
    InconsistentGrowthWitness,
    PatternTooLarge,
    PreconditionViolation,
    ScanExhausted,
)

HORIZON_ENV = "SERIESWITNESS_HORIZON"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="serieswitness",
        description=(
            "Build re-verifiable witnesses for unbounded subseries, "
            "rearrangements, and ideal-boundedness verdicts of catalog series."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a construction and emit a certificate")
    run.add_argument("--series", required=True, help="catalog series name")
    run.add_argument(
        "--construction",
        required=True,
        choices=CONSTRUCTIONS,
        help="which witness construction or verdict to run",
    )
    run.add_argument("--m", type=int, default=None, help="escape level m")
    run.add_argument("--M", type=float, default=None, help="boundedness bound M")
    run.add_argument("--target", type=float, default=None, help="growth target")
    run.add_argument("--depth", type=int, default=None, help="construction depth")
    run.add_argument(
        "--horizon",
        type=int,
        default=None,
        help=f"scan horizon (also settable via ${HORIZON_ENV})",
    )
    run.add_argument("--ideal", choices=("fin", "density"), default=None)
    run.add_argument(
        "--talagrand",
        choices=("geometric", "linear"),
        default=None,
        help="interval sequence: geometric n_k = 2^k or linear n_k = k",
    )
    run.add_argument("--threshold", type=int, default=None,
                     help="contained-interval count treated as unboundedness evidence"
                     f" (default {DEFAULT_EVIDENCE_THRESHOLD})")
    run.add_argument("--out", default=None, help="write the JSON document here")
    run.add_argument(
        "--no-verify",
        action="store_true",
        help="skip the post-run self-verification",
    )

    verify = sub.add_parser("verify", help="recheck a certificate document")
    verify.add_argument("path", help="path to a JSON document from `run`")

    catalog = sub.add_parser("catalog", help="catalog inspection")
    catalog.add_argument("action", choices=("list",))
    return parser


def _config_from_args(args: argparse.Namespace) -> dict[str, Any]:
    config: dict[str, Any] = {
        "series": args.series,
        "construction": args.construction,
    }
    if args.horizon is not None:
        config["horizon"] = args.horizon
    else:
        env = os.environ.get(HORIZON_ENV)
        if env:
            try:
                config["horizon"] = int(env)
            except ValueError:
                raise PreconditionViolation(
                    f"${HORIZON_ENV} must be an integer, got {env!r}"
                ) from None
    for key in ("m", "M", "target", "depth", "ideal", "talagrand", "threshold"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    return config


def _emit(doc: dict[str, Any], out: str | None, summary: str) -> None:
    if out:
        write_document(doc, out)
        print(f"{summary} -> {out}")
    else:
        sys.stdout.write(dumps_document(doc))
        print(summary, file=sys.stderr)


def _run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    started = time.perf_counter()
    try:
        config = resolve_config(config)
        kind, payload = execute_config(config)
    except ScanExhausted as exc:
        seconds = time.perf_counter() - started
        doc = document_for_exhaustion(exc, resolve_safely(config), seconds)
        _emit(doc, args.out, f"exhausted: {exc}")
        return 2
    seconds = time.perf_counter() - started
    if kind == "witness":
        doc = document_for_certificate(payload, config, seconds)
        summary = (
            f"certificate: {payload.construction} on {payload.series_name}, "
            f"{len(payload.checkpoints)} checkpoint(s), stem length {len(payload.stem)}"
        )
    else:
        verdict, indexer, ideal, threshold = payload
        doc = document_for_verdict(verdict, indexer, ideal, threshold, config, seconds)
        summary = (
            f"verdict: {verdict.status} (bound {verdict.bound:g}, "
            f"{verdict.interval_count} contained interval(s), horizon {verdict.horizon})"
        )
    if not args.no_verify:
        issues = verify_document(doc, rerun_exhaustion=False)
        if issues:
            print(f"self-verification failed: {issues[0]}", file=sys.stderr)
            return 1
        summary += " [self-verified]"
    _emit(doc, args.out, summary)
    if kind == "verdict" and verdict.status == "undecided":
        return 2
    return 0


def resolve_safely(config: dict[str, Any]) -> dict[str, Any]:
    try:
        return resolve_config(config)
    except Exception:  # noqa: BLE001  - echo whatever we had
        return config


def _verify(args: argparse.Namespace) -> int:
    try:
        doc = load_document(args.path)
    except (OSError, ValueError) as exc:
        print(f"cannot load document: {exc}", file=sys.stderr)
        return 1
    try:
        issues = verify_document(doc)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 1
    if issues:
        print(f"verification failed: {issues[0]}", file=sys.stderr)
        for issue in issues[1:5]:
            print(f"  also: {issue}", file=sys.stderr)
        return 1
    print("verified: every checkpoint recomputes")
    return 0


def _catalog(args: argparse.Namespace) -> int:
    print(f"{'name':<20} {'space':<24} {'claims'}")
    for name in catalog_names():
        oracle = catalog_series(name)
        claims = []
        if oracle.liminf_norm_zero:
            claims.append("liminf ||x_n|| = 0")
        if oracle.limsup_norm_infinite:
            claims.append("limsup ||x_n|| = inf")
        print(
            f"{name:<20} {oracle.space.describe():<24} "
            f"{', '.join(claims) if claims else '-'}"
        )
        print(f"{'':<20} {oracle.description}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "verify":
            return _verify(args)
        if args.command == "catalog":
            return _catalog(args)
    except (
        PreconditionViolation,
        InconsistentGrowthWitness,
        PatternTooLarge,
        UnknownSeries,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error("unknown command")
    return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
