"""Self-contained JSON certificate documents and their re-verification.

A document carries everything needed to recheck it against the catalog:
the run configuration, the stem (run-length encoded, so multi-million
entry stems stay small), every checked inequality, and the verdict or
exhaustion outcome.  Floats are serialized with Python's shortest
round-tripping decimal form, so reloading reproduces them bit for bit
and byte-identical payloads mean identical runs.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .ideals import (
    BoundednessVerdict,
    IdealSpec,
    TalagrandSequence,
    exceedance_report,
)
from .series import catalog_series, partial_sums
from .stems import (
    IndexerStem,
    IndexRun,
    RearrStem,
    SelectionStem,
    SubseqStem,
    compress_values,
)
from .witnesses import (
    Checkpoint,
    WitnessCertificate,
    verify_certificate,
)

SCHEMA_VERSION = "1"


class SchemaMismatch(ValueError):
    """Document schema version is not the one this build understands."""


# ---------------------------------------------------------------------------
# stem serialization


def _bits_to_rle(bits: tuple[int, ...]) -> list[list[int]]:
    out: list[list[int]] = []
    for b in bits:
        if out and out[-1][0] == b:
            out[-1][1] += 1
        else:
            out.append([b, 1])
    return out


def _bits_from_rle(rle: list[list[int]]) -> tuple[int, ...]:
    bits: list[int] = []
    for b, count in rle:
        bits.extend([int(b)] * int(count))
    return tuple(bits)


def stem_to_json(stem: IndexerStem) -> dict[str, Any]:
    if isinstance(stem, SelectionStem):
        return {"kind": "selection", "rle": _bits_to_rle(stem.bits)}
    kind = "subseq" if isinstance(stem, SubseqStem) else "rearr"
    return {
        "kind": kind,
        "segments": [[r.start, r.step, r.count] for r in stem.runs],
    }


def stem_from_json(data: dict[str, Any]) -> IndexerStem:
    kind = data["kind"]
    if kind == "selection":
        return SelectionStem(_bits_from_rle(data["rle"]))
    runs = tuple(
        IndexRun(int(start), int(step), int(count))
        for start, step, count in data["segments"]
    )
    if kind == "subseq":
        return SubseqStem(runs)
    if kind == "rearr":
        return RearrStem(runs)
    raise ValueError(f"unknown stem kind {kind!r}")


def talagrand_to_json(seq: TalagrandSequence | None) -> dict[str, Any] | None:
    if seq is None:
        return None
    body: dict[str, Any] = {"label": seq.label}
    if seq.label == "explicit":
        body["values"] = list(seq.values)
    return body


def talagrand_from_json(data: dict[str, Any] | None) -> TalagrandSequence | None:
    if data is None:
        return None
    return TalagrandSequence(data["label"], tuple(data.get("values", ())))


# ---------------------------------------------------------------------------
# witness certificates


def checkpoint_to_json(cp: Checkpoint) -> dict[str, Any]:
    return {
        "position": cp.position,
        "value": cp.value,
        "bound": cp.bound,
        "relation": cp.relation,
        "kind": cp.kind,
    }


def checkpoint_from_json(data: dict[str, Any]) -> Checkpoint:
    return Checkpoint(
        position=int(data["position"]),
        value=float(data["value"]),
        bound=float(data["bound"]),
        relation=str(data["relation"]),
        kind=str(data.get("kind", "partial-sum")),
    )


def certificate_to_json(cert: WitnessCertificate) -> dict[str, Any]:
    return {
        "construction": cert.construction,
        "series": cert.series_name,
        "stem": stem_to_json(cert.stem),
        "base": stem_to_json(cert.base) if cert.base is not None else None,
        "checkpoints": [checkpoint_to_json(c) for c in cert.checkpoints],
        "interval_index": cert.interval_index,
        "interval": list(cert.interval) if cert.interval else None,
        "talagrand": talagrand_to_json(cert.talagrand),
        "stage_boundaries": list(cert.stage_boundaries),
        "details": {k: v for k, v in cert.details},
    }


def certificate_from_json(data: dict[str, Any]) -> WitnessCertificate:
    interval = data.get("interval")
    return WitnessCertificate(
        construction=str(data["construction"]),
        series_name=str(data["series"]),
        stem=stem_from_json(data["stem"]),
        checkpoints=tuple(checkpoint_from_json(c) for c in data["checkpoints"]),
        base=stem_from_json(data["base"]) if data.get("base") else None,
        interval_index=data.get("interval_index"),
        interval=tuple(interval) if interval else None,
        talagrand=talagrand_from_json(data.get("talagrand")),
        stage_boundaries=tuple(data.get("stage_boundaries", ())),
        details=tuple(sorted(data.get("details", {}).items())),
    )


# ---------------------------------------------------------------------------
# documents


def _document(kind: str, config: dict[str, Any], result: dict[str, Any],
              seconds: float) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "config": config,
        "result": result,
        "timing": {"seconds": seconds},
    }


def document_for_certificate(
    cert: WitnessCertificate, config: dict[str, Any], seconds: float = 0.0
) -> dict[str, Any]:
    return _document("witness", config, certificate_to_json(cert), seconds)


def document_for_exhaustion(
    exc: Exception, config: dict[str, Any], seconds: float = 0.0
) -> dict[str, Any]:
    result = {
        "construction": getattr(exc, "construction", config.get("construction")),
        "series": config.get("series"),
        "reason": getattr(exc, "reason", str(exc)),
        "horizon": getattr(exc, "horizon", None),
        "best": getattr(exc, "best", None),
    }
    return _document("exhaustion", config, result, seconds)


def document_for_verdict(
    verdict: BoundednessVerdict,
    indexer: IndexerStem,
    ideal: IdealSpec,
    threshold: int,
    config: dict[str, Any],
    seconds: float = 0.0,
) -> dict[str, Any]:
    exceed_sorted = np.array(sorted(verdict.report.exceed_set), dtype=np.int64)
    result = {
        "series": config.get("series"),
        "indexer": stem_to_json(indexer),
        "ideal": ideal.kind,
        "talagrand": talagrand_to_json(verdict.report.talagrand),
        "bound": verdict.bound,
        "horizon": verdict.horizon,
        "threshold": threshold,
        "status": verdict.status,
        "interval_count": verdict.interval_count,
        "contained_intervals": list(verdict.report.contained_intervals),
        "exceed_runs": [
            [r.start, r.step, r.count] for r in compress_values(exceed_sorted)
        ]
        if exceed_sorted.size
        else [],
    }
    return _document("verdict", config, result, seconds)


def dumps_document(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def payload_without_timing(doc: dict[str, Any]) -> str:
    trimmed = {k: v for k, v in doc.items() if k != "timing"}
    return json.dumps(trimmed, sort_keys=True, indent=2) + "\n"


def write_document(doc: dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_document(doc))


def load_document(path: str) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


# ---------------------------------------------------------------------------
# verification


def _check_schema(doc: dict[str, Any]) -> None:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"document schema version {version!r}, expected {SCHEMA_VERSION!r}"
        )


def _verify_verdict(doc: dict[str, Any]) -> list[str]:
    result = doc["result"]
    series = catalog_series(result["series"])
    indexer = stem_from_json(result["indexer"])
    seq = talagrand_from_json(result["talagrand"])
    horizon = int(result["horizon"])
    trace = partial_sums(series, indexer, horizon)
    report = exceedance_report(trace, float(result["bound"]), seq)
    issues: list[str] = []
    recomputed_runs = [
        [r.start, r.step, r.count]
        for r in compress_values(np.array(sorted(report.exceed_set), dtype=np.int64))
    ] if report.exceed_set else []
    if recomputed_runs != result["exceed_runs"]:
        issues.append("exceedance set does not recompute")
    if list(report.contained_intervals) != result["contained_intervals"]:
        issues.append(
            f"contained intervals recompute to {list(report.contained_intervals)}"
        )
    threshold = int(result["threshold"])
    if not report.exceed_set:
        status = "bounded-evidence"
    elif report.interval_count >= threshold:
        status = "i-unbounded-evidence"
    else:
        status = "undecided"
    if status != result["status"]:
        issues.append(f"verdict status recomputes to {status!r}")
    if report.interval_count != result["interval_count"]:
        issues.append(f"interval count recomputes to {report.interval_count}")
    return issues


def verify_document(doc: dict[str, Any], rerun_exhaustion: bool = True) -> list[str]:
    """Recompute a loaded document against the catalog.

    Returns discrepancies; raises SchemaMismatch for foreign documents.
    Exhaustion documents are re-run with their recorded configuration to
    confirm the search still comes up empty.
    """
    _check_schema(doc)
    kind = doc.get("kind")
    if kind == "witness":
        cert = certificate_from_json(doc["result"])
        return verify_certificate(cert)
    if kind == "verdict":
        return _verify_verdict(doc)
    if kind == "exhaustion":
        if not rerun_exhaustion:
            return []
        from .runners import execute_config
        from .witnesses import ScanExhausted

        try:
            execute_config(dict(doc["config"]))
        except ScanExhausted as exc:
            if exc.reason != doc["result"]["reason"]:
                return [
                    f"exhaustion reason changed: {exc.reason!r} vs "
                    f"{doc['result']['reason']!r}"
                ]
            return []
        return ["recorded as exhausted, but the construction now succeeds"]
    return [f"unknown document kind {kind!r}"]


def first_failure(issues: list[str]) -> str | None:
    return issues[0] if issues else None
