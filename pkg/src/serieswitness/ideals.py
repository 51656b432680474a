"""Ideals on the positive integers as finite-evidence verdict oracles.

Membership of an infinite set in the density ideal is undecidable from
finite data, so nothing here ever claims set membership.  Instead a
partial-sum trace is reduced to an exceedance report: which positions
break a bound, and how many whole intervals of a fixed interval sequence
sit inside the breakage.  Interval containment is the refutation
mechanism; enough contained intervals is evidence of ideal-unboundedness,
an empty exceedance set is evidence of plain boundedness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .series import HorizonExceedsStem, PartialSumTrace, SeriesOracle, partial_sums
from .spaces import DELTA
from .stems import IndexerStem

__all__ = [
    "GapInTrace",
    "TalagrandSequence",
    "IdealSpec",
    "ExceedanceReport",
    "BoundednessVerdict",
    "geometric_talagrand",
    "linear_talagrand",
    "explicit_talagrand",
    "fin_ideal",
    "density_ideal",
    "talagrand_ideal",
    "default_talagrand",
    "interval",
    "density_at",
    "finite_member",
    "exceedance_report",
    "i_bounded_verdict",
    "DEFAULT_EVIDENCE_THRESHOLD",
]

DEFAULT_EVIDENCE_THRESHOLD = 3

FIN = "fin"
DENSITY = "density"
TALAGRAND_GIVEN = "talagrand-given"


class GapInTrace(ValueError):
    """Exceedance needs a contiguous trace over 1..horizon."""


@dataclass(frozen=True)
class TalagrandSequence:
    """Increasing positions n_1 < n_2 < ... cutting the line into intervals
    [n_k, n_{k+1}).  label "linear" means n_k = k, "geometric" means
    n_k = 2^k, "explicit" carries its own prefix of values."""

    label: str
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.label not in ("linear", "geometric", "explicit"):
            raise ValueError(f"unknown interval sequence {self.label!r}")
        if self.label == "explicit":
            if len(self.values) < 2:
                raise ValueError("explicit sequences need at least two entries")
            if self.values[0] < 1 or any(
                b <= a for a, b in zip(self.values, self.values[1:])
            ):
                raise ValueError("interval sequences must strictly increase from >= 1")
        elif self.values:
            raise ValueError(f"{self.label} sequences carry no explicit values")

    def n(self, k: int) -> int:
        if k < 1:
            raise ValueError("interval sequences are indexed from 1")
        if self.label == "linear":
            return k
        if self.label == "geometric":
            return 2**k
        if k > len(self.values):
            raise IndexError(f"explicit sequence has only {len(self.values)} entries")
        return self.values[k - 1]

    def max_k(self) -> int | None:
        """Last usable interval index, None when unbounded."""
        return len(self.values) - 1 if self.label == "explicit" else None


def geometric_talagrand() -> TalagrandSequence:
    return TalagrandSequence("geometric")


def linear_talagrand() -> TalagrandSequence:
    return TalagrandSequence("linear")


def explicit_talagrand(values: Iterable[int]) -> TalagrandSequence:
    return TalagrandSequence("explicit", tuple(int(v) for v in values))


def interval(seq: TalagrandSequence, k: int) -> range:
    """The half-open integer interval [n_k, n_{k+1})."""
    if k < 1:
        raise ValueError("interval index must be >= 1")
    return range(seq.n(k), seq.n(k + 1))


@dataclass(frozen=True)
class IdealSpec:
    """One of: fin, the natural-density ideal, or an ideal presented only
    through an interval sequence witnessing its Baire property."""

    kind: str
    talagrand: TalagrandSequence | None = None

    def __post_init__(self) -> None:
        if self.kind not in (FIN, DENSITY, TALAGRAND_GIVEN):
            raise ValueError(f"unknown ideal kind {self.kind!r}")
        if self.kind == TALAGRAND_GIVEN and self.talagrand is None:
            raise ValueError("talagrand-given ideal needs its sequence")
        if self.kind != TALAGRAND_GIVEN and self.talagrand is not None:
            raise ValueError(f"{self.kind} ideal carries no explicit sequence")


def fin_ideal() -> IdealSpec:
    return IdealSpec(FIN)


def density_ideal() -> IdealSpec:
    return IdealSpec(DENSITY)


def talagrand_ideal(seq: TalagrandSequence) -> IdealSpec:
    return IdealSpec(TALAGRAND_GIVEN, seq)


def default_talagrand(ideal: IdealSpec) -> TalagrandSequence:
    """Interval sequence no member of the ideal can swallow cofinitely.

    fin: n_k = k, since a set containing infinitely many [k, k+1) is
    infinite.  density: n_k = 2^k, since a set containing [2^k, 2^{k+1})
    has density >= 1/2 at 2^{k+1} - 1 and so cannot have density zero.
    """
    if ideal.kind == FIN:
        return linear_talagrand()
    if ideal.kind == DENSITY:
        return geometric_talagrand()
    raise ValueError(
        "a talagrand-given ideal already carries its sequence; use ideal.talagrand"
    )


def ideal_talagrand(ideal: IdealSpec) -> TalagrandSequence:
    """The sequence used for verdicts about this ideal."""
    if ideal.kind == TALAGRAND_GIVEN:
        assert ideal.talagrand is not None
        return ideal.talagrand
    return default_talagrand(ideal)


def density_at(members: Iterable[int], n: int) -> float:
    """card(A intersect {1..n}) / n."""
    if n < 1:
        raise ValueError("density is evaluated at n >= 1")
    count = sum(1 for value in set(members) if 1 <= value <= n)
    return count / n


def finite_member(ideal: IdealSpec, members: Iterable[int]) -> bool:
    """Membership decision restricted to finite sets.

    Every ideal considered here contains all finite sets, so this is
    constantly true; it exists so the closure axioms can be exercised on
    the decidable fragment.
    """
    set(members)
    return True


@dataclass(frozen=True)
class ExceedanceReport:
    """Positions whose partial-sum norm breaks the bound, with the fully
    contained intervals of the chosen sequence listed as evidence."""

    bound: float
    horizon: int
    exceed_set: frozenset[int]
    contained_intervals: tuple[int, ...]
    talagrand: TalagrandSequence

    @property
    def interval_count(self) -> int:
        return len(self.contained_intervals)


def exceedance_report(
    trace: PartialSumTrace, bound: float, seq: TalagrandSequence
) -> ExceedanceReport:
    """Evidence extraction from a contiguous trace.

    A position exceeds when its norm is > bound + DELTA; interval k is
    listed only if every position of [n_k, n_{k+1}) lies inside both the
    exceedance set and the traced range.
    """
    if not math.isfinite(bound):
        raise ValueError("the bound must be finite; pick one above every norm")
    if not trace.is_contiguous():
        raise GapInTrace("trace must cover 1..horizon without gaps")
    horizon = trace.horizon
    mask = trace.norms > bound + DELTA
    exceed = frozenset(int(p) for p in trace.positions[mask])
    contained: list[int] = []
    k = 1
    while True:
        if seq.max_k() is not None and k > seq.max_k():
            break
        window = interval(seq, k)
        if window.start > horizon:
            break
        if window.stop - 1 <= horizon and all(
            bool(mask[l - 1]) for l in window
        ):
            contained.append(k)
        k += 1
    return ExceedanceReport(
        bound=float(bound),
        horizon=horizon,
        exceed_set=exceed,
        contained_intervals=tuple(contained),
        talagrand=seq,
    )


BOUNDED_EVIDENCE = "bounded-evidence"
I_UNBOUNDED_EVIDENCE = "i-unbounded-evidence"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class BoundednessVerdict:
    """Finite evidence about ideal boundedness, never a proof.

    bounded-evidence: no exceedance up to the horizon.
    i-unbounded-evidence: at least `threshold` whole intervals exceed,
    which is the desk-scale reading of "infinitely many intervals".
    undecided: some exceedance but too few whole intervals.
    """

    status: str
    bound: float
    horizon: int
    interval_count: int
    report: ExceedanceReport


def i_bounded_verdict(
    series: SeriesOracle,
    indexer: IndexerStem,
    ideal: IdealSpec,
    bound: float,
    horizon: int,
    threshold: int = DEFAULT_EVIDENCE_THRESHOLD,
    seq: TalagrandSequence | None = None,
) -> BoundednessVerdict:
    """Evidence-backed verdict on ideal boundedness of a coded partial-sum
    sequence, judged at the given bound and horizon."""
    if len(indexer) < horizon:
        raise HorizonExceedsStem(
            f"verdict horizon {horizon} exceeds stem length {len(indexer)}"
        )
    trace = partial_sums(series, indexer, horizon)
    sequence = seq if seq is not None else ideal_talagrand(ideal)
    report = exceedance_report(trace, bound, sequence)
    if not report.exceed_set:
        status = BOUNDED_EVIDENCE
    elif report.interval_count >= threshold:
        status = I_UNBOUNDED_EVIDENCE
    else:
        status = UNDECIDED
    return BoundednessVerdict(
        status=status,
        bound=float(bound),
        horizon=horizon,
        interval_count=report.interval_count,
        report=report,
    )
