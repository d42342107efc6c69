"""
Counter-based workload characterization.

Three axes are derived from hardware counters: regularity (front-end
stall share and prefetch activity), locality (LLC misses per load) and
CPU intensity (instructions per LLC miss). Workloads are then ranked by
expected benefit from hybrid memory, irregular first, then poor locality,
then low intensity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .cost import CostParams, PhaseCost, WorkloadPhaseProfile

COUNTER_FIELDS = ("cycles", "instructions", "loads", "llc_misses",
                  "frontend_stall_cycles", "prefetch_events")
COUNTER_HEADER = ("label",) + COUNTER_FIELDS


class UndefinedMetric(ValueError):
    """A ratio whose denominator is zero (e.g. locality with no loads)."""


class CounterFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CounterSample:
    cycles: float
    instructions: float
    loads: float
    llc_misses: float
    frontend_stall_cycles: float
    prefetch_events: float

    def __post_init__(self):
        for f in COUNTER_FIELDS:
            v = getattr(self, f)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{f} must be a finite non-negative count, got {v}")
        if self.frontend_stall_cycles > self.cycles:
            raise ValueError(
                f"frontend_stall_cycles ({self.frontend_stall_cycles}) exceed cycles "
                f"({self.cycles})")
        if self.llc_misses > self.loads:
            raise ValueError(
                f"llc_misses ({self.llc_misses}) exceed loads ({self.loads})")

    def scaled(self, k: float) -> "CounterSample":
        return CounterSample(**{f: getattr(self, f) * k for f in COUNTER_FIELDS})


class Regularity(str, Enum):
    IRREGULAR = "Irregular"
    REGULAR = "Regular"


class Locality(str, Enum):
    POOR = "Poor"
    FAIR = "Fair"
    GOOD = "Good"


class Intensity(str, Enum):
    LOW = "Low"
    MED = "Med"
    HIGH = "High"


_REG_ORDER = {Regularity.IRREGULAR: 0, Regularity.REGULAR: 1}
_LOC_ORDER = {Locality.POOR: 0, Locality.FAIR: 1, Locality.GOOD: 2}
_INT_ORDER = {Intensity.LOW: 0, Intensity.MED: 1, Intensity.HIGH: 2}


@dataclass(frozen=True)
class Classification:
    regularity: Regularity
    locality: Locality
    cpu_intensity: Intensity
    benefit_rank: int | None = None
    label: str = ""

    @property
    def labels(self) -> tuple[str, str, str]:
        return (self.regularity.value, self.locality.value, self.cpu_intensity.value)

    def sort_key(self) -> tuple[int, int, int]:
        return (_REG_ORDER[self.regularity], _LOC_ORDER[self.locality],
                _INT_ORDER[self.cpu_intensity])


@dataclass(frozen=True)
class Thresholds:
    stall: float = 0.4
    locality_fair: float = 0.02   # misses/load at or above: Fair
    locality_poor: float = 0.15   # at or above: Poor
    intensity_med: float = 50.0   # instr/miss at or above: Med
    intensity_high: float = 500.0  # at or above: High
    prefetch_guard: float = 0.01  # misses/load needed before prefetch counts
    prefetch_per_miss: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.stall <= 1.0:
            raise ValueError("stall threshold must be in (0, 1]")
        if not 0.0 < self.locality_fair < self.locality_poor:
            raise ValueError("locality cut-points must satisfy 0 < fair < poor")
        if not 0.0 < self.intensity_med < self.intensity_high:
            raise ValueError("intensity cut-points must satisfy 0 < med < high")
        if self.prefetch_guard < 0 or self.prefetch_per_miss < 0:
            raise ValueError("prefetch thresholds must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


def locality_score(s: CounterSample) -> float:
    if s.loads == 0:
        raise UndefinedMetric("locality is undefined for a sample with no loads")
    return s.llc_misses / s.loads


def cpu_intensity_score(s: CounterSample) -> float:
    """Instructions per LLC miss; +inf when nothing missed."""
    if s.llc_misses == 0:
        return math.inf
    return s.instructions / s.llc_misses


@dataclass(frozen=True)
class IrregularitySignal:
    stall_fraction: float
    prefetch_per_miss: float
    prefetch_meaningful: bool


def irregularity_signal(s: CounterSample,
                        thresholds: Thresholds | None = None) -> IrregularitySignal:
    if s.cycles <= 0:
        raise UndefinedMetric("stall fraction is undefined with zero cycles")
    t = thresholds or Thresholds()
    # Too few misses give the prefetcher nothing to train on.
    meaningful = s.loads > 0 and locality_score(s) >= t.prefetch_guard
    return IrregularitySignal(
        stall_fraction=s.frontend_stall_cycles / s.cycles,
        prefetch_per_miss=s.prefetch_events / max(s.llc_misses, 1),
        prefetch_meaningful=meaningful,
    )


def classify(s: CounterSample, thresholds: Thresholds | None = None,
             label: str = "") -> Classification:
    t = thresholds or Thresholds()
    sig = irregularity_signal(s, t)
    irregular = sig.stall_fraction >= t.stall and (
        not sig.prefetch_meaningful or sig.prefetch_per_miss <= t.prefetch_per_miss)

    loc = locality_score(s)
    if loc >= t.locality_poor:
        locality = Locality.POOR
    elif loc >= t.locality_fair:
        locality = Locality.FAIR
    else:
        locality = Locality.GOOD

    ipm = cpu_intensity_score(s)
    if ipm >= t.intensity_high:
        intensity = Intensity.HIGH
    elif ipm >= t.intensity_med:
        intensity = Intensity.MED
    else:
        intensity = Intensity.LOW

    return Classification(
        Regularity.IRREGULAR if irregular else Regularity.REGULAR,
        locality, intensity, label=label)


def rank_benefit(classifications: Sequence[Classification]) -> list[Classification]:
    """Most-to-least expected benefit; ties keep input order."""
    if not classifications:
        raise ValueError("nothing to rank")
    ordered = sorted(classifications, key=Classification.sort_key)
    return [replace(c, benefit_rank=i) for i, c in enumerate(ordered, start=1)]


def ingest_counters(path: str | Path) -> list[tuple[str, CounterSample]]:
    """Read a counter CSV (header ``label,cycles,...,prefetch_events``)."""
    with open(path, newline="") as fh:
        return parse_counter_rows(fh)


def parse_counter_rows(lines: Iterable[str]) -> list[tuple[str, CounterSample]]:
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None:
        raise CounterFormatError("line 1: empty counter file")
    header = [h.strip() for h in header]
    missing = [c for c in COUNTER_HEADER if c not in header]
    if missing:
        raise CounterFormatError(f"line 1: missing column(s) {', '.join(missing)}")
    idx = {c: header.index(c) for c in COUNTER_HEADER}

    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CounterFormatError(
                f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        values = {}
        for f in COUNTER_FIELDS:
            raw = row[idx[f]].strip()
            try:
                values[f] = int(raw)
            except ValueError:
                raise CounterFormatError(
                    f"line {lineno}: {f} must be an integer, got {raw!r}") from None
            if values[f] < 0:
                raise CounterFormatError(f"line {lineno}: {f} is negative")
        try:
            sample = CounterSample(**values)
        except ValueError as e:
            raise CounterFormatError(f"line {lineno}: {e}") from None
        out.append((row[idx["label"]].strip(), sample))
    return out


def write_counters(path: str | Path, rows: Iterable[tuple[str, CounterSample]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COUNTER_HEADER)
        for label, s in rows:
            w.writerow([label] + [int(round(getattr(s, f))) for f in COUNTER_FIELDS])


def synthesize_counters(profile: WorkloadPhaseProfile, cost: PhaseCost,
                        params: CostParams | None = None) -> CounterSample:
    """Counters consistent with the cost model.

    Cycles are the modeled time in core cycles; front-end stalls are the
    transfers the prefetcher did not cover; every prefetchable miss
    counts as one prefetch event.
    """
    params = params or CostParams()
    c = params.fast_latency_cycles
    return CounterSample(
        cycles=cost.total * c,
        instructions=profile.instructions,
        loads=profile.loads,
        llc_misses=profile.llc_misses,
        frontend_stall_cycles=min(cost.stall_time, cost.total) * c,
        prefetch_events=profile.prefetchable_fraction * profile.llc_misses,
    )
