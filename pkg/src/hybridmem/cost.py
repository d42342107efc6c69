"""
Cost engine: turns an abstract per-process operation profile into time.

Time is measured in units of one fast-memory read latency. Instruction
time is converted with ``fast_latency_cycles`` (cycles per fast access).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

from .machine import ClusterDesign, effective_local_latency


class CommPattern(str, Enum):
    NONE = "none"
    NEIGHBOR = "neighbor"
    ALL_TO_ALL = "all_to_all"
    IRREGULAR = "irregular"
    HUB_SKEWED = "hub_skewed"
    ALL_REDUCE = "all_reduce"


@dataclass(frozen=True)
class WorkloadPhaseProfile:
    """Per-process operation counts for one workload on one design."""

    instructions: float
    loads: float
    llc_misses: float
    mem_transfers_local: float
    mem_transfers_remote: float
    write_fraction: float = 0.0
    messages: float = 0.0
    comm_pattern: CommPattern = CommPattern.NONE
    prefetchable_fraction: float = 0.0

    def __post_init__(self):
        for f in ("instructions", "loads", "llc_misses", "mem_transfers_local",
                  "mem_transfers_remote", "messages"):
            v = getattr(self, f)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{f} must be a finite non-negative count, got {v}")
        for f in ("write_fraction", "prefetchable_fraction"):
            v = getattr(self, f)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{f} must be in [0, 1], got {v}")
        if self.llc_misses > self.loads:
            raise ValueError(
                f"llc_misses ({self.llc_misses}) exceed loads ({self.loads})")
        transfers = self.mem_transfers_local + self.mem_transfers_remote
        if not math.isclose(transfers, self.llc_misses, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(
                f"local + remote transfers ({transfers}) must equal llc_misses "
                f"({self.llc_misses})")

    @property
    def llc_miss_per_load(self) -> float:
        return self.llc_misses / self.loads if self.loads else 0.0

    @property
    def remote_fraction(self) -> float:
        return self.mem_transfers_remote / self.llc_misses if self.llc_misses else 0.0

    def scaled(self, k: float) -> "WorkloadPhaseProfile":
        """Every count multiplied by ``k``; ratios unchanged."""
        counts = {"instructions", "loads", "llc_misses", "mem_transfers_local",
                  "mem_transfers_remote", "messages"}
        kw = {f.name: getattr(self, f.name) * k if f.name in counts
              else getattr(self, f.name) for f in fields(self)}
        return WorkloadPhaseProfile(**kw)


@dataclass(frozen=True)
class CostParams:
    cpi_base: float = 1.0
    fast_latency_cycles: float = 200.0
    prefetch_overlap: float = 0.8
    interleaved: bool = True
    clock_ghz: float = 2.1  # only converts rates to per-second for reports

    def __post_init__(self):
        if self.cpi_base <= 0 or self.fast_latency_cycles <= 0 or self.clock_ghz <= 0:
            raise ValueError("cpi_base, fast_latency_cycles and clock_ghz must be positive")
        if not 0.0 <= self.prefetch_overlap <= 1.0:
            raise ValueError("prefetch_overlap must be in [0, 1]")


@dataclass(frozen=True)
class PhaseCost:
    compute_time: float
    local_mem_time: float
    remote_time: float
    congestion_penalty: float
    stall_time: float = 0.0  # exposed (non-prefetched) transfer time, for counters

    @property
    def total(self) -> float:
        return (self.compute_time + self.local_mem_time + self.remote_time
                + self.congestion_penalty)


def congestion_factor(pattern: CommPattern, peer_nodes: int, alpha: float) -> float:
    """Multiplier >= 1 on message cost from contention at receiving nodes.

    Hub-skewed traffic funnels every peer into one node; all-to-all and
    random (irregular) traffic spreads it, so only half the peers collide
    on average. Neighbour, collective and silent phases are exempt.
    """
    if peer_nodes < 1:
        raise ValueError(f"peer_nodes must be >= 1, got {peer_nodes}")
    if pattern is CommPattern.HUB_SKEWED:
        return 1.0 + alpha * (peer_nodes - 1)
    if pattern in (CommPattern.ALL_TO_ALL, CommPattern.IRREGULAR):
        return 1.0 + alpha * (peer_nodes - 1) / 2.0
    return 1.0


def phase_cost(profile: WorkloadPhaseProfile, cluster: ClusterDesign,
               cpi_base: float | None = None,
               params: CostParams | None = None) -> PhaseCost:
    if params is None:
        params = CostParams()
    cpi = params.cpi_base if cpi_base is None else cpi_base
    if cpi <= 0:
        raise ValueError("cpi_base must be positive")

    compute = profile.instructions * cpi / params.fast_latency_cycles
    # Prefetched transfers overlap with compute; only the residual is paid.
    hide = 1.0 - profile.prefetchable_fraction * params.prefetch_overlap
    local_latency = effective_local_latency(
        cluster.node, params.interleaved, profile.write_fraction)
    remote_latency = cluster.network.remote_latency
    local_raw = profile.mem_transfers_local * local_latency
    remote_raw = profile.mem_transfers_remote * remote_latency

    cf = congestion_factor(profile.comm_pattern, cluster.node_count,
                           cluster.network.hub_contention_alpha)
    return PhaseCost(
        compute_time=compute,
        local_mem_time=local_raw * hide,
        remote_time=remote_raw * hide,
        congestion_penalty=profile.messages * remote_latency * (cf - 1.0),
        stall_time=(local_raw + remote_raw) * (1.0 - profile.prefetchable_fraction),
    )


def per_process_performance(profile: WorkloadPhaseProfile, cluster: ClusterDesign,
                            work_units: float,
                            params: CostParams | None = None) -> float:
    """Work units completed per fast-latency time unit by one process."""
    if work_units < 0:
        raise ValueError("work_units must be non-negative")
    total = phase_cost(profile, cluster, params=params).total
    if total <= 0:
        raise ValueError("profile has zero execution time; rate is undefined")
    return work_units / total


def time_unit_seconds(params: CostParams) -> float:
    """Wall-clock length of one fast-latency time unit."""
    return params.fast_latency_cycles / (params.clock_ghz * 1e9)
