"""
Machine model: memory tiers, compute nodes and paired cluster designs.

All latencies are dimensionless multiples of the fast-memory read latency.
The slow tier defaults to 1.6x, the ratio between a remote and a local
NUMA distance (16 vs 10) on the emulation platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Tuple

GB = 1024 ** 3

NUMA_LOCAL_DISTANCE = 10
NUMA_REMOTE_DISTANCE = 16
SLOW_LATENCY = NUMA_REMOTE_DISTANCE / NUMA_LOCAL_DISTANCE  # 1.6


class TierKind(str, Enum):
    FAST = "fast"
    SLOW = "slow"


class Design(str, Enum):
    UMS = "UMS"
    HMS = "HMS"


@dataclass(frozen=True)
class MemoryTier:
    kind: TierKind
    capacity: int  # bytes
    read_latency: float = 1.0
    write_latency: float = 1.0

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"tier capacity must be positive, got {self.capacity}")
        if self.read_latency <= 0 or self.write_latency <= 0:
            raise ValueError("tier latencies must be positive")
        if self.kind is TierKind.FAST and self.read_latency != 1.0:
            raise ValueError("fast tier read latency is the unit and must be 1.0")
        if self.kind is TierKind.SLOW and self.read_latency < 1.0:
            raise ValueError(
                f"slow tier read latency must be >= 1.0, got {self.read_latency}")


def fast_tier(capacity: int) -> MemoryTier:
    return MemoryTier(TierKind.FAST, capacity)


def slow_tier(capacity: int, read_latency: float = SLOW_LATENCY,
              write_latency: float | None = None) -> MemoryTier:
    """Slow tier; write latency defaults to the read latency (symmetric)."""
    if write_latency is None:
        write_latency = read_latency
    return MemoryTier(TierKind.SLOW, capacity, read_latency, write_latency)


@dataclass(frozen=True)
class NodeSpec:
    cores: int
    tiers: Tuple[MemoryTier, ...]
    llc_per_node: int = 8 * 1024 ** 2  # informational only

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if self.cores < 1:
            raise ValueError(f"node needs at least one core, got {self.cores}")
        if not any(t.kind is TierKind.FAST for t in self.tiers):
            raise ValueError("node needs at least one fast tier")
        if sum(t.kind is TierKind.SLOW for t in self.tiers) > 1:
            raise ValueError("at most one slow tier is modeled")

    @property
    def total_capacity(self) -> int:
        return sum(t.capacity for t in self.tiers)

    @property
    def fast_capacity(self) -> int:
        return sum(t.capacity for t in self.tiers if t.kind is TierKind.FAST)

    @property
    def fast_fraction(self) -> float:
        return self.fast_capacity / self.total_capacity

    def with_slow_latency(self, read_latency: float,
                          write_latency: float | None = None) -> "NodeSpec":
        """Copy of the node with the slow tier's latencies replaced."""
        if write_latency is None:
            write_latency = read_latency
        tiers = tuple(
            replace(t, read_latency=read_latency, write_latency=write_latency)
            if t.kind is TierKind.SLOW else t
            for t in self.tiers
        )
        return replace(self, tiers=tiers)


def default_ums_node() -> NodeSpec:
    return NodeSpec(cores=8, tiers=(fast_tier(16 * GB),))


def default_hms_node() -> NodeSpec:
    return NodeSpec(cores=8, tiers=(fast_tier(16 * GB), slow_tier(48 * GB)))


@dataclass(frozen=True)
class NetworkParams:
    remote_latency: float = 5.0
    hub_contention_alpha: float = 0.0

    def __post_init__(self):
        if self.remote_latency <= 0:
            raise ValueError("remote latency must be positive")
        if self.hub_contention_alpha < 0:
            raise ValueError("contention coefficient must be non-negative")


@dataclass(frozen=True)
class ClusterDesign:
    design: Design
    node: NodeSpec
    node_count: int
    network: NetworkParams = field(default_factory=NetworkParams)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError(f"cluster needs at least one node, got {self.node_count}")
        slow = [t.read_latency for t in self.node.tiers if t.kind is TierKind.SLOW]
        # Equality is allowed so the fully degenerate configuration stays valid.
        if slow and self.network.remote_latency < max(slow):
            raise ValueError(
                f"remote latency {self.network.remote_latency} is below the "
                f"slow tier latency {max(slow)}")

    @property
    def total_memory(self) -> int:
        return self.node_count * self.node.total_capacity

    @property
    def cores(self) -> int:
        return self.node_count * self.node.cores


class PairingError(ValueError):
    pass


def derive_paired_clusters(hms_node: NodeSpec, ums_node: NodeSpec,
                           hms_node_count: int,
                           network: NetworkParams | None = None
                           ) -> tuple[ClusterDesign, ClusterDesign]:
    """Build (HMS, UMS) clusters with identical total memory.

    The UMS side gets ``hms_total / ums_total`` times as many nodes.
    Capacities that do not divide are rejected instead of rounded.
    """
    if network is None:
        network = NetworkParams()
    hms_total = hms_node.total_capacity
    ums_total = ums_node.total_capacity
    ratio, remainder = divmod(hms_total, ums_total)
    if remainder:
        raise PairingError(
            f"UMS node capacity {ums_total} B does not divide HMS node capacity "
            f"{hms_total} B (remainder {remainder} B)")
    hms = ClusterDesign(Design.HMS, hms_node, hms_node_count, network)
    ums = ClusterDesign(Design.UMS, ums_node, hms_node_count * ratio, network)
    assert hms.total_memory == ums.total_memory
    return hms, ums


def effective_local_latency(node: NodeSpec, interleaved: bool = True,
                            write_fraction: float = 0.0) -> float:
    """Mean latency of a local memory access.

    With interleaving, pages are spread over the tiers in proportion to
    capacity; otherwise all data sits in fast memory. ``write_fraction``
    blends in the write latencies (only matters with asymmetric tiers).
    """
    if not 0.0 <= write_fraction <= 1.0:
        raise ValueError(f"write fraction must be in [0, 1], got {write_fraction}")
    if not interleaved:
        tiers = [t for t in node.tiers if t.kind is TierKind.FAST]
    else:
        tiers = list(node.tiers)
    total = sum(t.capacity for t in tiers)
    read = sum(t.capacity * t.read_latency for t in tiers) / total
    if write_fraction == 0.0:
        return read
    write = sum(t.capacity * t.write_latency for t in tiers) / total
    return (1.0 - write_fraction) * read + write_fraction * write


def local_access_probability(cluster: ClusterDesign) -> float:
    """Chance that a uniformly random address lives on the accessing node."""
    if cluster.node_count <= 0:
        raise ValueError("node count must be positive")
    return 1.0 / cluster.node_count
