"""
Kernel descriptions and the analytic profile builders.

A KernelSpec holds the per-workload ratios (instructions per LLC miss,
misses per load, prefetchable share, communication shape). Profiles are
per process: the same spec yields different counts on HMS and UMS only
through the process count, the node count and the memory per process.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from ..cost import CommPattern, WorkloadPhaseProfile
from ..machine import GB, ClusterDesign
from .partition import VertexPartition

# Reference inputs were sized for the largest configuration: 32 HMS nodes.
REFERENCE_MEMORY = 32 * 64 * GB
GUPS_UPDATES_PER_ENTRY = 4


class Scaling(str, Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class KernelSpec:
    """Calibrated cost ratios for one workload.

    ``comm_coef`` is the single communication knob; its meaning depends on
    the pattern: halo weight for neighbour exchange, packets per peer per
    step for all-to-all, messages per remote access for irregular and
    hub-skewed traffic.
    """

    name: str
    instr_per_memref: float
    llc_miss_per_load: float
    comm_pattern: CommPattern
    prefetchable_fraction: float
    scaling: Scaling
    work_unit_label: str
    instr_per_unit: float = 1.0
    units_per_item: float = 1.0  # work units per problem item (e.g. flops per cell)
    write_fraction: float = 0.0
    comm_coef: float = 0.0
    exchange_share: float = 0.0
    problem_size: int = 1
    footprint_gb: float = 0.0
    uneven_split: bool = False

    def __post_init__(self):
        object.__setattr__(self, "comm_pattern", CommPattern(self.comm_pattern))
        object.__setattr__(self, "scaling", Scaling(self.scaling))
        if self.instr_per_memref <= 0:
            raise ValueError(f"{self.name}: instr_per_memref must be positive")
        if not 0 < self.llc_miss_per_load <= 1:
            raise ValueError(f"{self.name}: llc_miss_per_load must be in (0, 1]")
        for f in ("prefetchable_fraction", "write_fraction", "exchange_share"):
            if not 0.0 <= getattr(self, f) <= 1.0:
                raise ValueError(f"{self.name}: {f} must be in [0, 1]")
        if self.loads_per_instr > 1.0:
            raise ValueError(
                f"{self.name}: ratios imply {self.loads_per_instr:.3g} loads per "
                "instruction")
        if (self.instr_per_unit <= 0 or self.units_per_item <= 0 or self.comm_coef < 0
                or self.problem_size < 1):
            raise ValueError(f"{self.name}: invalid size or communication parameters")

    @property
    def loads_per_instr(self) -> float:
        return 1.0 / (self.instr_per_memref * self.llc_miss_per_load)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["comm_pattern"] = self.comm_pattern.value
        d["scaling"] = self.scaling.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(**d)


def build_profile(kernel: KernelSpec, work_units: float, remote_share: float,
                  messages: float) -> WorkloadPhaseProfile:
    """Per-process profile from work done and the share of misses off-node."""
    if not 0.0 <= remote_share <= 1.0:
        raise ValueError(f"remote share must be in [0, 1], got {remote_share}")
    instructions = work_units * kernel.instr_per_unit
    misses = instructions / kernel.instr_per_memref
    loads = misses / kernel.llc_miss_per_load
    remote = misses * remote_share
    return WorkloadPhaseProfile(
        instructions=instructions,
        loads=loads,
        llc_misses=misses,
        mem_transfers_local=misses - remote,
        mem_transfers_remote=remote,
        write_fraction=kernel.write_fraction,
        messages=messages,
        comm_pattern=kernel.comm_pattern,
        prefetchable_fraction=kernel.prefetchable_fraction,
    )


def per_process_size(kernel: KernelSpec, cluster: ClusterDesign, processes: int) -> float:
    """Problem units owned by one process.

    Weak-scaling inputs fill memory, so a process owns a share proportional
    to its memory. Strong-scaling inputs are fixed and divided evenly.
    """
    if processes < 1 or processes > cluster.cores:
        raise ValueError(
            f"{processes} processes do not fit {cluster.cores} cores of the "
            f"{cluster.design.value} cluster")
    if kernel.scaling is Scaling.WEAK:
        mem_per_process = cluster.total_memory / processes
        return kernel.problem_size * mem_per_process / REFERENCE_MEMORY
    q, r = divmod(kernel.problem_size, processes)
    if r:
        if not kernel.uneven_split:
            raise ValueError(
                f"{kernel.name}: problem size {kernel.problem_size} is not divisible "
                f"by {processes} processes (remainder {r})")
        # bulk-synchronous: the largest block sets the pace
        return float(q + 1)
    return float(q)


@lru_cache(maxsize=None)
def process_grid(processes: int) -> tuple[int, int, int]:
    """Balanced 3D factorisation, largest dimension first."""
    dims = [1, 1, 1]
    n = processes
    factors = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 1
    if n > 1:
        factors.append(n)
    for f in sorted(factors, reverse=True):
        dims[dims.index(min(dims))] *= f
    return tuple(sorted(dims, reverse=True))


@lru_cache(maxsize=None)
def offnode_neighbor_faces(processes: int, procs_per_node: int) -> float:
    """Mean number of face neighbours living on another node.

    Ranks are laid out row-major on the process grid and packed onto nodes
    in rank order (rank // procs_per_node), the default MPI placement.
    """
    dims = process_grid(processes)
    ranks = np.arange(processes)
    coords = np.array(np.unravel_index(ranks, dims))
    node = ranks // procs_per_node
    total = 0
    for axis in range(3):
        for step in (-1, 1):
            c = coords.copy()
            c[axis] += step
            inside = (c[axis] >= 0) & (c[axis] < dims[axis])
            nbr = np.ravel_multi_index(tuple(c[:, inside]), dims)
            total += int(np.count_nonzero(node[inside] != node[nbr]))
    return total / processes


def gups_profile(table_bytes: float, updates: float, cluster: ClusterDesign,
                 kernel: KernelSpec) -> WorkloadPhaseProfile:
    """Expected per-process profile of random table updates.

    Each update touches a uniformly random entry of a table spread evenly
    over all nodes, so it is node-local with probability 1/node_count.
    """
    if table_bytes > cluster.total_memory:
        raise ValueError(
            f"GUPS table of {table_bytes:.4g} B exceeds {cluster.design.value} "
            f"memory {cluster.total_memory} B")
    n = cluster.node_count
    remote = updates * (1.0 - 1.0 / n)
    instructions = updates * kernel.instr_per_memref
    return WorkloadPhaseProfile(
        instructions=instructions,
        loads=updates / kernel.llc_miss_per_load,
        llc_misses=updates,
        mem_transfers_local=updates / n,
        mem_transfers_remote=remote,
        write_fraction=kernel.write_fraction,
        messages=remote * kernel.comm_coef,
        comm_pattern=kernel.comm_pattern,
        prefetchable_fraction=kernel.prefetchable_fraction,
    )


def simulate_gups_locality(table_entries: int, updates: int, node_count: int,
                           rng: np.random.Generator, origin_node: int = 0) -> int:
    """Monte Carlo count of updates from ``origin_node`` that stay on-node."""
    addresses = rng.integers(0, table_entries, size=updates)
    owners = VertexPartition(node_count, table_entries).owner(addresses)
    return int(np.count_nonzero(owners == origin_node))


def analytic_profile(kernel: KernelSpec, cluster: ClusterDesign, processes: int,
                     problem_size: int | None = None) -> tuple[WorkloadPhaseProfile, float]:
    """Per-process profile and work units for a kernel without a real run.

    Returns ``(profile, work_units)``. ``problem_size`` overrides the
    kernel's total input size.
    """
    if problem_size is not None:
        kernel = _with(kernel, problem_size=problem_size)
    size = per_process_size(kernel, cluster, processes)
    ppn = processes // cluster.node_count
    pattern = kernel.comm_pattern

    if pattern is CommPattern.IRREGULAR:
        bytes_per_entry = kernel.footprint_gb * GB / kernel.problem_size
        updates = GUPS_UPDATES_PER_ENTRY * size
        table_bytes = bytes_per_entry * size * processes
        return gups_profile(table_bytes, updates, cluster, kernel), updates

    work = size * kernel.units_per_item
    if pattern is CommPattern.ALL_TO_ALL:
        # Transposed data leaves the node unless the peer is co-located.
        share = kernel.exchange_share * (1.0 - 1.0 / cluster.node_count)
        messages = kernel.comm_coef * (processes - 1)
    elif pattern in (CommPattern.NEIGHBOR, CommPattern.ALL_REDUCE):
        faces = offnode_neighbor_faces(processes, ppn)
        side = size ** (1.0 / 3.0)
        share = min(1.0, kernel.comm_coef * faces / side)
        messages = faces + (math.log2(processes) if processes > 1 else 0.0)
    elif pattern is CommPattern.NONE:
        share, messages = 0.0, 0.0
    else:
        raise ValueError(
            f"{kernel.name}: {pattern.value} traffic is measured, not modeled "
            "analytically; use bfs_profile")
    return build_profile(kernel, work, share, messages), work


def _with(kernel: KernelSpec, **kw) -> KernelSpec:
    d = kernel.to_dict()
    d.update(kw)
    return KernelSpec.from_dict(d)
