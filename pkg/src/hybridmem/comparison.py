"""UMS-vs-HMS experiment cells and scale sweeps."""

from __future__ import annotations

import csv
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .calibration import Calibration
from .characterization import CounterSample, synthesize_counters
from .cost import (CommPattern, CostParams, PhaseCost, WorkloadPhaseProfile, phase_cost,
                   per_process_performance, time_unit_seconds)
from .machine import (GB, ClusterDesign, NetworkParams, NodeSpec, default_hms_node,
                      default_ums_node, derive_paired_clusters)
from .workloads.bfs import BfsTree, _csr, bfs_profile, select_root
from .workloads.kernels import REFERENCE_MEMORY, KernelSpec, analytic_profile
from .workloads.kronecker import KroneckerGraph, kronecker_generate
from .workloads.partition import VertexPartition

DEFAULT_HMS_PROCESSES = (8, 16, 32, 64, 128, 256)

RESULTS_HEADER = ("workload", "scale_label", "design", "processes",
                  "perf_per_process", "unit", "improvement")


@dataclass(frozen=True)
class ScalePoint:
    hms_processes: int
    ums_processes: int

    def __post_init__(self):
        if self.hms_processes < 1 or self.ums_processes < 1:
            raise ValueError("process counts must be positive")

    @property
    def label(self) -> str:
        return f"{self.hms_processes}:{self.ums_processes}"

    @classmethod
    def parse(cls, label: str) -> "ScalePoint":
        h, u = label.split(":")
        return cls(int(h), int(u))


def default_scale_ladder(hms_processes: Sequence[int] = DEFAULT_HMS_PROCESSES,
                         ratio: int = 4) -> list[ScalePoint]:
    return [ScalePoint(p, ratio * p) for p in hms_processes]


@dataclass(frozen=True)
class Machine:
    """Node shapes and network shared by every cell of a sweep."""

    hms_node: NodeSpec
    ums_node: NodeSpec
    network: NetworkParams

    @classmethod
    def default(cls, network: NetworkParams | None = None) -> "Machine":
        return cls(default_hms_node(), default_ums_node(), network or NetworkParams())

    def pair(self, point: ScalePoint) -> tuple[ClusterDesign, ClusterDesign]:
        nodes, rem = divmod(point.hms_processes, self.hms_node.cores)
        if rem or nodes < 1:
            raise ValueError(
                f"{point.hms_processes} HMS processes do not fill whole "
                f"{self.hms_node.cores}-core nodes")
        hms, ums = derive_paired_clusters(self.hms_node, self.ums_node, nodes,
                                          self.network)
        if point.ums_processes > ums.cores:
            raise ValueError(
                f"{point.ums_processes} UMS processes exceed {ums.cores} cores "
                f"of {ums.node_count} paired UMS nodes")
        return hms, ums


@dataclass(frozen=True)
class ExperimentResult:
    workload: str
    scale_point: ScalePoint
    perf_hms: float
    perf_ums: float
    unit: str
    counters_hms: CounterSample
    counters_ums: CounterSample
    profile_hms: WorkloadPhaseProfile
    profile_ums: WorkloadPhaseProfile
    cost_hms: PhaseCost
    cost_ums: PhaseCost

    @property
    def improvement(self) -> float:
        return self.perf_hms / self.perf_ums


class CellError(RuntimeError):
    def __init__(self, workload: str, point: ScalePoint, cause: Exception):
        super().__init__(f"cell ({workload}, {point.label}): {cause}")
        self.workload = workload
        self.scale_point = point
        self.cause = cause


def cell_seed(seed: int, workload: str, point: ScalePoint) -> np.random.SeedSequence:
    """Per-cell entropy, a pure function of (seed, workload, scale)."""
    return np.random.SeedSequence(
        [seed, zlib.crc32(workload.encode()), point.hms_processes, point.ums_processes])


def footprint_bytes(kernel: KernelSpec, cluster: ClusterDesign) -> float:
    # Reference footprints were taken at the reference scale; the input grows
    # with the machine for both scaling types.
    return kernel.footprint_gb * GB * cluster.total_memory / REFERENCE_MEMORY


def check_capacity(kernel: KernelSpec, clusters: Iterable[ClusterDesign]) -> None:
    for c in clusters:
        need = footprint_bytes(kernel, c)
        if need > c.total_memory:
            raise ValueError(
                f"{kernel.name} footprint {need / GB:.4g} GB exceeds "
                f"{c.design.value} memory {c.total_memory / GB:.4g} GB")


@lru_cache(maxsize=8)
def _graph500_tree(scale: int, edge_factor: int, graph_seed: int,
                   root_seed: int) -> tuple[KroneckerGraph, BfsTree]:
    graph = kronecker_generate(scale, edge_factor, graph_seed)
    tree = select_root(graph, np.random.default_rng(root_seed), _csr(graph))
    return graph, tree


def _profiles(kernel: KernelSpec, point: ScalePoint, hms: ClusterDesign,
              ums: ClusterDesign, seed: int, cal: Calibration):
    if kernel.comm_pattern is CommPattern.HUB_SKEWED:
        graph_seed, root_seed = cell_seed(seed, kernel.name, point).generate_state(2)
        graph, tree = _graph500_tree(cal.graph500_scale, cal.graph500_edge_factor,
                                     int(graph_seed), int(root_seed))
        n = graph.num_vertices
        bp = bfs_profile(
            graph, VertexPartition(hms.node_count, n), VertexPartition(ums.node_count, n),
            tree, kernel, (point.hms_processes // hms.node_count,
                           point.ums_processes // ums.node_count))
        return (bp.hms, bp.work_hms), (bp.ums, bp.work_ums)
    return (analytic_profile(kernel, hms, point.hms_processes),
            analytic_profile(kernel, ums, point.ums_processes))


def run_experiment(workload: str, scale_point: ScalePoint,
                   paired_clusters: tuple[ClusterDesign, ClusterDesign] | None = None,
                   seed: int = 0, calibration: Calibration | None = None) -> ExperimentResult:
    """Evaluate one (workload, scale) cell on both designs."""
    cal = calibration or Calibration.load()
    kernel = cal.kernel(workload)
    if paired_clusters is None:
        paired_clusters = Machine.default(cal.network).pair(scale_point)
    hms, ums = paired_clusters
    if hms.total_memory != ums.total_memory:
        raise ValueError(
            f"designs violate the same-memory rule: HMS {hms.total_memory} B vs "
            f"UMS {ums.total_memory} B")
    check_capacity(kernel, (hms, ums))

    (p_h, w_h), (p_u, w_u) = _profiles(kernel, scale_point, hms, ums, seed, cal)
    params = cal.cost
    c_h = phase_cost(p_h, hms, params=params)
    c_u = phase_cost(p_u, ums, params=params)
    unit = time_unit_seconds(params)
    return ExperimentResult(
        workload=kernel.name, scale_point=scale_point,
        perf_hms=per_process_performance(p_h, hms, w_h, params) / unit,
        perf_ums=per_process_performance(p_u, ums, w_u, params) / unit,
        unit=kernel.work_unit_label,
        counters_hms=synthesize_counters(p_h, c_h, params),
        counters_ums=synthesize_counters(p_u, c_u, params),
        profile_hms=p_h, profile_ums=p_u, cost_hms=c_h, cost_ums=c_u,
    )


def sweep(workloads: Sequence[str], scale_points: Sequence[ScalePoint], seed: int = 0,
          calibration: Calibration | None = None, machine: Machine | None = None,
          workers: int = 1) -> list[ExperimentResult]:
    """Row-major grid (workload-major) of results.

    Cells are independent; ``workers > 1`` evaluates them on a thread pool
    without changing any result.
    """
    if not workloads or not scale_points:
        raise ValueError("sweep needs at least one workload and one scale point")
    cal = calibration or Calibration.load()
    machine = machine or Machine.default(cal.network)
    cells = [(w, p) for w in workloads for p in scale_points]

    def run(cell):
        w, p = cell
        try:
            return run_experiment(w, p, machine.pair(p), seed, cal)
        except Exception as e:
            raise CellError(w, p, e) from e

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def fmt(x: float) -> str:
    return f"{x:.6g}"


def write_results_csv(results: Iterable[ExperimentResult], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        for r in results:
            label = r.scale_point.label
            w.writerow([r.workload, label, "HMS", r.scale_point.hms_processes,
                        fmt(r.perf_hms), r.unit, fmt(r.improvement)])
            w.writerow([r.workload, label, "UMS", r.scale_point.ums_processes,
                        fmt(r.perf_ums), r.unit, ""])


def counter_rows(results: Iterable[ExperimentResult]):
    for r in results:
        yield f"{r.workload}@{r.scale_point.label}/HMS", r.counters_hms
        yield f"{r.workload}@{r.scale_point.label}/UMS", r.counters_ums


def with_network(cal: Calibration, **kw) -> Calibration:
    return replace(cal, network=replace(cal.network, **kw))


def with_cost(cal: Calibration, **kw) -> Calibration:
    return replace(cal, cost=replace(cal.cost, **kw))
