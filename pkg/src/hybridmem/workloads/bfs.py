"""Level-synchronous BFS with per-partition edge locality accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cost import WorkloadPhaseProfile
from .kernels import KernelSpec, build_profile
from .kronecker import KroneckerGraph
from .partition import VertexPartition

ROOT_MIN_COMPONENT = 0.25
ROOT_MAX_TRIES = 64


def _csr(graph: KroneckerGraph) -> tuple[np.ndarray, np.ndarray]:
    keep = graph.src != graph.dst
    s, d = graph.src[keep], graph.dst[keep]
    heads = np.concatenate((s, d))
    tails = np.concatenate((d, s))
    order = np.argsort(heads, kind="stable")
    indptr = np.zeros(graph.num_vertices + 1, dtype=np.int64)
    np.cumsum(np.bincount(heads, minlength=graph.num_vertices), out=indptr[1:])
    return indptr, tails[order]


@dataclass
class BfsTree:
    root: int
    parent: np.ndarray
    level: np.ndarray
    traversed_edges: int
    # every adjacency entry examined, as (frontier vertex, neighbour)
    scanned_src: np.ndarray
    scanned_dst: np.ndarray

    @property
    def visited(self) -> np.ndarray:
        return np.flatnonzero(self.level >= 0)

    def remote_scans(self, partition: VertexPartition) -> int:
        return int(np.count_nonzero(
            partition.owner(self.scanned_src) != partition.owner(self.scanned_dst)))


def bfs_traverse(graph: KroneckerGraph, root: int,
                 csr: tuple[np.ndarray, np.ndarray] | None = None) -> BfsTree:
    n = graph.num_vertices
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside [0, {n})")
    indptr, indices = csr if csr is not None else _csr(graph)
    level = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    level[root] = 0
    parent[root] = root
    frontier = np.array([root], dtype=np.int64)
    scanned_src, scanned_dst = [], []
    depth = 0
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        offsets = np.repeat(starts - (np.cumsum(counts) - counts), counts)
        nbr = indices[np.arange(total) + offsets]
        src = np.repeat(frontier, counts)
        scanned_src.append(src)
        scanned_dst.append(nbr)
        fresh = level[nbr] < 0
        new, first = np.unique(nbr[fresh], return_index=True)
        depth += 1
        level[new] = depth
        parent[new] = src[fresh][first]
        frontier = new

    visited = level >= 0
    # Graph500 counts input edges inside the traversed component.
    traversed = int(np.count_nonzero(visited[graph.src] & (graph.src != graph.dst)))
    empty = np.zeros(0, dtype=np.int64)
    return BfsTree(
        root=root, parent=parent, level=level, traversed_edges=traversed,
        scanned_src=np.concatenate(scanned_src) if scanned_src else empty,
        scanned_dst=np.concatenate(scanned_dst) if scanned_dst else empty,
    )


def select_root(graph: KroneckerGraph, rng: np.random.Generator,
                csr: tuple[np.ndarray, np.ndarray] | None = None) -> BfsTree:
    """BFS from a uniformly drawn root whose component holds >= 25% of vertices."""
    csr = csr if csr is not None else _csr(graph)
    need = ROOT_MIN_COMPONENT * graph.num_vertices
    for _ in range(ROOT_MAX_TRIES):
        root = int(rng.integers(graph.num_vertices))
        tree = bfs_traverse(graph, root, csr)
        if tree.visited.size >= need:
            return tree
    raise RuntimeError(
        f"no root in a component of >= {ROOT_MIN_COMPONENT:.0%} of vertices "
        f"after {ROOT_MAX_TRIES} draws")


@dataclass(frozen=True)
class BfsProfiles:
    hms: WorkloadPhaseProfile
    ums: WorkloadPhaseProfile
    traversed_edges: int
    work_hms: float  # traversed edges per process
    work_ums: float
    remote_fraction_hms: float
    remote_fraction_ums: float


def bfs_profile(graph: KroneckerGraph, partition_hms: VertexPartition,
                partition_ums: VertexPartition, root: int | BfsTree,
                kernel: KernelSpec, cores_per_node: tuple[int, int] = (8, 8)
                ) -> BfsProfiles:
    """Run (or reuse) one BFS and build per-process profiles for both designs.

    Every scanned adjacency entry whose endpoints are owned by different
    nodes is a remote access. Work is the traversed edge count, shared by
    both designs.
    """
    tree = root if isinstance(root, BfsTree) else bfs_traverse(graph, root)
    scans = tree.scanned_src.size
    out = {}
    for key, part, cores in (("hms", partition_hms, cores_per_node[0]),
                             ("ums", partition_ums, cores_per_node[1])):
        if part.num_items != graph.num_vertices:
            raise ValueError("partition does not cover the graph's vertices")
        remote = tree.remote_scans(part)
        share = remote / scans if scans else 0.0
        processes = part.node_count * cores
        work = tree.traversed_edges / processes
        messages = kernel.comm_coef * remote / processes
        out[key] = (build_profile(kernel, work, share, messages), work, share)
    return BfsProfiles(
        hms=out["hms"][0], ums=out["ums"][0], traversed_edges=tree.traversed_edges,
        work_hms=out["hms"][1], work_ums=out["ums"][1],
        remote_fraction_hms=out["hms"][2], remote_fraction_ums=out["ums"][2],
    )
