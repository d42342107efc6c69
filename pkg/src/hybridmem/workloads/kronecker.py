"""Graph500-style Kronecker (R-MAT) edge list generator."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

INITIATOR = (0.57, 0.19, 0.19, 0.05)
DEFAULT_MEMORY_BUDGET = 4 * 1024 ** 3

# Generation holds two int64 endpoint arrays plus per-level temporaries;
# the BFS later adds a doubled CSR. 64 bytes/edge covers both.
_BYTES_PER_EDGE = 64


class GraphTooLarge(ValueError):
    def __init__(self, required: int, budget: int):
        super().__init__(
            f"graph needs about {required} bytes, budget is {budget} bytes")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class KroneckerGraph:
    scale: int
    edge_factor: int
    src: np.ndarray
    dst: np.ndarray
    seed: int

    @property
    def num_vertices(self) -> int:
        return 1 << self.scale

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    @property
    def edges(self) -> np.ndarray:
        return np.column_stack((self.src, self.dst))

    def degrees(self) -> np.ndarray:
        """Undirected degree per vertex; self loops count once."""
        n = self.num_vertices
        deg = np.bincount(self.src, minlength=n)
        loop = self.src == self.dst
        deg += np.bincount(self.dst[~loop], minlength=n)
        return deg


def kronecker_generate(scale: int, edge_factor: int = 16, seed: int = 0,
                       memory_budget: int = DEFAULT_MEMORY_BUDGET) -> KroneckerGraph:
    """Sample ``edge_factor * 2**scale`` edges with the Graph500 initiator.

    Vertex labels are randomly permuted and the edge list shuffled, as in
    the reference generator, so vertex id carries no degree information.
    """
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    if edge_factor < 1:
        raise ValueError(f"edge_factor must be >= 1, got {edge_factor}")
    n = 1 << scale
    m = edge_factor * n
    required = m * _BYTES_PER_EDGE
    if required > memory_budget:
        raise GraphTooLarge(required, memory_budget)

    rng = np.random.default_rng(seed)
    a, b, c, _ = INITIATOR
    ab = a + b
    c_norm = c / (1.0 - ab)
    a_norm = a / ab
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    for level in range(scale):
        ii = rng.random(m) > ab
        jj = rng.random(m) > np.where(ii, c_norm, a_norm)
        src += ii.astype(np.int64) << level
        dst += jj.astype(np.int64) << level

    perm = rng.permutation(n)
    src = perm[src]
    dst = perm[dst]
    order = rng.permutation(m)
    return KroneckerGraph(scale, edge_factor, src[order], dst[order], seed)


def write_edge_list(graph: KroneckerGraph, path: str | Path) -> None:
    """One ``src dst`` pair per line."""
    np.savetxt(path, graph.edges, fmt="%d", delimiter=" ")
