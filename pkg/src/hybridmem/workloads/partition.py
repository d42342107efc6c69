from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VertexPartition:
    """Contiguous 1D block partition of ``num_items`` ids over nodes.

    The first ``num_items % node_count`` blocks get one extra item, so
    block sizes differ by at most one.
    """

    node_count: int
    num_items: int

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("partition needs at least one node")
        if self.num_items < 0:
            raise ValueError("item count must be non-negative")

    def block_sizes(self) -> np.ndarray:
        q, r = divmod(self.num_items, self.node_count)
        sizes = np.full(self.node_count, q, dtype=np.int64)
        sizes[:r] += 1
        return sizes

    def owner(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        q, r = divmod(self.num_items, self.node_count)
        boundary = r * (q + 1)
        if q == 0:
            return ids // 1
        return np.where(ids < boundary, ids // (q + 1), r + (ids - boundary) // q)

    @property
    def mapping(self) -> np.ndarray:
        return self.owner(np.arange(self.num_items))
