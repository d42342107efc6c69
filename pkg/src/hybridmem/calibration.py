"""Calibration file: network/cost constants, thresholds and the kernel table."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .characterization import Thresholds
from .cost import CostParams
from .machine import Design, NetworkParams
from .workloads.kernels import KernelSpec

DEFAULT_CALIBRATION = "calibration.json"

WORKLOAD_ORDER = ("GUPS", "Graph500", "FT", "LU", "Lammps", "GTC", "HPCCG")


@dataclass
class Calibration:
    network: NetworkParams
    cost: CostParams
    thresholds: Thresholds
    kernels: dict[str, KernelSpec]
    graph500_scale: int = 16
    graph500_edge_factor: int = 16
    # which sweep cell provides the counters used for classification
    classification_design: Design = Design.HMS
    classification_scale_index: int = 0
    targets: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def kernel(self, name: str) -> KernelSpec:
        for key, k in self.kernels.items():
            if key.lower() == name.lower():
                return k
        raise KeyError(f"unknown workload {name!r}; known: {', '.join(self.kernels)}")

    def canonical_name(self, name: str) -> str:
        return self.kernel(name).name

    def to_dict(self) -> dict:
        return {
            "notes": self.notes,
            "network": asdict(self.network),
            "cost": asdict(self.cost),
            "thresholds": self.thresholds.to_dict(),
            "graph500": {"scale": self.graph500_scale,
                         "edge_factor": self.graph500_edge_factor},
            "classification_point": {"design": self.classification_design.value,
                                     "scale_index": self.classification_scale_index},
            "targets": self.targets,
            "kernels": [k.to_dict() for k in self.kernels.values()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Calibration":
        kernels = [KernelSpec.from_dict(k) for k in d["kernels"]]
        point = d.get("classification_point", {})
        g = d.get("graph500", {})
        return cls(
            network=NetworkParams(**d["network"]),
            cost=CostParams(**d["cost"]),
            thresholds=Thresholds(**d["thresholds"]),
            kernels={k.name: k for k in kernels},
            graph500_scale=g.get("scale", 16),
            graph500_edge_factor=g.get("edge_factor", 16),
            classification_design=Design(point.get("design", "HMS")),
            classification_scale_index=point.get("scale_index", 0),
            targets=dict(d.get("targets", {})),
            notes=list(d.get("notes", [])),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Calibration":
        if path is None:
            text = resources.files("hybridmem.data").joinpath(
                DEFAULT_CALIBRATION).read_text()
        else:
            text = Path(path).read_text()
        return cls.from_dict(json.loads(text))
