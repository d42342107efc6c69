"""Experiment configuration: strict JSON, validated before anything runs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import jsonschema

from .calibration import WORKLOAD_ORDER, Calibration
from .comparison import Machine, ScalePoint
from .machine import GB, NodeSpec, PairingError, fast_tier, slow_tier


class ConfigError(ValueError):
    pass


def _resource(name: str) -> str:
    return resources.files("hybridmem.data").joinpath(name).read_text()


SCHEMA = json.loads(_resource("config.schema.json"))
DEFAULTS = json.loads(_resource("default_config.json"))


@dataclass
class ExperimentConfig:
    hms_node: dict
    ums_node: dict
    hms_processes: list[int]
    workloads: list[str]
    seed: int = 0
    calibration: str | None = None
    output_dir: str = "results"
    workers: int = 1
    network: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(raw, SCHEMA)
        except jsonschema.ValidationError as e:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise ConfigError(f"config {where}: {e.message}") from None
        merged = {k: v for k, v in DEFAULTS.items()}
        for k, v in raw.items():
            if isinstance(v, dict) and isinstance(merged.get(k), dict):
                merged[k] = {**merged[k], **v}
            else:
                merged[k] = v
        return cls(**merged)

    @classmethod
    def load(cls, path: str | Path | None) -> "ExperimentConfig":
        if path is None:
            return cls.from_dict({})
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        return cls.from_dict(raw)

    def load_calibration(self) -> Calibration:
        cal = Calibration.load(self.calibration)
        if self.network:
            cal = replace(cal, network=replace(cal.network, **self.network))
        return cal

    def machine(self, cal: Calibration) -> Machine:
        h, u = self.hms_node, self.ums_node
        tiers = [fast_tier(h["fast_gb"] * GB)]
        if h.get("slow_gb", 0):
            tiers.append(slow_tier(h["slow_gb"] * GB, h["slow_read_latency"],
                                   h.get("slow_write_latency")))
        hms = NodeSpec(h["cores"], tuple(tiers))
        ums = NodeSpec(u["cores"], (fast_tier(u["fast_gb"] * GB),))
        return Machine(hms, ums, cal.network)

    def scale_points(self, machine: Machine) -> list[ScalePoint]:
        ratio, rem = divmod(machine.hms_node.total_capacity,
                            machine.ums_node.total_capacity)
        if rem:
            raise PairingError(
                f"UMS node capacity does not divide HMS node capacity "
                f"(remainder {rem} B)")
        points = []
        for p in self.hms_processes:
            nodes, r = divmod(p, machine.hms_node.cores)
            if r:
                raise ConfigError(
                    f"{p} HMS processes do not fill whole {machine.hms_node.cores}-core nodes")
            points.append(ScalePoint(p, nodes * ratio * machine.ums_node.cores))
        return points

    def validate(self) -> tuple[Calibration, Machine, list[ScalePoint]]:
        """Resolve everything a run needs, raising before any output is written."""
        try:
            cal = self.load_calibration()
            machine = self.machine(cal)
            points = self.scale_points(machine)
            for p in points:
                machine.pair(p)
            self.workloads = [cal.canonical_name(w) for w in self.workloads]
        except (KeyError, ValueError, OSError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e).strip("'\"")) from None
        return cal, machine, points


__all__ = ["ConfigError", "ExperimentConfig", "WORKLOAD_ORDER"]
