"""Uniform- vs hybrid-memory cluster simulator and workload characterization."""

__version__ = "0.1.0"
