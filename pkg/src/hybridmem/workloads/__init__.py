from .kronecker import KroneckerGraph, GraphTooLarge, kronecker_generate, write_edge_list
from .bfs import BfsTree, BfsProfiles, bfs_profile, bfs_traverse, select_root
from .partition import VertexPartition
from .kernels import (KernelSpec, Scaling, analytic_profile, gups_profile,
                      offnode_neighbor_faces, simulate_gups_locality)

__all__ = [
    "KroneckerGraph", "GraphTooLarge", "kronecker_generate", "write_edge_list",
    "BfsTree", "BfsProfiles", "VertexPartition", "bfs_profile", "bfs_traverse",
    "select_root", "KernelSpec", "Scaling", "analytic_profile", "gups_profile",
    "offnode_neighbor_faces", "simulate_gups_locality",
]
