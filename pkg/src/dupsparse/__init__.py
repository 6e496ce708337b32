"""Distributed spanners, spectral sparsification and clustering under edge duplication."""
from .cluster import (ClusterQuality, distributed_cluster, match_and_score,
                      spectral_clustering)
from .comm import (AdversarialOverlap, Charge, CostMeter, DistributedGraph, Model,
                   PartitionPolicy, UniformIID, distribute, edge_bits)
from .graph import (Graph, Partition, conductance, effective_resistance, gen_sbm,
                    gen_unit_random, gen_weighted_random, girth, hop_distance_bounded, laplacian,
                    normalized_laplacian, volume, weighted_distance)
from .kernels import BACKEND
from .sparsifier import light_ss, solve_site_prob, spectral_sparsify
from .spanner import (bfs_blackboard, plus2_spanner, project_spanner, spanner_dup,
                      split_duplication, t_bundle)
from .verify import (check_conductance_preservation, check_resistance_bound,
                     check_spectral_sparsifier, check_stretch, path_stretch)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AdversarialOverlap", "Charge", "ClusterQuality", "CostMeter",
    "DistributedGraph", "Graph", "Model", "Partition", "PartitionPolicy", "UniformIID",
    "bfs_blackboard", "check_conductance_preservation", "check_resistance_bound",
    "check_spectral_sparsifier", "check_stretch", "conductance", "distribute",
    "distributed_cluster", "edge_bits", "effective_resistance", "gen_sbm", "gen_unit_random",
    "gen_weighted_random", "girth", "hop_distance_bounded", "laplacian", "light_ss",
    "match_and_score", "normalized_laplacian", "path_stretch", "plus2_spanner",
    "project_spanner", "solve_site_prob", "spanner_dup", "spectral_clustering",
    "spectral_sparsify", "split_duplication", "t_bundle", "volume", "weighted_distance",
]
