"""Graph anonymization through uncertain graphs.

The package converts a deterministic graph into an uncertain graph (edges
with independent existence probabilities) with one of several schemes, and
scores the result for re-identification risk and structural utility.
"""
from .graph import (
    DegreeDistribution,
    Graph,
    UncertainGraph,
    degree_distribution,
    enumerate_worlds,
    load_edge_list,
    load_uncertain,
    poisson_binomial_pmf,
    sample_world,
    save_edge_list,
    save_uncertain,
    total_variance,
    world_probability,
)
from .rng import RngStream
from .schemes import (
    EdgeSwitch,
    KObfuscation,
    MaxVar,
    Mixture,
    Partitioned,
    RandWalk,
    RandWalkMod,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeDistribution", "Graph", "UncertainGraph", "degree_distribution", "enumerate_worlds",
    "load_edge_list", "load_uncertain", "poisson_binomial_pmf", "sample_world", "save_edge_list",
    "save_uncertain", "total_variance", "world_probability", "RngStream", "EdgeSwitch",
    "KObfuscation", "MaxVar", "Mixture", "Partitioned", "RandWalk", "RandWalkMod", "__version__",
]
