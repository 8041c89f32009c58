"""Anonymization schemes that turn a graph into an uncertain graph."""
from .estimators import (
    EdgeSwitch,
    KObfuscation,
    MaxVar,
    Mixture,
    Partitioned,
    RandWalk,
    RandWalkMod,
    expected_degree_error,
    make_scheme,
)
from .mixture import mixture, partition_combinator
from .obfuscation import (
    ColumnEntropy,
    TruncatedNormal,
    kobf_epsilon,
    obfuscate_kobf,
    sample_truncated_normal,
    truncated_normal_moments,
)
from .randwalk import edge_adding_matrix, randwalk, randwalk_matrix, randwalk_mod, tv_upper_bound_rw
from .switch import apply_switch, edge_switch

__all__ = [
    "EdgeSwitch", "KObfuscation", "MaxVar", "Mixture", "Partitioned", "RandWalk", "RandWalkMod",
    "expected_degree_error", "make_scheme", "mixture", "partition_combinator", "ColumnEntropy",
    "TruncatedNormal", "kobf_epsilon", "obfuscate_kobf", "sample_truncated_normal",
    "truncated_normal_moments", "edge_adding_matrix", "randwalk", "randwalk_matrix",
    "randwalk_mod", "tv_upper_bound_rw", "apply_switch", "edge_switch",
]
