"""MaxVar: partition, friend-of-friend augmentation, degree-constrained QP."""
from .partition import PartitionPlan, load_partition, partition_graph, save_partition
from .pipeline import MaxVarResult, maxvar, run_maxvar, split_budget
from .potential import AugmentedSubgraph, add_potential_edges
from .qp import QPSolution, solve_degree_qp, solve_qp, tv_upper_bound_maxvar

__all__ = [
    "PartitionPlan", "load_partition", "partition_graph", "save_partition", "MaxVarResult",
    "maxvar", "run_maxvar", "split_budget", "AugmentedSubgraph", "add_potential_edges",
    "QPSolution", "solve_degree_qp", "solve_qp", "tv_upper_bound_maxvar",
]
