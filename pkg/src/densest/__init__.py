"""Densest subgraph and dense decomposition solvers.

Multiplicative weights and an area-convex saddle-point method for the densest
subgraph LP, accelerated and plain random coordinate descent for the load
quadratic behind the dense decomposition, rounding procedures, brute-force
oracles, greedy baselines and a benchmark harness.
"""

from .area_convexity import ac_densest, recover_primal_ac, sherman_solve, solve_with_binary_search
from .baselines import greedy_peel, greedy_pp
from .decomposition import acdm, acdm_practical, fractional_peel, rcdm
from .fixtures import make_fixture
from .graph import (
    Decomposition,
    DensityValue,
    EdgeListError,
    Graph,
    brute_force_decomposition,
    brute_force_densest,
    density,
    parse_edge_list,
    read_edge_list,
    write_edge_list,
)
from .mwu import mwu_solve, solve_weighted_lp
from .rounding import charikar_sweep, construct_primal

__version__ = "0.1.0"

__all__ = [
    "Graph", "DensityValue", "Decomposition", "EdgeListError", "parse_edge_list", "read_edge_list",
    "write_edge_list", "density", "brute_force_densest", "brute_force_decomposition", "mwu_solve",
    "solve_weighted_lp", "construct_primal", "charikar_sweep", "sherman_solve", "solve_with_binary_search",
    "recover_primal_ac", "ac_densest", "rcdm", "acdm", "acdm_practical", "fractional_peel", "greedy_peel",
    "greedy_pp", "make_fixture",
]
