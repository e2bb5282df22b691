"""Shifted Gegenbauer pseudospectral solver for the 1D telegraph equation."""

from sgpm.gegenbauer import GegenbauerBasis, NodeSet, gauss_nodes, shift_nodeset
from sgpm.interpolation import forward_transform_1d, forward_transform_2d
from sgpm.quadrature import build_optimal_smatrix, build_smatrix, optimize_alpha
from sgpm.telegraph import TelegraphProblem, discretize, solve_problem

__all__ = [
    "GegenbauerBasis",
    "NodeSet",
    "TelegraphProblem",
    "build_optimal_smatrix",
    "build_smatrix",
    "discretize",
    "forward_transform_1d",
    "forward_transform_2d",
    "gauss_nodes",
    "optimize_alpha",
    "shift_nodeset",
    "solve_problem",
]
