"""Boundary knot method: boundary-only, integration-free meshless PDE solver."""
from .bench_cases import BenchmarkCase, CaseResult, all_cases, get_case, run_case
from .geometry import EllipseDomain, InteriorLayout, Knot, Ring, Role, boundary_knots, interior_knots
from .rbf import RbfPair, alt_rbf_pairs, mq_pair
from .solver import (
    BkmSolution,
    CoupledDRM,
    FirstOrderOperator,
    Helmholtz,
    KnownRhsDRM,
    ProblemSpec,
    ResponseKernel,
    SingularSystemError,
    solve,
    solve_coupled_picard,
)

__all__ = [
    "BenchmarkCase", "CaseResult", "all_cases", "get_case", "run_case",
    "EllipseDomain", "InteriorLayout", "Knot", "Ring", "Role", "boundary_knots", "interior_knots",
    "RbfPair", "alt_rbf_pairs", "mq_pair",
    "BkmSolution", "CoupledDRM", "FirstOrderOperator", "Helmholtz", "KnownRhsDRM", "ProblemSpec",
    "ResponseKernel", "SingularSystemError", "solve", "solve_coupled_picard",
]
