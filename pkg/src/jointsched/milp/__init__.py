"""Time-indexed joint MILP: builder, LP relaxation, branch-and-bound, and a brute-force oracle."""

from .brute import brute_force_schedule
from .instance import MilpInstance, MilpVar, VarGroup, build_milp, choose_delta, decode_plan, dump_instance, parse_instance
from .simplex import LpSolution, solve_bounded_lp
from .solver import BnbOptions, MilpSolution, branch_and_bound, solve_lp_relaxation

__all__ = [
    "BnbOptions",
    "LpSolution",
    "MilpInstance",
    "MilpSolution",
    "MilpVar",
    "VarGroup",
    "branch_and_bound",
    "brute_force_schedule",
    "build_milp",
    "choose_delta",
    "decode_plan",
    "dump_instance",
    "parse_instance",
    "solve_bounded_lp",
    "solve_lp_relaxation",
]
