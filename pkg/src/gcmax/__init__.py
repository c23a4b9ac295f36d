"""Exact tools for the maximum theorem on (op, p, q)-convex functions over finite magmas."""
from .certificate import (Certificate, PreconditionError, SimplexPoint, Witness, check_max_nonneg,
                          check_nf_condition, helly_check, lambda_polytope, solve_lp, solve_recursive,
                          solve_two, verify_certificate, verify_witness)
from .convexity import Violation, check_convexity, fn_add, fn_max, fn_scale, is_convex
from .core import (ConvexityParams, Fn, Instance, InstanceError, Magma, Rational, format_rational,
                   parse_instance, parse_rational, serialize_instance)
from .kkt import KktResult, kkt_multipliers, kkt_verify_converse, solve_mp_bruteforce
from .opcalc import Base, Compose, OpTerm, Swap, parse_term, ratio, realize, synthesize_ratio

__version__ = "0.1.0"
