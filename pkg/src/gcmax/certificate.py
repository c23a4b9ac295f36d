"""Nonnegative convex combinations of a function family.

Given f_1..f_n on a finite set, find lambda in the simplex S_n with
sum_i lambda_i f_i(x) >= 0 for every x, or prove that none exists. Three
solvers are provided (exact LP, the two-function interval method, and the
inductive construction over convex families) along with the tuple condition
and Helly-subfamily diagnostics that characterize feasibility.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from .convexity import check_convexity, fn_combine, fn_max
from .core import ConvexityParams, Fn, Magma, SizeMismatch, check_sizes, format_rational
from .lp import maximin

FEASIBLE, INFEASIBLE = "feasible", "infeasible"
_ZERO, _ONE = Fraction(0), Fraction(1)


class PreconditionError(ValueError):
    """Inputs fall outside the hypotheses an operation relies on."""


@dataclass(frozen=True)
class SimplexPoint:
    lam: tuple[Fraction, ...]

    def __post_init__(self):
        lam = tuple(Fraction(v) for v in self.lam)
        object.__setattr__(self, "lam", lam)
        if not lam:
            raise ValueError("empty simplex point")
        if any(v < 0 for v in lam):
            raise ValueError(f"negative weight in {[format_rational(v) for v in lam]}")
        if sum(lam, _ZERO) != 1:
            raise ValueError(f"weights sum to {format_rational(sum(lam, _ZERO))}, not 1")

    def __len__(self):
        return len(self.lam)

    def __iter__(self):
        return iter(self.lam)

    def __getitem__(self, i):
        return self.lam[i]


@dataclass(frozen=True)
class Witness:
    """Why no certificate exists.

    ``weights`` (when present) is a probability vector on ``elements`` with
    max_i sum_x w_x f_i(x) = ``value`` < 0; averaging any combination over
    these weights is then negative, so some element breaks it.
    """

    elements: tuple[int, ...]
    weights: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


@dataclass(frozen=True)
class Certificate:
    status: str
    lam: SimplexPoint | None = None
    margin: Fraction | None = None
    witness: Witness | None = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.lam is not None:
            out["lambda"] = [format_rational(v) for v in self.lam]
        if self.margin is not None:
            out["margin"] = format_rational(self.margin)
        if self.witness is not None:
            w: dict = {"elements": list(self.witness.elements)}
            if self.witness.weights is not None:
                w["weights"] = [format_rational(v) for v in self.witness.weights]
            if self.witness.value is not None:
                w["value"] = format_rational(self.witness.value)
            out["witness"] = w
        return out


def combination(fns: Sequence[Fn], lam: Sequence) -> list[Fraction]:
    return list(fn_combine(list(lam), fns).values)


def verify_certificate(fns: Sequence[Fn], lam: SimplexPoint | Sequence) -> tuple[Fraction, bool]:
    """Return (min_x sum_i lam_i f_i(x), margin >= 0)."""
    check_sizes(fns)
    if not isinstance(lam, SimplexPoint):
        lam = SimplexPoint(tuple(lam))
    if len(lam) != len(fns):
        raise SizeMismatch(f"{len(lam)} weights for {len(fns)} functions")
    margin = min(combination(fns, lam.lam))
    return margin, margin >= 0


def verify_witness(fns: Sequence[Fn], witness: Witness) -> bool:
    """Check that ``witness`` really rules out every certificate."""
    m = check_sizes(fns)
    if witness.weights is not None:
        w = SimplexPoint(witness.weights)
        if len(w) != len(witness.elements):
            return False
        value = max(sum((wx * f[x] for wx, x in zip(w, witness.elements)), _ZERO) for f in fns)
        return value < 0 and (witness.value is None or witness.value == value)
    if not witness.elements or any(not 0 <= x < m for x in witness.elements):
        return False
    return not _restricted_value(fns, witness.elements) >= 0


def check_max_nonneg(fns: Sequence[Fn]) -> tuple[bool, int | None]:
    """True iff max_i f_i(x) >= 0 at every x; otherwise the first bad x."""
    m = check_sizes(fns)
    for x in range(m):
        if all(f[x] < 0 for f in fns):
            return False, x
    return True, None


def _restricted_value(fns: Sequence[Fn], elements: Sequence[int]) -> Fraction:
    M = [[f[x] for x in elements] for f in fns]
    return maximin(M).value


def solve_lp(fns: Sequence[Fn]) -> Certificate:
    """Maximize the uniform margin over S_n with an exact simplex.

    Feasible results carry the lexicographically greatest optimal lambda.
    Infeasible results carry the optimal dual weights over elements.
    """
    m = check_sizes(fns)
    M = [list(f.values) for f in fns]
    primal = maximin(M, lexmax=True)
    if primal.value >= 0:
        return Certificate(FEASIBLE, SimplexPoint(primal.strategy), primal.value)
    # dual: min over w in S_m of max_i sum_x w_x f_i(x), as a maximin of -f
    dual = maximin([[-f[x] for f in fns] for x in range(m)])
    if -dual.value != primal.value:  # pragma: no cover - strong duality
        raise RuntimeError(f"duality gap: primal {primal.value}, dual {-dual.value}")
    support = tuple(x for x in range(m) if dual.strategy[x] != 0)
    weights = tuple(dual.strategy[x] for x in support)
    return Certificate(INFEASIBLE, margin=primal.value, witness=Witness(support, weights, primal.value))


def lambda_interval(fx: Fraction, gx: Fraction) -> tuple[Fraction, Fraction] | None:
    """Solutions of lam*fx + (1-lam)*gx >= 0 within [0, 1], or None if empty."""
    d = fx - gx
    lo, hi = _ZERO, _ONE
    if d > 0:
        lo = max(lo, -gx / d)
    elif d < 0:
        hi = min(hi, gx / (gx - fx))
    elif gx < 0:
        return None
    return (lo, hi) if lo <= hi else None


def solve_two(f: Fn, g: Fn) -> Certificate:
    """Intersect the per-element intervals for lam in lam*f + (1-lam)*g >= 0.

    Among feasible lam the largest is returned (weight on ``f`` preferred).
    """
    m = check_sizes([f, g])
    lo, hi = _ZERO, _ONE
    lo_at = hi_at = None
    for x in range(m):
        iv = lambda_interval(f[x], g[x])
        if iv is None:
            return Certificate(INFEASIBLE, witness=Witness((x,)))
        if iv[0] > lo:
            lo, lo_at = iv[0], x
        if iv[1] < hi:
            hi, hi_at = iv[1], x
        if lo > hi:
            return Certificate(INFEASIBLE, witness=Witness(tuple(sorted({lo_at, hi_at}))))
    lam = SimplexPoint((hi, 1 - hi))
    return Certificate(FEASIBLE, lam, min(combination([f, g], lam.lam)))


def solve_recursive(fns: Sequence[Fn], magma: Magma, params: ConvexityParams) -> Certificate:
    """Inductive construction: peel off f_0 against g = max(f_1..f_n).

    Find lam for the pair (f_0, g) with :func:`solve_two`, then recurse on
    h_i = lam f_0 + (1-lam) f_i, whose maximum is lam f_0 + (1-lam) g >= 0.
    Multipliers (mu_1..mu_n) for the h_i combine to (lam, (1-lam) mu_1, ...).
    """
    check_sizes(fns, magma.size)
    for i, f in enumerate(fns):
        if check_convexity(magma, params.p, params.q, f):
            raise PreconditionError(f"function {i} ({f.name!r}) is not (op, p, q)-convex")
    ok, x = check_max_nonneg(fns)
    if not ok:
        raise PreconditionError(f"max of the family is negative at element {x}")
    lam = _induct(list(fns))
    margin = min(combination(fns, lam))
    return Certificate(FEASIBLE, SimplexPoint(tuple(lam)), margin)


def _induct(fns: list[Fn]) -> list[Fraction]:
    if len(fns) == 1:
        return [_ONE]
    f0, rest = fns[0], fns[1:]
    g = fn_max(rest)
    pair = solve_two(f0, g)
    if not pair.feasible:  # pragma: no cover - excluded by the two-function theorem
        raise RuntimeError("two-function step infeasible on a convex family")
    lam = pair.lam[0]
    hs = [fn_combine([lam, 1 - lam], [f0, fi], name=f"h{i}") for i, fi in enumerate(rest, 1)]
    mu = _induct(hs)
    return [lam] + [(1 - lam) * v for v in mu]


@dataclass(frozen=True)
class NfResult:
    holds: bool
    tuple_: tuple[int, ...] | None = None
    t: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def nf_inner_value(fns: Sequence[Fn], xs: Sequence[int]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """min over t in S_n of max_i sum_j t_j f_i(x_j), with an optimal t."""
    sol = maximin([[-f[x] for f in fns] for x in xs])
    return -sol.value, sol.strategy


def check_nf_condition(fns: Sequence[Fn]) -> NfResult:
    """Check the tuple condition over all n-tuples of elements.

    The inner value is symmetric under permuting (x_j, t_j) jointly, so only
    sorted tuples are solved; the first failing sorted tuple is also the first
    failing tuple in full product order.
    """
    m = check_sizes(fns)
    n = len(fns)
    for xs in combinations_with_replacement(range(m), n):
        value, t = nf_inner_value(fns, xs)
        if value < 0:
            return NfResult(False, tuple(xs), t, value)
    return NfResult(True)


@dataclass(frozen=True)
class LambdaPolytope:
    """{lam in S_n : sum_i lam_i coeffs[i] >= 0} for one element x."""

    x: int
    coeffs: tuple[Fraction, ...]

    def contains(self, lam: Sequence) -> bool:
        return sum((Fraction(l) * c for l, c in zip(lam, self.coeffs)), _ZERO) >= 0

    @property
    def is_empty(self) -> bool:
        # a linear form on S_n is maximized at a vertex
        return max(self.coeffs) < 0

    @property
    def is_whole_simplex(self) -> bool:
        return min(self.coeffs) >= 0

    def first_weight_interval(self) -> tuple[Fraction, Fraction] | None:
        """For n = 2, the allowed range of lam_1."""
        if len(self.coeffs) != 2:
            raise ValueError("interval form only exists for two functions")
        return lambda_interval(*self.coeffs)

    def to_dict(self) -> dict:
        return {
            "element": self.x,
            "halfspace": {"coefficients": [format_rational(c) for c in self.coeffs], "sense": ">=", "rhs": "0"},
            "simplex": True,
            "empty": self.is_empty,
            "redundant": self.is_whole_simplex,
        }

    def describe(self) -> str:
        if self.is_empty:
            return "empty"
        if self.is_whole_simplex:
            return "S_n"
        if len(self.coeffs) == 2:
            lo, hi = self.first_weight_interval()
            parts = []
            if lo > 0:
                parts.append(f"lambda_1 >= {format_rational(lo)}")
            if hi < 1:
                parts.append(f"lambda_1 <= {format_rational(hi)}")
            return " and ".join(parts)
        terms = " + ".join(f"{format_rational(c)}*lambda_{i + 1}" for i, c in enumerate(self.coeffs))
        return f"{terms} >= 0"


def lambda_polytope(fns: Sequence[Fn], x: int) -> LambdaPolytope:
    m = check_sizes(fns)
    if not 0 <= x < m:
        raise IndexError(f"element {x} out of range [0, {m})")
    return LambdaPolytope(x, tuple(f[x] for f in fns))


@dataclass(frozen=True)
class HellyResult:
    holds: bool
    subset: tuple[int, ...] | None = None
    value: Fraction | None = None


def helly_check(fns: Sequence[Fn]) -> HellyResult:
    """Check that every n-element set of the Lambda_x has a common point.

    Each Lambda_x lives in the (n-1)-dimensional affine hull of S_n, so
    n-subfamilies decide the whole intersection.
    """
    m = check_sizes(fns)
    k = min(len(fns), m)
    for subset in combinations(range(m), k):
        value = _restricted_value(fns, subset)
        if value < 0:
            return HellyResult(False, subset, value)
    return HellyResult(True)
