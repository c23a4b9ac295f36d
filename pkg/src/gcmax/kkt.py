"""Multipliers for  minimize f_0  subject to  f_1, ..., f_n <= 0  on a finite magma."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .certificate import PreconditionError, SimplexPoint, check_max_nonneg, combination, solve_lp
from .convexity import check_convexity
from .core import ConvexityParams, Fn, Magma, SizeMismatch, check_sizes, format_rational


class ConverseInapplicable(ValueError):
    """The converse needs lambda_0 > 0."""


class DegenerateMultiplierWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KktResult:
    lam: SimplexPoint
    transversality_products: tuple[Fraction, ...]
    margin: Fraction
    minimizers: tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return self.lam[0] == 0

    def to_dict(self) -> dict:
        out = {
            "lambda": [format_rational(v) for v in self.lam],
            "transversality_products": [format_rational(v) for v in self.transversality_products],
            "el_margin": format_rational(self.margin),
            "minimizers": list(self.minimizers),
        }
        if self.degenerate:
            out["warning"] = "degenerate multiplier - converse inapplicable"
        return out


def admissible_set(constraints: Sequence[Fn], m: int) -> list[int]:
    return [x for x in range(m) if all(g[x] <= 0 for g in constraints)]


def solve_mp_bruteforce(f0: Fn, constraints: Sequence[Fn]) -> tuple[int, ...]:
    """All minimizers of f0 over the admissible set (empty if nothing is admissible)."""
    m = check_sizes([f0, *constraints])
    adm = admissible_set(constraints, m)
    if not adm:
        return ()
    best = min(f0[x] for x in adm)
    return tuple(x for x in adm if f0[x] == best)


def kkt_multipliers(f0: Fn, constraints: Sequence[Fn], x0: int, magma: Magma,
                    params: ConvexityParams) -> KktResult:
    fns = [f0, *constraints]
    m = check_sizes(fns, magma.size)
    if not 0 <= x0 < m:
        raise PreconditionError(f"x0={x0} is not an element of the magma")
    for i, f in enumerate(fns):
        if check_convexity(magma, params.p, params.q, f):
            raise PreconditionError(f"function {i} ({f.name!r}) is not (op, p, q)-convex")
    if f0[x0] != 0:
        raise PreconditionError(f"f0(x0) = {format_rational(f0[x0])}, must be 0")
    minimizers = solve_mp_bruteforce(f0, constraints)
    if x0 not in minimizers:
        raise PreconditionError(f"x0={x0} does not solve the problem; minimizers are {list(minimizers)}")

    ok, bad = check_max_nonneg(fns)
    if not ok:  # pragma: no cover - implied by minimality of x0
        raise RuntimeError(f"max(f0..fn) negative at {bad} although x0 is a minimizer")
    cert = solve_lp(fns)
    if not cert.feasible:  # pragma: no cover - the maximum theorem rules this out
        raise RuntimeError("no multipliers found for a convex problem")
    lam = cert.lam
    products = tuple(lam[i] * fns[i][x0] for i in range(1, len(fns)))
    if any(v != 0 for v in products):  # pragma: no cover - forced by EL at x0
        raise RuntimeError(f"transversality failed: {products}")
    result = KktResult(lam, products, cert.margin, minimizers)
    if result.degenerate:
        warnings.warn("degenerate multiplier - converse inapplicable", DegenerateMultiplierWarning, stacklevel=2)
    return result


def kkt_verify_converse(f0: Fn, constraints: Sequence[Fn], x0: int, lam: SimplexPoint | Sequence) -> bool:
    """True iff transversality and the Euler-Lagrange inequality hold for ``lam``.

    When they do, x0 is also checked against brute force; a mismatch would
    contradict the theorem and raises RuntimeError.
    """
    fns = [f0, *constraints]
    m = check_sizes(fns)
    if not isinstance(lam, SimplexPoint):
        lam = SimplexPoint(tuple(lam))
    if len(lam) != len(fns):
        raise SizeMismatch(f"{len(lam)} multipliers for {len(fns)} functions")
    if not 0 <= x0 < m:
        raise IndexError(f"x0={x0} out of range")
    if lam[0] == 0:
        raise ConverseInapplicable("lambda_0 = 0: converse not applicable")
    if f0[x0] != 0:
        raise PreconditionError(f"f0(x0) = {format_rational(f0[x0])}, must be 0")
    if any(g[x0] > 0 for g in constraints):
        raise PreconditionError(f"x0={x0} is not admissible")
    tr = all(lam[i] * fns[i][x0] == 0 for i in range(1, len(fns)))
    el = min(combination(fns, lam.lam)) >= 0
    if tr and el:
        if x0 not in solve_mp_bruteforce(f0, constraints):
            raise RuntimeError(f"TR and EL hold but x0={x0} is not a minimizer")
    return tr and el
