"""Dense two-phase simplex over Fractions with Bland's rule.

Solves ``maximize c.x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, x >= 0`` exactly.
Sizes in this package are tiny (tens of rows), so a full tableau is fine.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

_ZERO = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    fun: Fraction | None = None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, j: int) -> None:
    row = T[r]
    piv = row[j]
    if piv != 1:
        T[r] = row = [v / piv for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[j]
            if f:
                T[i] = [u - f * v for u, v in zip(other, row)]
    basis[r] = j


def _simplex(T, basis, cost, allowed: int) -> str:
    """Maximize cost over the canonical tableau T (last column = rhs).

    Only columns < ``allowed`` may enter. Bland: lowest entering index, ties in
    the ratio test go to the lowest basic index.
    """
    while True:
        cb = [cost[b] for b in basis]
        entering = -1
        for j in range(allowed):
            rc = cost[j] - sum((c * row[j] for c, row in zip(cb, T) if c), _ZERO)
            if rc > 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        best = None
        for i, row in enumerate(T):
            a = row[entering]
            if a > 0:
                key = (row[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], entering)


def linprog_max(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    n = len(c)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_slack = len(A_ub)
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [_ZERO] * n_slack
        slack[k] = Fraction(1)
        rows.append([Fraction(v) for v in a] + slack)
        rhs.append(Fraction(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([Fraction(v) for v in a] + [_ZERO] * n_slack)
        rhs.append(Fraction(b))
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    N = n + n_slack
    R = len(rows)
    if R == 0:
        if any(Fraction(v) > 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, tuple(_ZERO for _ in range(n)), _ZERO)

    # phase 1: one artificial per row
    T = []
    for i in range(R):
        art = [_ZERO] * R
        art[i] = Fraction(1)
        T.append(rows[i] + art + [rhs[i]])
    basis = list(range(N, N + R))
    cost1 = [_ZERO] * N + [Fraction(-1)] * R
    _simplex(T, basis, cost1, N + R)
    if sum((T[i][-1] for i in range(R) if basis[i] >= N), _ZERO) > 0:
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis; drop rows that are redundant
    i = 0
    while i < len(T):
        if basis[i] >= N:
            j = next((j for j in range(N) if T[i][j] != 0), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, j)
        i += 1
    T = [row[:N] + [row[-1]] for row in T]

    cost2 = [Fraction(v) for v in c] + [_ZERO] * n_slack
    status = _simplex(T, basis, cost2, N)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [_ZERO] * N
    for i, b in enumerate(basis):
        x[b] = T[i][-1]
    fun = sum((cv * xv for cv, xv in zip(cost2, x)), _ZERO)
    return LPResult(OPTIMAL, tuple(x[:n]), fun)


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    strategy: tuple[Fraction, ...]


def maximin(M: Sequence[Sequence[Fraction]], lexmax: bool = False) -> GameSolution:
    """Solve max over w in the simplex of min_j sum_i w_i M[i][j].

    With ``lexmax`` the returned ``w`` is the lexicographically greatest among
    all optimal strategies (found by fixing coordinates one at a time).
    """
    k = len(M)
    cols = len(M[0]) if k else 0
    if k == 0 or cols == 0:
        raise ValueError("empty game matrix")
    # variables: w_0..w_{k-1}, u, v with value = u - v
    c = [_ZERO] * k + [Fraction(1), Fraction(-1)]
    A_ub = [[-Fraction(M[i][j]) for i in range(k)] + [Fraction(1), Fraction(-1)] for j in range(cols)]
    b_ub = [_ZERO] * cols
    simplex_row = [Fraction(1)] * k + [_ZERO, _ZERO]
    res = linprog_max(c, A_ub, b_ub, [simplex_row], [Fraction(1)])
    if res.status != OPTIMAL:  # pragma: no cover - the game LP is always feasible and bounded
        raise RuntimeError(f"matrix game LP returned {res.status}")
    value = res.fun
    w = list(res.x[:k])
    if lexmax and k > 1:
        # feasible set of optimal strategies: sum_i w_i M[i][j] >= value, w in simplex
        A_opt = [[-Fraction(M[i][j]) for i in range(k)] for j in range(cols)]
        b_opt = [-value] * cols
        fixed: list[Fraction] = []
        for i in range(k - 1):
            obj = [_ZERO] * k
            obj[i] = Fraction(1)
            A_eq = [[Fraction(1)] * k]
            b_eq = [Fraction(1)]
            for j, val in enumerate(fixed):
                row = [_ZERO] * k
                row[j] = Fraction(1)
                A_eq.append(row)
                b_eq.append(val)
            r = linprog_max(obj, A_opt, b_opt, A_eq, b_eq)
            if r.status != OPTIMAL:  # pragma: no cover
                raise RuntimeError(f"lexicographic stage {i} returned {r.status}")
            fixed.append(r.fun)
        w = fixed + [1 - sum(fixed, _ZERO)]
    return GameSolution(value, tuple(w))
