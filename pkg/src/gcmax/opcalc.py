"""Derived binary operations and their convexity coefficients.

A term is built from the base operation with two constructors:

* ``Swap(t)`` realizes ``(x, y) -> t(y, x)``; coefficients ``(a, b) -> (b, a)``.
* ``Compose(s, t)`` realizes ``(x, y) -> t(s(x, y), s(y, y))``; if ``s`` carries
  ``(a, b)`` and ``t`` carries ``(c, d)`` the result carries
  ``(a*c, b*c + a*d + b*d)``.

Every (base, p, q)-convex function is (realize(t), a_t, b_t)-convex, and the
ratio ``a/(a+b)`` is complemented by Swap and multiplied by Compose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .convexity import is_convex
from .core import ConvexityParams, Fn, Magma


class DepthExceeded(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OpTerm:
    a: Fraction = field(init=False)
    b: Fraction = field(init=False)
    depth: int = field(init=False)

    @property
    def coefficients(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def __str__(self) -> str:
        return format_term(self)

    def __eq__(self, other):
        return isinstance(other, OpTerm) and format_term(self) == format_term(other) and \
            self.coefficients == other.coefficients

    def __hash__(self):
        return hash((format_term(self), self.a, self.b))


@dataclass(frozen=True, eq=False)
class Base(OpTerm):
    p: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.p))
        object.__setattr__(self, "b", Fraction(self.q))
        object.__setattr__(self, "depth", 1)

    @classmethod
    def of(cls, params: ConvexityParams) -> "Base":
        return cls(params.p, params.q)


@dataclass(frozen=True, eq=False)
class Swap(OpTerm):
    child: OpTerm

    def __post_init__(self):
        object.__setattr__(self, "a", self.child.b)
        object.__setattr__(self, "b", self.child.a)
        object.__setattr__(self, "depth", self.child.depth + 1)


@dataclass(frozen=True, eq=False)
class Compose(OpTerm):
    left: OpTerm   # plays the role of *
    right: OpTerm  # plays the role of the outer operation

    def __post_init__(self):
        a, b = self.left.a, self.left.b
        c, d = self.right.a, self.right.b
        object.__setattr__(self, "a", a * c)
        object.__setattr__(self, "b", b * c + a * d + b * d)
        object.__setattr__(self, "depth", max(self.left.depth, self.right.depth) + 1)


def ratio(term: OpTerm) -> Fraction:
    return term.a / (term.a + term.b)


def format_term(term: OpTerm) -> str:
    if isinstance(term, Base):
        return "base"
    if isinstance(term, Swap):
        return f"swap({format_term(term.child)})"
    if isinstance(term, Compose):
        return f"compose({format_term(term.left)},{format_term(term.right)})"
    raise TypeError(f"not a term: {term!r}")


def parse_term(text: str, params: ConvexityParams) -> OpTerm:
    """Parse ``base | swap(T) | compose(T,T)``; whitespace is ignored."""
    src = "".join(text.split())
    base = Base.of(params)
    pos = 0

    def expect(tok: str):
        nonlocal pos
        if not src.startswith(tok, pos):
            raise ValueError(f"expected {tok!r} at offset {pos} in {text!r}")
        pos += len(tok)

    def term() -> OpTerm:
        nonlocal pos
        if src.startswith("base", pos):
            pos += 4
            return base
        if src.startswith("swap(", pos):
            pos += 5
            child = term()
            expect(")")
            return Swap(child)
        if src.startswith("compose(", pos):
            pos += 8
            left = term()
            expect(",")
            right = term()
            expect(")")
            return Compose(left, right)
        raise ValueError(f"unexpected input at offset {pos} in {text!r}")

    out = term()
    if pos != len(src):
        raise ValueError(f"trailing input at offset {pos} in {text!r}")
    return out


def realize_table(term: OpTerm, magma: Magma) -> tuple[tuple[int, ...], ...]:
    m = magma.size
    memo: dict[int, tuple] = {}

    def go(t: OpTerm):
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Base):
            tab = magma.op_table
        elif isinstance(t, Swap):
            c = go(t.child)
            tab = tuple(tuple(c[y][x] for y in range(m)) for x in range(m))
        else:
            s, u = go(t.left), go(t.right)
            tab = tuple(tuple(u[s[x][y]][s[y][y]] for y in range(m)) for x in range(m))
        memo[key] = tab
        return tab

    return go(term)


@dataclass(frozen=True)
class RealizedOp:
    op_table: tuple[tuple[int, ...], ...]
    a: Fraction
    b: Fraction

    @property
    def magma(self) -> Magma:
        return Magma(self.op_table)


def realize(term: OpTerm, magma: Magma) -> RealizedOp:
    return RealizedOp(realize_table(term, magma), term.a, term.b)


def power_term(term: OpTerm, k: int) -> OpTerm:
    """Left-fold Compose of ``term`` with itself: ratio(term)**k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = term
    for _ in range(k - 1):
        out = Compose(out, term)
    return out


def synthesize_ratio(params: ConvexityParams, lo, hi, max_depth: int | None = None) -> OpTerm:
    """Build a term whose ratio lies in ``[lo, hi]`` for any ``0 < lo <= hi < 1``.

    Pick the smallest k with ``s = 1 - s0**k > lo/hi`` (s0 the base ratio), then
    the smallest n with ``s**n <= hi``; minimality of n forces ``s**n > lo``.
    Only exact multiplication and comparison are used.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not (0 < lo <= hi < 1):
        raise ValueError(f"need 0 < lo <= hi < 1, got [{lo}, {hi}]")
    base = Base.of(params)
    s0 = ratio(base)
    if lo <= s0 <= hi:
        return base
    if lo == hi:
        return _exact_ratio_search(params, lo, min(max_depth or POINT_SEARCH_DEPTH, POINT_SEARCH_DEPTH))
    target = lo / hi
    k, pw = 1, s0
    while 1 - pw <= target:
        k += 1
        pw *= s0
    s = 1 - pw
    n, sn = 1, s
    while sn > hi:
        n += 1
        sn *= s
    # depth: power chain k, +1 for swap, then n-1 compose levels
    depth = k + 1 + (n - 1)
    if max_depth is not None and depth > max_depth:
        raise DepthExceeded(f"synthesized term would have depth {depth} > {max_depth} (k={k}, n={n})")
    return power_term(Swap(power_term(base, k)), n)


POINT_SEARCH_DEPTH = 5


def _exact_ratio_search(params: ConvexityParams, target: Fraction, max_depth: int) -> OpTerm:
    # a degenerate interval leaves no room for the power argument (it needs
    # s > lo/hi = 1), so look for the target among all shallow terms instead
    fam = term_family(max_depth)
    A, B, _ = family_coefficients(fam, params)
    for k in range(len(fam)):
        if Fraction(A[k], A[k] + B[k]) == target:
            return fam.term(k, params)
    raise DepthExceeded(f"no term of depth <= {max_depth} has ratio exactly {target}")


def transports_convexity(term: OpTerm, magma: Magma, f: Fn) -> bool:
    return is_convex(realize_table(term, magma), term.a, term.b, f)


# -- batch enumeration of every term up to a given depth ---------------------

BASE, SWAP, COMPOSE = 0, 1, 2


@dataclass(frozen=True)
class TermFamily:
    """All distinct terms of depth <= max_depth as flat arrays, ordered by depth.

    Base has depth 1, so depths 1..5 give 1, 3, 13, 183, 33673 terms cumulatively.
    """

    kind: np.ndarray
    left: np.ndarray   # child for SWAP, left child for COMPOSE
    right: np.ndarray
    depth: np.ndarray
    leaves: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.kind)

    def level(self, d: int) -> np.ndarray:
        return np.flatnonzero(self.depth == d)

    def term(self, k: int, params: ConvexityParams) -> OpTerm:
        return self.terms(params, [k])[0]

    def terms(self, params: ConvexityParams, indices: Sequence[int] | None = None) -> list[OpTerm]:
        built: dict[int, OpTerm] = {}
        base = Base.of(params)

        def go(k: int) -> OpTerm:
            if k in built:
                return built[k]
            kind = self.kind[k]
            if kind == BASE:
                t = base
            elif kind == SWAP:
                t = Swap(go(int(self.left[k])))
            else:
                t = Compose(go(int(self.left[k])), go(int(self.right[k])))
            built[k] = t
            return t

        idx = range(len(self)) if indices is None else indices
        return [go(int(k)) for k in idx]


@lru_cache(maxsize=None)
def term_family(max_depth: int) -> TermFamily:
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    kind, left, right, depth, leaves = [BASE], [-1], [-1], [1], [1]
    for d in range(2, max_depth + 1):
        prev = [k for k in range(len(kind)) if depth[k] == d - 1]
        older = [k for k in range(len(kind)) if depth[k] < d - 1]
        for k in prev:
            kind.append(SWAP); left.append(k); right.append(-1); depth.append(d); leaves.append(leaves[k])
        pairs = [(s, t) for s in prev for t in prev + older] + [(s, t) for s in older for t in prev]
        for s, t in sorted(pairs):
            kind.append(COMPOSE); left.append(s); right.append(t); depth.append(d)
            leaves.append(leaves[s] + leaves[t])
    return TermFamily(np.array(kind, dtype=np.int8), np.array(left, dtype=np.int64),
                      np.array(right, dtype=np.int64), np.array(depth, dtype=np.int16), tuple(leaves))


def realize_family(fam: TermFamily, magma: Magma, use_numba: bool | None = None) -> np.ndarray:
    """Tables of every term in ``fam`` as an int64 array of shape (K, m, m)."""
    m = magma.size
    out = np.empty((len(fam), m, m), dtype=np.int64)
    out[0] = np.array(magma.op_table, dtype=np.int64)
    for d in range(2, int(fam.depth.max()) + 1):
        idx = fam.level(d)
        sw = idx[fam.kind[idx] == SWAP]
        out[sw] = out[fam.left[sw]].transpose(0, 2, 1)
        co = idx[fam.kind[idx] == COMPOSE]
        if len(co):
            out[co] = _kernels.compose_tables(out, fam.left[co], fam.right[co], use_numba)
    return out


def family_coefficients(fam: TermFamily, params: ConvexityParams) -> tuple[list[int], list[int], list[int]]:
    """Integer (A, B, D) per term with (a, b) = (A/D, B/D).

    Writing p = P/E and q = Q/E, every coefficient of a term with l leaves is a
    homogeneous degree-l polynomial in (p, q), so D = E**l is shared by a and b.
    """
    E = math.lcm(params.p.denominator, params.q.denominator)
    P, Q = int(params.p * E), int(params.q * E)
    A, B = [P], [Q]
    for k in range(1, len(fam)):
        if fam.kind[k] == SWAP:
            c = fam.left[k]
            A.append(B[c]); B.append(A[c])
        else:
            s, t = fam.left[k], fam.right[k]
            a, b, c, d = A[s], B[s], A[t], B[t]
            A.append(a * c); B.append(b * c + a * d + b * d)
    D = [E ** l for l in fam.leaves]
    return A, B, D


def integer_arrays(fam: TermFamily, params: ConvexityParams, f: Fn) -> list[np.ndarray]:
    """(F, A, B, D) scaled to integers; int64 when products stay below 2**62, Python ints otherwise."""
    A, B, D = family_coefficients(fam, params)
    L = math.lcm(*(v.denominator for v in f.values))
    F = [int(v * L) for v in f.values]
    bound = max(max(A), max(B), max(D)) * max(max(abs(v) for v in F), 1) * 4
    dtype = np.int64 if bound < 2 ** 62 else object
    return [np.array(v, dtype=dtype) for v in (F, A, B, D)]


def transport_failures(magma: Magma, params: ConvexityParams, f: Fn, max_depth: int = 5,
                       use_numba: bool | None = None) -> list[int]:
    """Indices of terms (in ``term_family(max_depth)``) under which ``f`` is not convex."""
    fam = term_family(max_depth)
    tables = realize_family(fam, magma, use_numba)
    counts = _kernels.violation_counts(tables, *integer_arrays(fam, params, f), use_numba=use_numba)
    return [int(k) for k in np.flatnonzero(np.asarray(counts) > 0)]
