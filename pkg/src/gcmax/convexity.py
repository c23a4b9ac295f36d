"""Deciding f(x o y) <= a f(x) + b f(y) on a finite magma, and the closure operations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Fn, Magma, SizeMismatch, check_sizes

Table = Sequence[Sequence[int]]


@dataclass(frozen=True)
class Violation:
    x: int
    y: int
    lhs: Fraction  # f(x o y)
    rhs: Fraction  # a f(x) + b f(y)


def _table(op: Magma | Table) -> Table:
    return op.op_table if isinstance(op, Magma) else op


def check_convexity(op: Magma | Table, a, b, f: Fn | Sequence) -> list[Violation]:
    """Scan all ordered pairs and return every violation in row-major order.

    An empty list means ``f`` is (op, a, b)-convex.
    """
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise ValueError("coefficients must be positive")
    table = _table(op)
    vals = f.values if isinstance(f, Fn) else tuple(Fraction(v) for v in f)
    m = len(table)
    if len(vals) != m or any(len(row) != m for row in table):
        raise SizeMismatch(f"table is {m}x?, function has {len(vals)} values")
    out = []
    for x, row in enumerate(table):
        ax = a * vals[x]
        for y, z in enumerate(row):
            rhs = ax + b * vals[y]
            if vals[z] > rhs:
                out.append(Violation(x, y, vals[z], rhs))
    return out


def is_convex(op: Magma | Table, a, b, f: Fn | Sequence) -> bool:
    a, b = Fraction(a), Fraction(b)
    table = _table(op)
    vals = f.values if isinstance(f, Fn) else tuple(Fraction(v) for v in f)
    if len(vals) != len(table):
        raise SizeMismatch(f"table has {len(table)} rows, function has {len(vals)} values")
    for x, row in enumerate(table):
        ax = a * vals[x]
        for y, z in enumerate(row):
            if vals[z] > ax + b * vals[y]:
                return False
    return True


def fn_add(f: Fn, g: Fn, name: str | None = None) -> Fn:
    check_sizes([f, g])
    return Fn(name or f"({f.name}+{g.name})", tuple(u + v for u, v in zip(f, g)))


def fn_scale(c, f: Fn, name: str | None = None) -> Fn:
    c = Fraction(c)
    if c <= 0:
        raise ValueError(f"scale factor must be positive, got {c}")
    return Fn(name or f"{c}*{f.name}", tuple(c * v for v in f))


def fn_max(fs: Sequence[Fn], name: str | None = None) -> Fn:
    check_sizes(fs)
    return Fn(name or "max(" + ",".join(f.name for f in fs) + ")", tuple(max(col) for col in zip(*fs)))


def fn_combine(weights: Sequence, fs: Sequence[Fn], name: str = "combo") -> Fn:
    """Pointwise sum of w_i f_i; weights may be zero (unlike fn_scale)."""
    check_sizes(fs)
    if len(weights) != len(fs):
        raise SizeMismatch(f"{len(weights)} weights for {len(fs)} functions")
    ws = [Fraction(w) for w in weights]
    return Fn(name, tuple(sum((w * v for w, v in zip(ws, col)), Fraction(0)) for col in zip(*fs)))
