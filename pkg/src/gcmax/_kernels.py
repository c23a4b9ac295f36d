"""Integer kernels for batch term realization and convexity scans.

Two interchangeable backends operate on int64 arrays: numba-compiled loops and
plain numpy broadcasting. Set ``GCMAX_NO_NUMBA=1`` to force numpy. Arrays of
dtype ``object`` (Python ints, used when int64 could overflow) always take the
numpy path, so results stay exact either way.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

USE_NUMBA = njit is not None and os.environ.get("GCMAX_NO_NUMBA", "") not in ("1", "true", "yes")


def compose_tables_numpy(tables, left, right):
    """out[k, x, y] = tables[right[k]][ s[x, y], s[y, y] ] with s = tables[left[k]]."""
    s = tables[left]
    m = tables.shape[1]
    diag = s[:, np.arange(m), np.arange(m)]
    return tables[right[:, None, None], s, diag[:, None, :]]


def violation_counts_numpy(tables, F, A, B, D):
    """Per term k, count pairs with D[k] F[T_k(x,y)] > A[k] F[x] + B[k] F[y]."""
    lhs = D[:, None, None] * F[tables]
    rhs = A[:, None, None] * F[None, :, None] + B[:, None, None] * F[None, None, :]
    return (lhs > rhs).sum(axis=(1, 2))


if njit is not None:

    @njit(cache=True)
    def _compose_tables_jit(tables, left, right):
        P = left.shape[0]
        m = tables.shape[1]
        out = np.empty((P, m, m), dtype=tables.dtype)
        for k in range(P):
            s = tables[left[k]]
            t = tables[right[k]]
            for x in range(m):
                for y in range(m):
                    out[k, x, y] = t[s[x, y], s[y, y]]
        return out

    @njit(cache=True)
    def _violation_counts_jit(tables, F, A, B, D):
        K = tables.shape[0]
        m = tables.shape[1]
        out = np.zeros(K, dtype=np.int64)
        for k in range(K):
            c = 0
            for x in range(m):
                ax = A[k] * F[x]
                for y in range(m):
                    if D[k] * F[tables[k, x, y]] > ax + B[k] * F[y]:
                        c += 1
            out[k] = c
        return out


def compose_tables(tables, left, right, use_numba: bool | None = None):
    if use_numba is None:
        use_numba = USE_NUMBA
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if use_numba and njit is not None and len(left):
        return _compose_tables_jit(tables, left, right)
    return compose_tables_numpy(tables, left, right)


def violation_counts(tables, F, A, B, D, use_numba: bool | None = None):
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and njit is not None and F.dtype == np.int64 and A.dtype == np.int64:
        return _violation_counts_jit(tables, F, A, B, D)
    return violation_counts_numpy(tables, F, A, B, D)
