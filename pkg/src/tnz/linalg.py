"""Gaussian elimination over Gaussian rationals."""
from __future__ import annotations

from .core import ZERO, Scalar, as_scalar


def _copy(rows):
    return [[as_scalar(v) for v in r] for r in rows]


def row_echelon(rows):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = _copy(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def rank(rows) -> int:
    return len(row_echelon(rows)[1])


def solve(rows, rhs):
    """One exact solution of ``rows @ y = rhs`` (free variables set to 0), or None."""
    n_cols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = row_echelon(aug)
    if n_cols in pivots:
        return None
    y = [ZERO] * n_cols
    for i, c in enumerate(pivots):
        y[c] = m[i][n_cols]
    return y


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def conj_transpose(rows):
    return [[v.conjugate() for v in col] for col in zip(*rows)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(r, c)), Scalar(0)) for c in bt] for r in a]
