"""Exact linear algebra over Q and Z used across the package."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exact import Polynomial


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by plain row reduction (no valuation pivoting)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank][col]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                factor = mat[r][col] / p
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def coefficient_matrix(polys: Sequence[Polynomial]) -> tuple[list, list]:
    """Rows of coefficients over the sorted union of supports."""
    support = sorted({e for f in polys for e in f.support()})
    return [[f.coefficient(e) for e in support] for f in polys], support


def polynomial_rank(polys: Sequence[Polynomial]) -> int:
    rows, _ = coefficient_matrix(polys)
    return exact_rank(rows)


def in_span(polys: Sequence[Polynomial], f: Polynomial) -> bool:
    return polynomial_rank(list(polys) + [f]) == polynomial_rank(polys)


def smith_invariants(vectors: Sequence[Sequence[int]], n: int) -> list[int]:
    """Nonzero invariant factors of the integer matrix whose rows are ``vectors``.

    The rows generate all of Z^n exactly when there are ``n`` invariants,
    all equal to 1.
    """
    a = [[int(x) for x in v] for v in vectors if any(v)]
    for v in a:
        if len(v) != n:
            raise ValueError(f"vector {v} does not have {n} entries")
    invariants = []
    rows, cols = len(a), n
    t = 0
    while t < min(rows, cols):
        # choose the smallest nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            p = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    changed = True
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    changed = True
            if not changed:
                # pivot must divide the whole remaining block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t into the pivot
            best = (t, t)
            for i in range(t, rows):
                if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, cols):
                if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        invariants.append(abs(a[t][t]))
        t += 1
    return invariants
