"""Small dense simplex over exact rationals (two-phase, Bland's rule)."""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence


class LPResult(NamedTuple):
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None
    x: tuple | None


def _pivot(T, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        inv = 1 / p
        T[r] = row = [v * inv if v else v for v in row]
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for j in nz:
                other[j] -= f * row[j]


def _run(T, basis, ncols):
    """Maximise the objective held in the last row (stored as reduced costs)."""
    obj = T[-1]
    m = len(T) - 1
    while True:
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, leave, enter)
        basis[leave] = enter
        obj = T[-1]


def _canonical_objective(T, basis, costs):
    row = [-c for c in costs] + [Fraction(0)]
    for i, b in enumerate(basis):
        f = row[b]
        if f:
            for j, v in enumerate(T[i]):
                if v:
                    row[j] -= f * v
    return row


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximise ``c.x`` subject to ``A x <= b`` and ``x >= 0``."""
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    art_rows = [i for i in range(m) if b[i] < 0]
    k = len(art_rows)
    ncols = n + m + k
    T = []
    basis = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [sign * v for v in A[i]] + [Fraction(0)] * (m + k) + [sign * b[i]]
        row[n + i] = Fraction(sign)
        if sign < 0:
            a_col = n + m + art_rows.index(i)
            row[a_col] = Fraction(1)
            basis.append(a_col)
        else:
            basis.append(n + i)
        T.append(row)
    if k:
        costs = [Fraction(0)] * (n + m) + [Fraction(-1)] * k
        T.append(_canonical_objective(T, basis, costs))
        _run(T, basis, ncols)
        if T[-1][-1] != 0:
            return LPResult("infeasible", None, None)
        T.pop()
        # drive remaining artificials out of the basis
        for i in range(len(basis) - 1, -1, -1):
            if basis[i] >= n + m:
                j = next((j for j in range(n + m) if T[i][j] != 0), None)
                if j is None:
                    del T[i]
                    del basis[i]
                else:
                    _pivot(T, i, j)
                    basis[i] = j
        T = [row[: n + m] + [row[-1]] for row in T]
    costs = c + [Fraction(0)] * m
    T.append(_canonical_objective(T, basis, costs))
    status = _run(T, basis, n + m)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [Fraction(0)] * (n + m)
    for i, bidx in enumerate(basis):
        x[bidx] = T[i][-1]
    return LPResult("optimal", T[-1][-1], tuple(x[:n]))


def maximize_boxed(c: Sequence, G: Sequence[Sequence], h: Sequence, lower: Sequence, upper: Sequence) -> LPResult:
    """Maximise ``c.x`` subject to ``G x <= h`` and ``lower <= x <= upper``."""
    lower = [Fraction(v) for v in lower]
    upper = [Fraction(v) for v in upper]
    n = len(lower)
    A, b = [], []
    for row, hi in zip(G, h):
        row = [Fraction(v) for v in row]
        A.append(row)
        b.append(Fraction(hi) - sum(r * l for r, l in zip(row, lower)))
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        A.append(e)
        b.append(upper[j] - lower[j])
    res = maximize(c, A, b)
    if res.status != "optimal":
        return res
    x = tuple(xi + l for xi, l in zip(res.x, lower))
    return LPResult("optimal", sum(Fraction(ci) * xi for ci, xi in zip(c, x)), x)
