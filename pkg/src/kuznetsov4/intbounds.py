"""Numerical certification of one-dimensional polynomial-weight integral bounds.

``<<`` is read as: the ratio lhs / bound stays within ``factor`` of its
value at the smallest scale (A1), or lhs <= factor * rhs (A3), with an
``epsilon`` slack in the exponent.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate


def _breakpoints(a: float, b: float) -> list:
    """Split ``[a, b]`` geometrically towards both ends."""
    pts = {a, b}
    span = b - a
    step = 1.0
    while step < span / 2:
        pts.add(a + step)
        pts.add(b - step)
        step *= 4.0
    pts.add(0.5 * (a + b))
    return sorted(pts)


def _integrate(f, a: float, b: float, rtol: float) -> tuple:
    if b <= a:
        return 0.0, 0.0
    total, err = 0.0, 0.0
    pts = _breakpoints(a, b)
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=rtol, limit=200)
        total += v
        err += e
    return total, err


def a1_exponent(e: float, f: float) -> float:
    return min(e, f, e + f - 1.0)


def lhs_integral_A1(e: float, f: float, T: float, *, rtol: float = 1e-11, return_error: bool = False):
    """``int_0^T (1 + T - x)^-e (1 + x)^-f dx``."""
    if not T > 0:
        raise ValueError("T must be positive")
    if T > 1e5:
        raise ValueError("T is limited to 1e5")
    val, err = _integrate(lambda x: (1.0 + T - x) ** (-e) * (1.0 + x) ** (-f), 0.0, float(T), rtol)
    if not math.isfinite(val):
        raise ArithmeticError("integral did not converge")
    return (val, err) if return_error else val


class A1Report(NamedTuple):
    e: float
    f: float
    epsilon: float
    T: tuple
    lhs: tuple
    ratio: tuple
    bounded: bool
    growth: float          # max ratio / ratio at the smallest T
    witness: float | None  # first T breaking the factor, if any


DEFAULT_T_GRID = (10.0, 100.0, 1e3, 1e4, 1e5)


def verify_A1(e: float, f: float, T_grid: Sequence[float] = DEFAULT_T_GRID, epsilon: float = 0.05,
              factor: float = 10.0) -> A1Report:
    T_grid = tuple(sorted(float(t) for t in T_grid))
    k = a1_exponent(e, f)
    lhs = tuple(lhs_integral_A1(e, f, T) for T in T_grid)
    ratio = tuple(v / (1.0 + T) ** (-k + epsilon) for v, T in zip(lhs, T_grid))
    if not all(math.isfinite(r) for r in ratio):
        raise ArithmeticError("non-finite ratio")
    growth = max(ratio) / ratio[0]
    witness = next((T for T, r in zip(T_grid, ratio) if r > factor * ratio[0]), None)
    return A1Report(float(e), float(f), float(epsilon), T_grid, lhs, ratio, witness is None, growth, witness)


# ---------------------------------------------------------------------------
# several nodes


def _check_nodes(B, e):
    B = np.asarray(B, dtype=float)
    e = np.asarray(e, dtype=float)
    if B.ndim != 1 or B.shape != e.shape:
        raise ValueError("B and e must be 1-d of equal length")
    if len(B) < 2 or len(B) > 6:
        raise ValueError("between 2 and 6 nodes are supported")
    if np.any(np.diff(B) < 0):
        raise ValueError("nodes must be sorted")
    return B, e


def _window(window, k):
    if window is None:
        return 0, k - 1
    lo, hi = (int(w) for w in window)
    # 1-based (j_min, j_max) with j_min < j_max
    if not 1 <= lo < hi <= k:
        raise ValueError("window must satisfy 1 <= j_min < j_max <= k")
    return lo - 1, hi - 1


def window_integral(B, e, window=None, *, rtol: float = 1e-11) -> float:
    """``int_{B_jmin}^{B_jmax} prod_i (1 + |x - B_i|)^-e_i dx``, split at every node."""
    B, e = _check_nodes(B, e)
    lo, hi = _window(window, len(B))

    def f(x):
        return float(np.prod((1.0 + np.abs(x - B)) ** (-e)))

    total = 0.0
    for j in range(lo, hi):
        v, _ = _integrate(f, float(B[j]), float(B[j + 1]), rtol)
        total += v
    return total


def _anchor(B, e, i, j):
    """Node at which the factor of ``B_i`` is evaluated for the segment ``[B_j, B_{j+1}]``."""
    if i < j:
        return B[j] if e[i] > 0 else B[j + 1]
    return B[j + 1] if e[i] > 0 else B[j]


def a3_rhs(B, e, window=None, epsilon: float = 0.05) -> float:
    B, e = _check_nodes(B, e)
    lo, hi = _window(window, len(B))
    total = 0.0
    for j in range(lo, hi):
        term = (1.0 + B[j + 1] - B[j]) ** (-a1_exponent(e[j], e[j + 1]))
        for i in range(len(B)):
            if i in (j, j + 1) or e[i] == 0:
                continue
            term *= (1.0 + abs(_anchor(B, e, i, j) - B[i])) ** (-e[i])
        total += term
    return float((1.0 + B[hi] - B[lo]) ** epsilon * total)


class A3Report(NamedTuple):
    lhs: float
    rhs: float
    ratio: float
    ok: bool


def verify_A3(B, e, window=None, epsilon: float = 0.05, factor: float = 10.0) -> A3Report:
    lhs = window_integral(B, e, window)
    rhs = a3_rhs(B, e, window, epsilon)
    ratio = lhs / rhs
    if not math.isfinite(ratio):
        raise ArithmeticError("non-finite ratio")
    return A3Report(lhs, rhs, ratio, ratio <= factor)


def random_node_family(rng: np.random.Generator, k: int, span: float, e_range=(-1.0, 3.0),
                       coincide: bool = False) -> tuple:
    """Sorted nodes on ``[0, span]`` with exponents drawn from ``e_range``."""
    B = np.sort(rng.uniform(0.0, span, size=k))
    B[0], B[-1] = 0.0, span
    if coincide and k >= 3:
        B[2] = B[1]
    e = rng.uniform(*e_range, size=k)
    return B, e
