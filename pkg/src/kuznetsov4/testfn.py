"""Spectral test function, its polynomial weight and the main-term integral.

Everything is evaluated in log space where Gamma factors are involved;
``R`` up to the mid-teens would overflow doubles otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import NamedTuple

import numpy as np

from .params import as_langlands
from .special import log_gamma

PAIRS = list(combinations(range(4), 2))


@dataclass(frozen=True)
class TestParams:
    T: float
    R: float = 1.0

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not self.T > 1:
            raise ValueError("T must exceed 1")
        if not self.R >= 1:
            raise ValueError("R must be at least 1")


class MainTermResult(NamedTuple):
    value: float
    T: float
    R: float
    quad_error: float


def _imag_alpha(alpha, n=None) -> np.ndarray:
    a = as_langlands(alpha).alpha
    if n is not None and len(a) != n:
        raise ValueError(f"expected rank {n}, got {len(a)}")
    return a


def _three_combinations(a: np.ndarray) -> np.ndarray:
    a1, a2, a3, a4 = a
    return np.array([a1 + a2 - a3 - a4, a1 + a3 - a2 - a4, a1 + a4 - a2 - a3])


def log_f_r(alpha, R: float) -> float:
    a = _imag_alpha(alpha, 4)
    c = _three_combinations(a)
    return float(R / 6.0 * np.sum(np.log1p(np.abs(c) ** 2)))


def f_r(alpha, R: float) -> float:
    """Polynomial weight: three squared-modulus factors to the power R/6."""
    return math.exp(log_f_r(alpha, R))


def f_r_product_form(alpha, R: float) -> complex:
    """The same weight as a product over all 24 permutations, to the power R/24."""
    a = _imag_alpha(alpha, 4)
    logs = 0j
    for p in permutations(range(4)):
        logs += np.log(1 + a[p[0]] - a[p[1]] - a[p[2]] + a[p[3]])
    return complex(np.exp(R / 24.0 * logs))


def log_p_sharp(alpha, tp: TestParams, n: int | None = None) -> complex:
    a = as_langlands(alpha).alpha
    n = len(a) if n is None else n
    if len(a) != n:
        raise ValueError("rank mismatch")
    args = np.array([(2 + tp.R + a[j] - a[k]) / 4 for j in range(n) for k in range(n) if j != k])
    out = complex(np.sum(a * a) / (2 * tp.T**2)) + complex(np.sum(log_gamma(args)))
    if n == 4:
        out += log_f_r(a, tp.R)
    return out


def p_sharp(alpha, tp: TestParams) -> complex:
    """Spectral test function at ``alpha`` (rank 2, 3 or 4)."""
    return complex(np.exp(log_p_sharp(alpha, tp)))


def log_h_tr_n(alpha, n: int, tp: TestParams) -> float:
    a = _imag_alpha(alpha, n)
    den = np.array([(1 + a[j] - a[k]) / 2 for j in range(n) for k in range(n) if j != k])
    return float(2 * log_p_sharp(a, tp, n).real - np.sum(log_gamma(den)).real)


def h_tr_n(alpha, n: int, tp: TestParams) -> float:
    """``|p#|^2`` over the Gamma product with arguments ``(1 + alpha_j - alpha_k)/2``."""
    return math.exp(log_h_tr_n(alpha, n, tp))


# ---------------------------------------------------------------------------
# polynomial majorants


def k_r(tau, R: float) -> float:
    """Majorant on the ordered chamber ``tau1 >= tau2 >= tau3 >= tau4``."""
    t = np.asarray(tau, dtype=float)
    if t.shape != (4,):
        raise ValueError("tau must have four entries")
    if abs(t.sum()) > 1e-9 * max(1.0, np.abs(t).max()):
        raise ValueError("tau must sum to zero")
    if np.any(np.diff(t) > 0):
        raise ValueError("tau must be non-increasing")
    c = _three_combinations(t)
    out = np.prod((1 + np.abs(c)) ** (R / 3.0))
    for j, k in PAIRS:
        out *= (1 + t[j] - t[k]) ** (1 + R / 2.0)
    return float(out)


def k_r_T(T1: float, T2: float, T3: float, R: float) -> float:
    if min(T1, T2, T3) < 0:
        raise ValueError("T coordinates must be non-negative")
    out = ((1 + T1 + 2 * T2 + T3) * (1 + T1 + T3) * (1 + abs(T1 - T3))) ** (R / 3.0)
    for v in (T1, T2, T3, T1 + T2, T2 + T3, T1 + T2 + T3):
        out *= (1 + v) ** (1 + R / 2.0)
    return float(out)


def tau_from_T(T1, T2, T3):
    """Chamber point with consecutive gaps ``T1, T2, T3`` and zero sum."""
    t1 = (3 * np.asarray(T1) + 2 * np.asarray(T2) + np.asarray(T3)) / 4.0
    t2 = t1 - T1
    t3 = t2 - T2
    t4 = t3 - T3
    return t1, t2, t3, t4


# Jacobian of (tau1, tau2, tau3) with respect to (T1, T2, T3)
CHAMBER_JACOBIAN = 0.25


# ---------------------------------------------------------------------------
# main term


def stirling_integrand(tau, tp: TestParams, gaussian_rate: float = 0.5):
    """Stirling-reduced main-term integrand at real ``tau`` (last axis of length 4).

    ``gaussian_rate`` multiplies ``sum tau^2 / T^2`` in the exponent; the
    reduced form is written with 1/2, while ``|p#|^2`` itself carries 1.
    """
    t = np.asarray(tau, dtype=float)
    R = tp.R
    c = np.stack([t[..., 0] + t[..., 1] - t[..., 2] - t[..., 3],
                  t[..., 0] + t[..., 2] - t[..., 1] - t[..., 3],
                  t[..., 0] + t[..., 3] - t[..., 1] - t[..., 2]], axis=-1)
    log_v = -gaussian_rate * np.sum(t * t, axis=-1) / tp.T**2
    log_v += R / 3.0 * np.sum(np.log1p(c * c), axis=-1)
    for j, k in PAIRS:
        log_v += (1 + R) * np.log1p(np.abs(t[..., j] - t[..., k]))
    return np.exp(log_v)


def direct_integrand(tau, tp: TestParams) -> float:
    """``|p#(i tau)|^2`` divided by the Gamma product with arguments ``(alpha_j - alpha_k)/2``."""
    t = np.asarray(tau, dtype=float)
    a = 1j * t
    den = 0.0
    for j, k in PAIRS:
        x = (t[j] - t[k]) / 2
        if x == 0:
            return 0.0
        # Gamma(ix) Gamma(-ix) = pi / (x sinh(pi x))
        den += math.log(math.pi) - math.log(abs(x)) - _log_sinh(math.pi * abs(x))
    return math.exp(2 * log_p_sharp(a, tp).real - den)


def _log_sinh(x: float) -> float:
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2.0)


def stirling_pair_constant(R: float) -> float:
    """Per-pair constant between the direct and the reduced integrands."""
    return math.pi * 4.0 ** (-R)


def stirling_comparison(tau, tp: TestParams) -> float:
    """Ratio direct / reduced after the constant and ``|t|/(1+|t|)`` corrections.

    Both sides use the same Gaussian (the one carried by ``|p#|^2``), so
    the ratio tends to 1 as all pair differences grow.
    """
    t = np.asarray(tau, dtype=float)
    red = stirling_integrand(t, tp, gaussian_rate=1.0)
    corr = 6 * math.log(stirling_pair_constant(tp.R))
    for j, k in PAIRS:
        d = abs(t[j] - t[k])
        corr += (1 + tp.R) * math.log(d / (1 + d))
    return direct_integrand(t, tp) / (red * math.exp(corr))


def main_term_integral(tp: TestParams, quad: int = 24, *, box: float = 7.0, panels: int = 4,
                       gaussian_rate: float = 0.5) -> MainTermResult:
    """Triple integral of the reduced integrand over all of ``R^3``.

    Uses the Weyl symmetry: 24 times the chamber integral in gap
    coordinates ``T_i = T x_i``, each ``x_i`` on ``[0, box]`` split into
    ``panels`` Gauss-Legendre panels of ``quad`` nodes.  The error is the
    change against half the nodes per panel.
    """
    if quad < 4:
        raise ValueError("quad must be at least 4")
    if tp.T > 64 or tp.R > 4:
        raise ValueError("desk-scale parameters need T <= 64 and R <= 4")

    def integral(nodes):
        x, w = np.polynomial.legendre.leggauss(nodes)
        edges = np.linspace(0.0, box / math.sqrt(gaussian_rate), panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        ws = (half[:, None] * w[None, :]).ravel()
        X1, X2, X3 = np.meshgrid(xs, xs, xs, indexing="ij")
        tau = np.stack(tau_from_T(tp.T * X1, tp.T * X2, tp.T * X3), axis=-1)
        f = stirling_integrand(tau, tp, gaussian_rate)
        val = np.einsum("ijk,i,j,k->", f, ws, ws, ws)
        return 24.0 * CHAMBER_JACOBIAN * tp.T**3 * val

    fine = integral(quad)
    coarse = integral(max(4, quad // 2))
    return MainTermResult(float(fine), float(tp.T), float(tp.R), float(abs(fine - coarse)))


def fit_slope(Ts, values) -> float:
    """Least-squares slope of log(value) against log(T)."""
    return float(np.polyfit(np.log(np.asarray(Ts, float)), np.log(np.asarray(values, float)), 1)[0])


def main_term_scaling(Ts=(8, 16, 32), R: float = 1.0, quad: int = 24) -> dict:
    results = [main_term_integral(TestParams(T, R), quad) for T in Ts]
    values = [r.value for r in results]
    return {
        "T": list(Ts),
        "value": values,
        "quad_error": [r.quad_error for r in results],
        "slope": fit_slope(Ts, values),
        "expected_slope": 9 + 8 * R,
        "leading_ratio": [v / T ** (9 + 8 * R) for T, v in zip(Ts, values)],
    }
