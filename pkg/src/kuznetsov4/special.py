"""Complex log-Gamma, Stirling factors and quadrature along vertical lines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._accel import HAS_NUMBA, njit

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k-1)), k = 1..9
_STIRLING_COEFFS = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
])

_SHIFT_TARGET = 10.0
EXTENDED_DPS = 34


class GammaPoleError(ValueError):
    """The argument is a pole of Gamma (a non-positive integer)."""


class QuadratureError(RuntimeError):
    """A line integral failed to converge."""


def _is_pole(z) -> np.ndarray:
    z = np.asarray(z)
    re = z.real
    return (z.imag == 0) & (re <= 0) & (re == np.round(re))


# ---------------------------------------------------------------------------
# log Gamma kernels


@njit("complex128(complex128)", cache=True)
def _lgamma_core(z):
    acc = 0j
    if not (z.real >= 0.0 and abs(z) >= 10.0):
        n = int(math.ceil(10.0 - z.real))
        if n < 0:
            n = 0
        for k in range(n):
            acc += np.log(z + k)
        z = z + n
    w = 1.0 / z
    w2 = w * w
    series = 43867.0 / 244188.0
    series = series * w2 - 3617.0 / 122400.0
    series = series * w2 + 1.0 / 156.0
    series = series * w2 - 691.0 / 360360.0
    series = series * w2 + 1.0 / 1188.0
    series = series * w2 - 1.0 / 1680.0
    series = series * w2 + 1.0 / 1260.0
    series = series * w2 - 1.0 / 360.0
    series = series * w2 + 1.0 / 12.0
    return (z - 0.5) * np.log(z) - z + 0.9189385332046727 + series * w - acc


@njit("complex128(complex128)", cache=True)
def _lgamma_scalar(z):
    direct = _lgamma_core(z)
    if z.real >= 0.0:
        return direct
    # reflection keeps the left half-plane accurate; the shifted sum fixes the branch
    refl = 1.1447298858494002 - np.log(np.sin(np.pi * z)) - _lgamma_core(1.0 - z)
    k = np.round((direct.imag - refl.imag) / (2.0 * np.pi))
    return refl + 2j * np.pi * k


@njit("complex128[:](complex128[:])", cache=True)
def _lgamma_array_numba(z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        out[i] = _lgamma_scalar(z[i])
    return out


def _lgamma_array_numpy(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    direct = _lgamma_core_numpy(z)
    left = z.real < 0.0
    if np.any(left):
        zl = z[left]
        refl = math.log(math.pi) - np.log(np.sin(np.pi * zl)) - _lgamma_core_numpy(1.0 - zl)
        k = np.round((direct[left].imag - refl.imag) / (2.0 * math.pi))
        direct[left] = refl + 2j * math.pi * k
    return direct


def _lgamma_core_numpy(z: np.ndarray) -> np.ndarray:
    need = ~((z.real >= 0.0) & (np.abs(z) >= _SHIFT_TARGET))
    shift = np.where(need, np.maximum(np.ceil(_SHIFT_TARGET - z.real), 0.0), 0.0).astype(np.int64)
    acc = np.zeros_like(z)
    nmax = int(shift.max()) if shift.size else 0
    for k in range(nmax):
        active = shift > k
        acc[active] += np.log(z[active] + k)
    w = z + shift
    r = 1.0 / w
    r2 = r * r
    series = np.full_like(w, _STIRLING_COEFFS[-1])
    for coeff in _STIRLING_COEFFS[-2::-1]:
        series = series * r2 + coeff
    return (w - 0.5) * np.log(w) - w + LOG_SQRT_2PI + series * r - acc


def log_gamma(z, precision: str = "double", backend: str | None = None):
    """Principal branch of log Gamma(z).

    Accepts scalars or arrays.  ``precision="extended"`` evaluates with
    mpmath at 34 significant digits and returns mpmath numbers.
    """
    if precision == "extended":
        import mpmath

        with mpmath.workdps(EXTENDED_DPS):
            if np.ndim(z) == 0:
                zz = mpmath.mpmathify(z)
                if zz.imag == 0 and zz.real <= 0 and zz.real == int(zz.real):
                    raise GammaPoleError(f"Gamma has a pole at {z}")
                return mpmath.loggamma(zz)
            return [log_gamma(x, precision="extended") for x in np.ravel(z)]
    if precision != "double":
        raise ValueError(f"unknown precision {precision!r}")
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(_is_pole(arr)):
        raise GammaPoleError("Gamma has a pole at a non-positive integer argument")
    use_numba = HAS_NUMBA if backend is None else backend == "numba"
    if use_numba:
        out = _lgamma_array_numba(np.ascontiguousarray(arr))
    else:
        out = _lgamma_array_numpy(arr)
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(z))


def gamma(z):
    """Complex Gamma via ``exp(log_gamma)``."""
    return np.exp(log_gamma(z))


def rgamma(z):
    """1/Gamma(z), zero at the poles of Gamma."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(arr.shape, dtype=complex)
    ok = ~_is_pole(arr)
    if np.any(ok):
        out[ok] = np.exp(-log_gamma(arr[ok]))
    return complex(out[0]) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------------------
# Stirling factorization


@dataclass(frozen=True)
class StirlingFactors:
    """``Gamma(sigma+it) ~ exp(poly_log - exp_rate*|t|)`` in modulus."""

    poly_log: float
    exp_rate: float
    t: float

    def abs_gamma_approx(self) -> float:
        return math.exp(self.poly_log - self.exp_rate * abs(self.t))

    def abs_gamma_sq_approx(self) -> float:
        return math.exp(2.0 * self.poly_log - 2.0 * self.exp_rate * abs(self.t))


def stirling_factors(sigma: float, t: float) -> StirlingFactors:
    if abs(t) < 1.0:
        raise ValueError("Stirling factorization needs |t| >= 1")
    poly_log = LOG_SQRT_2PI + (sigma - 0.5) * math.log(abs(t))
    return StirlingFactors(poly_log=poly_log, exp_rate=math.pi / 2.0, t=float(t))


# ---------------------------------------------------------------------------
# line quadrature


RULES = ("gauss-legendre-panels", "trapezoid")


@dataclass(frozen=True)
class LineQuadrature:
    """Truncated vertical line ``Re z = anchor``, ``|Im z - center| <= half_height``.

    For Gauss-Legendre panels ``nodes`` is the number of points per panel;
    for the trapezoid rule it is the total number of points.
    """

    anchor: float = 0.0
    half_height: float = 10.0
    nodes: int = 16
    rule: str = "gauss-legendre-panels"
    panel_width: float = 1.0
    center: float = 0.0
    tol: float = 1e-10

    def __post_init__(self):
        if not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if self.nodes < 16:
            raise ValueError("at least 16 nodes are required")
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if not self.panel_width > 0:
            raise ValueError("panel_width must be positive")

    def nodes_and_weights(self, refine: int = 0):
        """Imaginary offsets and weights, refined ``refine`` times by doubling."""
        lo, hi = self.center - self.half_height, self.center + self.half_height
        if self.rule == "trapezoid":
            n = (self.nodes - 1) * 2**refine + 1
            y = np.linspace(lo, hi, n)
            w = np.full(n, (hi - lo) / (n - 1))
            w[0] *= 0.5
            w[-1] *= 0.5
            return y, w
        panels = int(math.ceil((hi - lo) / self.panel_width)) * 2**refine
        x, wx = np.polynomial.legendre.leggauss(self.nodes)
        edges = np.linspace(lo, hi, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        y = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        w = (half[:, None] * wx[None, :]).ravel()
        return y, w


class LineIntegral(NamedTuple):
    value: complex
    error: float
    converged: bool
    evaluations: int


def _call_vectorized(f: Callable, z: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(z), dtype=complex)
        if out.shape == z.shape:
            return out
        if out.ndim == 0:
            return np.full(z.shape, complex(out))
    except (TypeError, ValueError):
        pass
    return np.array([complex(f(zz)) for zz in z])


def integrate_line(f: Callable, q: LineQuadrature, *, raise_on_failure: bool = False) -> LineIntegral:
    """Integrate ``f(anchor + i y) dy`` over the truncated line.

    ``f`` receives an array of complex points and must be reentrant.  The
    result comes from the refined rule; the error estimate is the change
    under node doubling.
    """
    y0, w0 = q.nodes_and_weights(0)
    y1, w1 = q.nodes_and_weights(1)
    v0 = np.dot(_call_vectorized(f, q.anchor + 1j * y0), w0)
    v1 = np.dot(_call_vectorized(f, q.anchor + 1j * y1), w1)
    err = float(abs(v1 - v0))
    scale = max(abs(v1), 1e-300)
    converged = err <= 10.0 * max(q.tol * scale, 1e-300) or err == 0.0
    if not converged and raise_on_failure:
        raise QuadratureError(f"line integral not converged: error {err:.3e} on value {abs(v1):.3e}")
    return LineIntegral(complex(v1), err, bool(converged), int(y0.size + y1.size))
