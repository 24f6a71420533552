"""Mellin transform of the GL(4) Whittaker function, its residues and poles.

Normalisation: ``M(alpha, s) = 2^-3 pi^-(s1+s2+s3) What(alpha/2, s/2)`` where
``What(a, z)`` is a Gamma prefactor times a single Barnes-type integral
over a vertical ``t``-line with six Gamma factors on top and two below.

The ``t``-contour must separate the increasing pole sequences (from the
``Gamma(t + .)`` factors) from the decreasing ones (``Gamma(-t + .)``).
When the left sequence crosses the straight line (small or negative
``Re s``) the offending residues are added explicitly, which gives the
analytic continuation used by the small-circle residue checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from ._accel import HAS_NUMBA, njit
from .errors import BudgetExceeded
from .params import as_langlands
from .special import (
    EXTENDED_DPS,
    GammaPoleError,
    LineQuadrature,
    QuadratureError,
    _lgamma_scalar,
    integrate_line,
    log_gamma,
)

LOG_PI = math.log(math.pi)
ENVELOPE_DECADES = 41.5  # log(1e18)
POLE_CLEARANCE = 1e-3
DIRECT_GAP = 0.2  # below this the line is moved left and residues added
GAP_MIN = 1e-6


class ContourTooCloseError(ValueError):
    """The evaluation point sits on (or within 1e-3 of) a pole."""


class PoleCollisionError(ValueError):
    """Two Langlands parameters coincide, so a residue formula degenerates."""


# ---------------------------------------------------------------------------
# integrand bookkeeping


@dataclass
class _BarnesData:
    """Shifts of the t-integrand in the halved variables."""

    plus: np.ndarray     # Gamma(t + b)
    minus: np.ndarray    # Gamma(-t + x)
    den: np.ndarray      # 1/Gamma(t + d)
    pref: np.ndarray     # Gamma(p) prefactor arguments
    log_norm: complex    # log(2^-3 pi^-(s1+s2+s3))


def _barnes_data(alpha: np.ndarray, s: np.ndarray) -> _BarnesData:
    a = alpha / 2.0
    z = s / 2.0
    a1, a2, a3, a4 = a
    z1, z2, z3 = z
    plus = np.array([z1, z2 + a1, z2 + a2, z3 + a1 + a2])
    minus = np.array([a3, a4])
    den = np.array([z1 + z2 + a1 + a2, z2 + z3])
    pref = np.array([z1 + a1, z1 + a2, z2 - a1 - a2, z2 + a1 + a2, z3 - a1, z3 - a2])
    log_norm = -3.0 * math.log(2.0) - LOG_PI * (s[0] + s[1] + s[2])
    return _BarnesData(plus, minus, den, pref, complex(log_norm))


def _near_pole(z: np.ndarray, tol: float = POLE_CLEARANCE) -> bool:
    z = np.asarray(z)
    n = np.round(z.real)
    return bool(np.any((n <= 0) & (np.abs(z - n) < tol)))


@dataclass
class _Contour:
    c: float
    corrections: list = field(default_factory=list)   # (index into plus, n)
    regime: str = "direct"


def _choose_contour(bd: _BarnesData, offset_rule: str = "near-right") -> _Contour:
    """Pick ``Re t = c`` and the left poles that end up on its right."""
    r0 = float(np.min(bd.minus.real))
    lmax = float(np.max(-bd.plus.real))
    gap = r0 - lmax
    if gap > DIRECT_GAP:
        if offset_rule == "mid":
            return _Contour(r0 - gap / 2.0)
        eps_prime = min(gap / 2.0, 0.1)
        return _Contour(r0 - eps_prime)
    # continuation: keep right poles to the right, correct for left poles
    left = np.array([-(b.real) - n for b in bd.plus for n in range(4)])
    right = np.array([x.real + n for x in bd.minus for n in range(2)])
    best_c, best_d = None, -1.0
    for delta in np.linspace(0.05, 0.45, 161):
        c = r0 - delta
        d = min(np.min(np.abs(left - c)), np.min(np.abs(right - c)))
        if d > best_d:
            best_c, best_d = c, d
    if best_d < POLE_CLEARANCE:
        raise ContourTooCloseError("no admissible t-contour")
    corrections = []
    for k, b in enumerate(bd.plus):
        n = 0
        while -(b.real) - n > best_c:
            corrections.append((k, n))
            n += 1
    return _Contour(best_c, corrections, "continued")


def _envelope_window(bd: _BarnesData, decades: float = ENVELOPE_DECADES, pad: float = 3.0):
    """Interval in Im t outside which the Stirling envelope is negligible."""
    num = np.concatenate([-bd.plus.imag, bd.minus.imag])
    den = -bd.den.imag
    pts = np.concatenate([num, den])

    def env(y):
        return np.sum(np.abs(y - num)) - np.sum(np.abs(y - den))

    vals = [env(p) for p in pts]
    emin = min(vals)
    lo_b, hi_b = float(pts.min()), float(pts.max())
    slope = len(num) - len(den)
    budget = decades / (math.pi / 2.0)
    lo = lo_b - max(0.0, (budget - (env(lo_b) - emin)) / slope) - pad
    hi = hi_b + max(0.0, (budget - (env(hi_b) - emin)) / slope) + pad
    return lo, hi


def _log_integrand(bd: _BarnesData, t: np.ndarray) -> np.ndarray:
    out = np.zeros(t.shape, dtype=complex)
    for b in bd.plus:
        out += log_gamma(t + b)
    for x in bd.minus:
        out += log_gamma(x - t)
    for d in bd.den:
        out -= log_gamma(t + d)
    return out


def _left_residue(bd: _BarnesData, k: int, n: int, log_pref: complex, mp=None) -> complex:
    """Residue at ``t = -plus[k] - n`` of prefactor times integrand."""
    if mp is None:
        from .special import rgamma

        p = -bd.plus[k] - n
        val = complex((-1) ** n / math.factorial(n))
        log_part = log_pref
        for j, b in enumerate(bd.plus):
            if j == k:
                continue
            arg = p + b
            if _near_pole(arg, 1e-12):
                raise ContourTooCloseError("coincident left poles in the t-integrand")
            log_part += log_gamma(arg)
        for x in bd.minus:
            log_part += log_gamma(x - p)
        val *= np.exp(log_part)
        for d in bd.den:
            val *= rgamma(p + d)
        return complex(val)
    p = -mp.mpc(bd.plus[k]) - n
    val = mp.mpf(-1) ** n / mp.factorial(n)
    for j, b in enumerate(bd.plus):
        if j != k:
            val *= mp.gamma(p + mp.mpc(b))
    for x in bd.minus:
        val *= mp.gamma(mp.mpc(x) - p)
    for d in bd.den:
        val *= mp.rgamma(p + mp.mpc(d))
    return val


def _check_point(bd: _BarnesData):
    if _near_pole(bd.pref):
        raise ContourTooCloseError("Mellin point lies on a pole of the Gamma prefactor")


class MellinValue(NamedTuple):
    value: complex
    error: float
    contour: float
    regime: str
    evaluations: int


def _default_quadrature() -> LineQuadrature:
    return LineQuadrature(anchor=0.0, half_height=1.0, nodes=16, rule="gauss-legendre-panels", tol=1e-12)


def mellin_transform(alpha, s: Sequence[complex], q: LineQuadrature | None = None, *,
                     precision: str = "double", return_details: bool = False,
                     offset_rule: str = "near-right"):
    """Mellin transform of the rank-4 Whittaker function at ``s``.

    ``q`` supplies the rule, node count, panel width and tolerance; the
    contour abscissa and the truncation window are derived from the
    integrand (the window keeps the Stirling envelope above 1e-18 of its
    peak).  With ``precision="extended"`` the t-integral runs in mpmath.
    ``offset_rule="near-right"`` puts the t-line ``min(gap/2, 0.1)`` left of
    the nearest right pole; ``"mid"`` uses the middle of the gap.
    """
    lp = as_langlands(alpha)
    if lp.n != 4:
        raise ValueError("the Mellin transform is implemented for rank 4")
    a = lp.alpha
    s = np.asarray(s, dtype=complex)
    if s.shape != (3,) or not np.all(np.isfinite(s)):
        raise ValueError("s must be three finite complex numbers")
    bd = _barnes_data(a, s)
    _check_point(bd)
    contour = _choose_contour(bd, offset_rule)
    all_left = np.array([-(b.real) - n for b in bd.plus for n in range(3)])
    all_right = np.array([x.real + n for x in bd.minus for n in range(3)])
    dist = float(min(np.min(np.abs(all_left - contour.c)), np.min(np.abs(all_right - contour.c))))
    if dist < POLE_CLEARANCE:
        raise ContourTooCloseError("t-contour passes within 1e-3 of a pole")
    lo, hi = _envelope_window(bd)
    if precision == "extended":
        res = _mellin_extended(bd, contour, lo, hi, dist)
    elif precision == "double":
        res = _mellin_double(bd, contour, lo, hi, dist, q or _default_quadrature())
    else:
        raise ValueError(f"unknown precision {precision!r}")
    return res if return_details else res.value


def _mellin_double(bd, contour, lo, hi, dist, q) -> MellinValue:
    log_pref = complex(np.sum(log_gamma(bd.pref))) + bd.log_norm
    width = min(q.panel_width, max(dist, 0.02))
    if q.rule == "trapezoid":
        h = dist / 5.0
        nodes = max(16, int(math.ceil((hi - lo) / h)) + 1)
        qq = LineQuadrature(anchor=contour.c, half_height=(hi - lo) / 2, nodes=nodes, rule="trapezoid",
                            center=(hi + lo) / 2, tol=q.tol)
    else:
        qq = LineQuadrature(anchor=contour.c, half_height=(hi - lo) / 2, nodes=q.nodes,
                            rule="gauss-legendre-panels", panel_width=width, center=(hi + lo) / 2, tol=q.tol)

    def f(t):
        return np.exp(log_pref + _log_integrand(bd, t))

    line = integrate_line(f, qq)
    value = line.value / (2.0 * math.pi)
    err = line.error / (2.0 * math.pi)
    for k, n in contour.corrections:
        value += _left_residue(bd, k, n, log_pref)
    if not line.converged:
        raise QuadratureError(f"t-integral not converged (error {err:.2e}, value {abs(value):.2e})")
    return MellinValue(complex(value), float(err), contour.c, contour.regime, line.evaluations)


def _mellin_extended(bd, contour, lo, hi, dist) -> MellinValue:
    """Trapezoid rule on the t-line with the integrand summed in mpmath.

    The step is a fifth of the pole clearance, so the discretisation error
    is about ``exp(-10 pi)`` relative.  The estimate starts from the change
    against every other node and uses that halving squares the error.
    """
    import mpmath as mp

    with mp.workdps(EXTENDED_DPS):
        plus = [mp.mpc(b) for b in bd.plus]
        minus = [mp.mpc(x) for x in bd.minus]
        den = [mp.mpc(d) for d in bd.den]
        c = mp.mpf(contour.c)
        h = dist / 5.0
        total, even = mp.mpc(0), mp.mpc(0)
        for k in range(int(math.floor(lo / h)), int(math.ceil(hi / h)) + 1):
            t = mp.mpc(c, k * h)
            v = mp.fsum([mp.loggamma(t + b) for b in plus] + [mp.loggamma(x - t) for x in minus])
            v -= mp.fsum([mp.loggamma(t + d) for d in den])
            f = mp.exp(v)
            total += f
            if k % 2 == 0:
                even += f
        integral = total * mp.mpf(h)
        d = abs(integral - even * mp.mpf(2 * h))
        err = min(d, d * d / max(abs(integral), mp.mpf(10) ** -300))
        pref = mp.mpf(1)
        for p in bd.pref:
            pref *= mp.gamma(mp.mpc(p))
        norm = mp.exp(mp.mpc(bd.log_norm))
        total = integral / (2 * mp.pi)
        for k, n in contour.corrections:
            total += _left_residue(bd, k, n, 0, mp=mp)
        value = norm * pref * total
        error = abs(norm * pref) * err / (2 * mp.pi)
        return MellinValue(complex(value), float(error), contour.c, contour.regime, 0)


# ---------------------------------------------------------------------------
# batched evaluation on grids (hot kernel)


@njit(cache=True)
def _envelope_window_nb(num, den, decades, pad):
    npts = num.shape[0] + den.shape[0]
    pts = np.empty(npts)
    pts[: num.shape[0]] = num
    pts[num.shape[0]:] = den
    emin = 1e300
    for i in range(npts):
        e = 0.0
        for v in num:
            e += abs(pts[i] - v)
        for v in den:
            e -= abs(pts[i] - v)
        if e < emin:
            emin = e
    lo_b = pts.min()
    hi_b = pts.max()
    e_lo = 0.0
    e_hi = 0.0
    for v in num:
        e_lo += abs(lo_b - v)
        e_hi += abs(hi_b - v)
    for v in den:
        e_lo -= abs(lo_b - v)
        e_hi -= abs(hi_b - v)
    slope = num.shape[0] - den.shape[0]
    budget = decades / (np.pi / 2.0)
    lo = lo_b - max(0.0, (budget - (e_lo - emin)) / slope) - pad
    hi = hi_b + max(0.0, (budget - (e_hi - emin)) / slope) + pad
    return lo, hi


@njit(cache=True)
def _mellin_batch_numba(alpha, s, h_factor, out, err):
    a1 = alpha[0] / 2.0
    a2 = alpha[1] / 2.0
    a3 = alpha[2] / 2.0
    a4 = alpha[3] / 2.0
    plus = np.empty(4, dtype=np.complex128)
    den = np.empty(2, dtype=np.complex128)
    num_im = np.empty(6)
    den_im = np.empty(2)
    for i in range(s.shape[0]):
        z1 = s[i, 0] / 2.0
        z2 = s[i, 1] / 2.0
        z3 = s[i, 2] / 2.0
        plus[0] = z1
        plus[1] = z2 + a1
        plus[2] = z2 + a2
        plus[3] = z3 + a1 + a2
        den[0] = z1 + z2 + a1 + a2
        den[1] = z2 + z3
        log_pref = (_lgamma_scalar(z1 + a1) + _lgamma_scalar(z1 + a2) + _lgamma_scalar(z2 - a1 - a2)
                    + _lgamma_scalar(z2 + a1 + a2) + _lgamma_scalar(z3 - a1) + _lgamma_scalar(z3 - a2))
        log_pref += -3.0 * np.log(2.0) - np.log(np.pi) * (s[i, 0] + s[i, 1] + s[i, 2])
        r0 = min(a3.real, a4.real)
        lmax = -1e300
        for k in range(4):
            if -plus[k].real > lmax:
                lmax = -plus[k].real
        gap = r0 - lmax
        c = r0 - gap / 2.0
        h = gap / 2.0 / h_factor
        for k in range(4):
            num_im[k] = -plus[k].imag
        num_im[4] = a3.imag
        num_im[5] = a4.imag
        den_im[0] = -den[0].imag
        den_im[1] = -den[1].imag
        lo, hi = _envelope_window_nb(num_im, den_im, 41.5, 3.0)
        k0 = int(np.floor(lo / h))
        k1 = int(np.ceil(hi / h))
        total = 0j
        total_even = 0j
        for k in range(k0, k1 + 1):
            t = c + 1j * (k * h)
            v = log_pref
            for j in range(4):
                v += _lgamma_scalar(t + plus[j])
            v += _lgamma_scalar(a3 - t) + _lgamma_scalar(a4 - t)
            v -= _lgamma_scalar(t + den[0]) + _lgamma_scalar(t + den[1])
            f = np.exp(v)
            total += f
            if k % 2 == 0:
                total_even += f
        out[i] = total * h / (2.0 * np.pi)
        err[i] = abs(total * h - total_even * 2.0 * h) / (2.0 * np.pi)


def _mellin_batch_numpy(alpha, s, h_factor, out, err):
    for i in range(s.shape[0]):
        bd = _barnes_data(alpha, s[i])
        r0 = float(np.min(bd.minus.real))
        gap = r0 - float(np.max(-bd.plus.real))
        c = r0 - gap / 2.0
        h = gap / 2.0 / h_factor
        lo, hi = _envelope_window(bd)
        k = np.arange(int(np.floor(lo / h)), int(np.ceil(hi / h)) + 1)
        t = c + 1j * k * h
        log_pref = complex(np.sum(log_gamma(bd.pref))) + bd.log_norm
        f = np.exp(log_pref + _log_integrand(bd, t))
        total = f.sum()
        total_even = f[k % 2 == 0].sum()
        out[i] = total * h / (2.0 * math.pi)
        err[i] = abs(total * h - 2.0 * h * total_even) / (2.0 * math.pi)


def mellin_transform_batch(alpha, s_points, *, h_factor: float = 5.0, backend: str | None = None):
    """Vectorised transform on many points with ``Re s_j > 0`` (no continuation).

    Uses the trapezoid rule on the t-line midway between the two pole
    families; the step is the half-gap divided by ``h_factor``.  Returns
    ``(values, error_estimates)``.
    """
    a = as_langlands(alpha).alpha
    s = np.ascontiguousarray(np.asarray(s_points, dtype=complex).reshape(-1, 3))
    if np.any(s.real <= 2 * POLE_CLEARANCE):
        raise ContourTooCloseError("batched evaluation needs Re(s_j) > 0")
    if np.any(np.abs(a.real) > 1e-12):
        raise ValueError("batched evaluation expects purely imaginary alpha")
    out = np.empty(s.shape[0], dtype=complex)
    err = np.empty(s.shape[0])
    use_numba = HAS_NUMBA if backend is None else backend == "numba"
    if use_numba:
        _mellin_batch_numba(a.astype(complex), s, float(h_factor), out, err)
    else:
        _mellin_batch_numpy(a, s, float(h_factor), out, err)
    shape = np.asarray(s_points).shape[:-1]
    return out.reshape(shape), err.reshape(shape)


# ---------------------------------------------------------------------------
# poles and residues


AXES = ("s1", "s2", "s3")


@dataclass(frozen=True)
class PoleSpec:
    axis: str
    base: complex
    shift: int = 0
    indices: tuple = ()

    @property
    def location(self) -> complex:
        return self.base - 2 * self.shift


def _axis_name(axis) -> str:
    if isinstance(axis, int):
        axis = f"s{axis}"
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    return axis


def pole_lattice(alpha, axis, delta_max: int = 0) -> list:
    """Base poles on one axis together with their shifts by ``-2 delta``."""
    a = as_langlands(alpha).alpha
    if len(a) != 4:
        raise ValueError("pole lattice is defined for rank 4")
    axis = _axis_name(axis)
    if delta_max < 0:
        raise ValueError("delta_max must be non-negative")
    if axis == "s1":
        bases = [(-a[k], (k,)) for k in range(4)]
    elif axis == "s3":
        bases = [(a[k], (k,)) for k in range(4)]
    else:
        bases = [(-a[j] - a[k], (j, k)) for j in range(4) for k in range(j + 1, 4)]
    return [PoleSpec(axis, complex(b), d, idx) for b, idx in bases for d in range(delta_max + 1)]


def _check_distinct(a: np.ndarray):
    for j in range(4):
        for k in range(j + 1, 4):
            if abs(a[j] - a[k]) < GAP_MIN:
                raise PoleCollisionError(f"alpha_{j + 1} and alpha_{k + 1} coincide")


def _reorder(a: np.ndarray, front: Sequence[int]) -> np.ndarray:
    rest = [i for i in range(4) if i not in front]
    return a[list(front) + rest]


def _gprod(args_num, args_den, precision):
    if precision == "extended":
        import mpmath as mp

        with mp.workdps(EXTENDED_DPS):
            v = mp.mpf(1)
            for z in args_num:
                v *= mp.gamma(mp.mpc(z))
            for z in args_den:
                v *= mp.rgamma(mp.mpc(z))
            return complex(v)
    for z in args_num:
        if _near_pole(np.array([z]), 1e-12):
            raise PoleCollisionError(f"Gamma pole at argument {z}")
    v = np.exp(np.sum(log_gamma(np.array(args_num, dtype=complex))) -
               (np.sum(log_gamma(np.array(args_den, dtype=complex))) if len(args_den) else 0.0))
    return complex(v)


def residue_product_s1(a, s2, s3, precision="double") -> complex:
    """Gamma product for the residue at ``s1 = -alpha_1``."""
    num = []
    for j in (1, 2, 3):
        num += [(a[j] - a[0]) / 2, (s2 + a[0] + a[j]) / 2, (s3 - a[j]) / 2]
    return _gprod(num, [(s2 + s3 + a[0]) / 2], precision)


def residue_product_s2(a, s1, s3, precision="double") -> complex:
    """Gamma product for the residue at ``s2 = -alpha_1 - alpha_2``."""
    num = [(a[k] - a[j]) / 2 for j in (0, 1) for k in (2, 3)]
    num += [(s1 + a[0]) / 2, (s1 + a[1]) / 2, (s3 - a[2]) / 2, (s3 - a[3]) / 2]
    return _gprod(num, [], precision)


def residue_product_s3(a, s1, s2, precision="double") -> complex:
    """Gamma product for the residue at ``s3 = alpha_1``.

    This is the image of the ``s1`` formula under the involution
    ``(alpha, s1, s2, s3) -> (-alpha, s3, s2, s1)``.
    """
    num = []
    for j in (1, 2, 3):
        num += [(a[0] - a[j]) / 2, (s2 - a[0] - a[j]) / 2, (s1 + a[j]) / 2]
    return _gprod(num, [(s1 + s2 - a[0]) / 2], precision)


def residue_product_s3_literal(a, s1, s2, s3, precision="double") -> complex:
    """The ``s3`` product written with ``Gamma((s3 - alpha_j)/2)`` factors.

    Kept only for the calibration report, which shows it does not match
    the transform (the involution-derived form above does).
    """
    num = []
    for j in (1, 2, 3):
        num += [(a[0] - a[j]) / 2, (s2 - a[0] - a[j]) / 2, (s3 - a[j]) / 2]
    return _gprod(num, [(s1 + s2 - a[0]) / 2], precision)


def _pole_point(which: PoleSpec, s_rest) -> np.ndarray:
    s_rest = [complex(x) for x in s_rest]
    if len(s_rest) != 2:
        raise ValueError("s_rest must hold the two remaining coordinates")
    axis = AXES.index(which.axis)
    s = s_rest[:axis] + [which.location] + s_rest[axis:]
    return np.array(s, dtype=complex)


def residue_normalisation(s_at_pole) -> complex:
    """Factor relating the Gamma products to residues of the transform."""
    s = np.asarray(s_at_pole, dtype=complex)
    return complex(0.25 * np.exp(-LOG_PI * np.sum(s)))


def residue_gamma_product(alpha, which: PoleSpec, s_rest, precision="double") -> complex:
    a = as_langlands(alpha).alpha
    _check_distinct(a)
    if which.shift != 0:
        raise NotImplementedError("residues at shifted poles are not available")
    idx = which.indices or _infer_indices(a, which)
    s_rest = [complex(x) for x in s_rest]
    if which.axis == "s1":
        return residue_product_s1(_reorder(a, idx), *s_rest, precision=precision)
    if which.axis == "s2":
        return residue_product_s2(_reorder(a, idx), *s_rest, precision=precision)
    return residue_product_s3(_reorder(a, idx), *s_rest, precision=precision)


def _infer_indices(a, which: PoleSpec):
    for p in pole_lattice(a, which.axis, 0):
        if abs(p.base - which.base) < 1e-12:
            return p.indices
    raise ValueError(f"{which.base} is not a base pole on axis {which.axis}")


def mellin_residue(alpha, which: PoleSpec, s_rest, precision: str = "double") -> complex:
    """Residue of the transform at a base pole (``delta = 0``).

    Equals the closed Gamma product times ``pi^-(s1+s2+s3) / 4`` evaluated
    at the pole; other base poles follow by permuting ``alpha``.
    """
    s = _pole_point(which, s_rest)
    return residue_normalisation(s) * residue_gamma_product(alpha, which, s_rest, precision)


def contour_residue(alpha, which: PoleSpec, s_rest, radius: float = 0.05, nodes: int = 64,
                    precision: str = "double", q: LineQuadrature | None = None) -> complex:
    """``(1/2 pi i)`` times the transform integrated around a small circle."""
    center = _pole_point(which, s_rest)
    axis = AXES.index(which.axis)
    theta = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    total = 0j
    for th in theta:
        dz = radius * complex(math.cos(th), math.sin(th))
        s = center.copy()
        s[axis] += dz
        total += mellin_transform(alpha, s, q, precision=precision) * dz
    return complex(total / nodes)


def calibration_report(alpha, s_rest=(2.0, 2.0), radius: float = 0.05, nodes: int = 48,
                       precision: str = "double") -> dict:
    """Compare contour residues with the closed products on all three axes."""
    a = as_langlands(alpha).alpha
    rows = []
    for axis in AXES:
        which = pole_lattice(a, axis, 0)[0]
        numeric = contour_residue(a, which, s_rest, radius, nodes, precision)
        product = residue_gamma_product(a, which, s_rest, precision)
        s = _pole_point(which, s_rest)
        row = {
            "axis": axis,
            "pole": which.location,
            "contour_residue": numeric,
            "gamma_product": product,
            "ratio": numeric / product,
            "expected_ratio": residue_normalisation(s),
            "relative_error": abs(numeric / (residue_normalisation(s) * product) - 1),
        }
        if axis == "s3":
            literal = residue_product_s3_literal(_reorder(a, which.indices), s[0], s[1], s[2], precision)
            row["literal_s3_ratio"] = numeric / (residue_normalisation(s) * literal)
        rows.append(row)
    return {"alpha": list(a), "s_rest": list(s_rest), "rows": rows}


# ---------------------------------------------------------------------------
# shift denominators


class ShiftDenominators(NamedTuple):
    B1: complex
    B2: complex
    B3: complex


def shift_denominators(alpha, s) -> ShiftDenominators:
    a = as_langlands(alpha).alpha
    s1, s2, s3 = (complex(x) for x in s)
    b1 = np.prod([s1 + a[k] for k in range(4)])
    b2 = np.prod([s2 + a[j] + a[k] for j in range(4) for k in range(j + 1, 4)])
    b3 = np.prod([s3 - a[k] for k in range(4)])
    return ShiftDenominators(complex(b1), complex(b2), complex(b3))


# ---------------------------------------------------------------------------
# Whittaker values by inverse Mellin transform on a tensor grid


@dataclass
class MellinGrid:
    """Transform values on ``s = u + i xi`` with ``xi`` on a uniform grid."""

    alpha: np.ndarray
    u: np.ndarray
    xi: np.ndarray
    values: np.ndarray
    errors: np.ndarray

    @property
    def step(self) -> float:
        return float(self.xi[1] - self.xi[0])


@njit(cache=True)
def _grid_windows(idx, m, hxi, u, alpha, h, decades, pad, klo, khi):
    num = np.empty(6)
    den = np.empty(2)
    a1 = alpha[0].imag / 2
    a2 = alpha[1].imag / 2
    for p in range(idx.shape[0]):
        x1 = hxi * (idx[p, 0] - m) / 2
        x2 = hxi * (idx[p, 1] - m) / 2
        x3 = hxi * (idx[p, 2] - m) / 2
        num[0] = -x1
        num[1] = -(x2 + a1)
        num[2] = -(x2 + a2)
        num[3] = -(x3 + a1 + a2)
        num[4] = alpha[2].imag / 2
        num[5] = alpha[3].imag / 2
        den[0] = -(x1 + x2 + a1 + a2)
        den[1] = -(x2 + x3)
        lo, hi = _envelope_window_nb(num, den, decades, pad)
        klo[p] = int(np.ceil(lo / h))
        khi[p] = int(np.floor(hi / h))


@njit(cache=True)
def _grid_sum(idx, m, r, klo, khi, tables, qmin, lin, sgn, pref, out, err):
    nf = tables.shape[0]
    for p in range(idx.shape[0]):
        j1 = idx[p, 0] - m
        j2 = idx[p, 1] - m
        j3 = idx[p, 2] - m
        base = np.empty(nf, dtype=np.int64)
        for f in range(nf):
            base[f] = r * (lin[f, 0] * j1 + lin[f, 1] * j2 + lin[f, 2] * j3) - qmin[f]
        total = 0j
        even = 0j
        for k in range(klo[p], khi[p] + 1):
            v = pref[p]
            for f in range(4):
                v += tables[f, base[f] + sgn[f] * k]
            for f in range(4, 6):
                v += tables[f, base[f] + sgn[f] * k]
            for f in range(6, 8):
                v -= tables[f, base[f] + sgn[f] * k]
            e = np.exp(v)
            total += e
            if k % 2 == 0:
                even += e
        out[p] = total
        # geometric convergence: the step-h error is about the square of the step-2h one
        d = abs(total - 2.0 * even)
        err[p] = min(d, d * d / max(abs(total), 1e-300))


def _grid_sum_numpy(idx, m, r, klo, khi, tables, qmin, lin, sgn, pref, out, err):
    j = idx - m
    for p in range(idx.shape[0]):
        k = np.arange(klo[p], khi[p] + 1)
        v = np.full(k.shape, pref[p], dtype=complex)
        for f in range(tables.shape[0]):
            q = r * int(lin[f] @ j[p]) - qmin[f] + sgn[f] * k
            v = v + tables[f, q] if f < 6 else v - tables[f, q]
        e = np.exp(v)
        out[p] = e.sum()
        d = abs(e.sum() - 2.0 * e[k % 2 == 0].sum())
        err[p] = min(d, d * d / max(abs(out[p]), 1e-300))


# factor layout: four Gamma(t + .), two Gamma(-t + .), two 1/Gamma(t + .)
_LIN = np.array([[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0], [0, 0, 0], [1, 1, 0], [0, 1, 1]],
                dtype=np.int64)
_SGN = np.array([1, 1, 1, 1, -1, -1, 1, 1], dtype=np.int64)


class _GridEvaluator:
    """Transform values on ``s = u + i hxi (j - m)``, ``j`` in ``0..2m``.

    All points share the t-contour ``Re t = c`` and the node spacing ``h``,
    chosen so that ``hxi/2`` is an integer multiple ``r`` of ``h``.  Every
    Gamma factor of the t-integrand then runs along a one-dimensional
    lattice and is read from a precomputed table.
    """

    def __init__(self, alpha, u, hxi, m, h_factor=3.0, decades=ENVELOPE_DECADES, pad=3.0, backend=None):
        a = as_langlands(alpha).alpha
        if np.any(np.abs(a.real) > 1e-12):
            raise ValueError("grid evaluation expects purely imaginary alpha")
        self.alpha = a.astype(complex)
        self.u = np.asarray(u, dtype=float)
        self.hxi, self.m = float(hxi), int(m)
        gap = float(self.u.min()) / 2.0
        self.c = -gap / 2.0
        self.r = max(1, int(math.ceil((hxi / 2.0) / (gap / 2.0 / h_factor))))
        self.h = (hxi / 2.0) / self.r
        self.decades, self.pad = decades, pad
        self.use_numba = HAS_NUMBA if backend is None else backend == "numba"
        a2 = self.alpha / 2
        ca = self.c
        u2 = self.u / 2
        # real part and imaginary offset of each factor's argument
        self.x0 = np.array([ca + u2[0], ca + u2[1] + a2[0].real, ca + u2[1] + a2[1].real,
                            ca + u2[2] + (a2[0] + a2[1]).real, a2[2].real - ca, a2[3].real - ca,
                            ca + u2[0] + u2[1] + (a2[0] + a2[1]).real, ca + u2[1] + u2[2]])
        self.y0 = np.array([0.0, a2[0].imag, a2[1].imag, (a2[0] + a2[1]).imag, a2[2].imag, a2[3].imag,
                            (a2[0] + a2[1]).imag, 0.0])
        j = np.arange(-self.m, self.m + 1)
        sig = u2[None, :] + 0.5j * self.hxi * j[:, None]
        self.pref_axis = [
            log_gamma(sig[:, 0] + a2[0]) + log_gamma(sig[:, 0] + a2[1]),
            log_gamma(sig[:, 1] - a2[0] - a2[1]) + log_gamma(sig[:, 1] + a2[0] + a2[1]),
            log_gamma(sig[:, 2] - a2[0]) + log_gamma(sig[:, 2] - a2[1]),
        ]

    def evaluate(self, idx):
        idx = np.ascontiguousarray(np.asarray(idx, dtype=np.int64).reshape(-1, 3))
        n = idx.shape[0]
        klo = np.empty(n, dtype=np.int64)
        khi = np.empty(n, dtype=np.int64)
        _grid_windows(idx, self.m, self.hxi, self.u, self.alpha, self.h, self.decades, self.pad, klo, khi)
        jj = idx - self.m
        lin_r = self.r * (jj @ _LIN.T)                      # (n, 8)
        qlo = np.where(_SGN > 0, lin_r + klo[:, None] * _SGN, lin_r + khi[:, None] * _SGN).min(axis=0)
        qhi = np.where(_SGN > 0, lin_r + khi[:, None] * _SGN, lin_r + klo[:, None] * _SGN).max(axis=0)
        width = int((qhi - qlo).max()) + 1
        tables = np.zeros((8, width), dtype=complex)
        for f in range(8):
            q = np.arange(qlo[f], qlo[f] + width)
            # Gamma(-t + a): the lattice variable enters with the opposite sign
            z = self.x0[f] + 1j * (self.y0[f] + self.h * q)
            tables[f] = log_gamma(z)
        s_sum = self.u.sum() + 1j * self.hxi * jj.sum(axis=1)
        pref = (self.pref_axis[0][idx[:, 0]] + self.pref_axis[1][idx[:, 1]] + self.pref_axis[2][idx[:, 2]]
                - 3.0 * math.log(2.0) - LOG_PI * s_sum)
        out = np.empty(n, dtype=complex)
        err = np.empty(n)
        kernel = _grid_sum if self.use_numba else _grid_sum_numpy
        kernel(idx, self.m, self.r, klo, khi, tables, qlo.astype(np.int64), _LIN, _SGN,
               np.ascontiguousarray(pref), out, err)
        scale = self.h / (2.0 * math.pi)
        return out * scale, err * scale


def build_mellin_grid(alpha, u=(1.0, 1.0, 1.0), step: float = 0.25, half_width: float = 16.0,
                      backend: str | None = None, prune: float = 1e-14, h_factor: float = 3.0) -> MellinGrid:
    """Transform values on a cubic grid of imaginary offsets.

    Points are filled outward from the centre (breadth-first over the
    26-neighbourhood) and a point's neighbours are only visited while its
    modulus exceeds ``prune`` times the running maximum; the skipped part
    of the cube is left at zero.  ``prune=0`` evaluates the full cube.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("contour abscissae must be positive")
    if not step > 0:
        raise ValueError("step must be positive")
    m = int(round(half_width / step))
    xi = step * np.arange(-m, m + 1)
    n = xi.size
    ev = _GridEvaluator(alpha, u, step, m, h_factor=h_factor, backend=backend)
    vals = np.zeros((n, n, n), dtype=complex)
    errs = np.zeros((n, n, n))
    if prune <= 0:
        idx = np.stack(np.meshgrid(*(np.arange(n),) * 3, indexing="ij"), axis=-1).reshape(-1, 3)
        v, e = ev.evaluate(idx)
        return MellinGrid(ev.alpha, u, xi, v.reshape(n, n, n), e.reshape(n, n, n))
    seen = np.zeros((n, n, n), dtype=bool)
    frontier = np.array([[m, m, m]])
    seen[m, m, m] = True
    offsets = np.array([(i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1)
                        if (i, j, k) != (0, 0, 0)])
    peak = 0.0
    while frontier.size:
        v, e = ev.evaluate(frontier)
        idx = tuple(frontier.T)
        vals[idx] = v
        errs[idx] = e
        peak = max(peak, float(np.abs(v).max()))
        keep = frontier[np.abs(v) > prune * peak]
        cand = (keep[:, None, :] + offsets[None, :, :]).reshape(-1, 3)
        cand = cand[np.all((cand >= 0) & (cand < n), axis=1)]
        cand = np.unique(cand, axis=0)
        cand = cand[~seen[tuple(cand.T)]]
        seen[tuple(cand.T)] = True
        frontier = cand
    return MellinGrid(ev.alpha, u, xi, vals, errs)


def whittaker_on_log_grid(grid: MellinGrid, x1, x2, x3) -> np.ndarray:
    """``W(e^x1, e^x2, e^x3)`` on a tensor grid of log-coordinates."""
    h = grid.step
    E = [np.exp(-1j * np.outer(np.asarray(x), grid.xi)) for x in (x1, x2, x3)]
    w = np.einsum("ai,ijk->ajk", E[0], grid.values, optimize=True)
    w = np.einsum("bj,ajk->abk", E[1], w, optimize=True)
    w = np.einsum("ck,abk->abc", E[2], w, optimize=True)
    x1, x2, x3 = (np.asarray(x, dtype=float) for x in (x1, x2, x3))
    rho = np.array([1.5, 2.0, 1.5]) - grid.u
    amp = (np.exp(rho[0] * x1)[:, None, None] * np.exp(rho[1] * x2)[None, :, None]
           * np.exp(rho[2] * x3)[None, None, :])
    return w * amp * h**3 / (2.0 * math.pi) ** 3


class WhittakerValue(NamedTuple):
    value: complex
    error: float
    underflow: bool
    u: tuple = ()


class ContourChoice(NamedTuple):
    u: tuple
    half_width: float
    step: float


def window_for(u, y) -> tuple:
    """Half-width and step of the transform grid suited to abscissa ``u`` at ``y``.

    The trapezoid images weigh like ``exp(-2 pi u / step)``, so the step
    shrinks with ``u``; large ``u`` needs a wider window around the peak.
    """
    umin = float(np.min(u))
    step = min(0.5, 0.16 * umin)
    if umin < 4.0:
        return 12.0, step
    return (24.0 if float(np.max(y)) <= 3.0 else 30.0), step


def auto_contour(y) -> ContourChoice:
    """Contour abscissa and grid window for ``whittaker_value`` at ``y``.

    Moving the lines right trades the growth of ``y^-u`` for the decay of
    the transform along the real diagonal; for ``y >= 1`` a small ``u``
    leaves the result at the bottom of a huge cancellation.
    """
    ym = float(np.max(y))
    u = (float(min(30.0, max(1.5, 8.0 * ym - 2.0))),) * 3
    return ContourChoice(u, *window_for(u, y))


def whittaker_value(alpha, y, grid: MellinGrid | None = None, *, u=None, step: float | None = None,
                    half_width: float | None = None, prune: float = 1e-12, return_details: bool = False):
    """Whittaker function at ``y`` by the inverse Mellin transform.

    The three outer line integrals use the trapezoid rule on a shared grid
    of transform values (pass ``grid`` to evaluate many ``y``).  Without a
    grid, ``u`` defaults to ``auto_contour(y)`` and the window to
    ``window_for(u, y)``.  The error estimate adds
    the absolute t-quadrature errors and the truncation at the grid edge;
    it ignores cancellation and is therefore pessimistic.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (3,) or np.any(y <= 0):
        raise ValueError("y must be three positive numbers")
    if grid is None:
        u = auto_contour(y).u if u is None else tuple(float(t) for t in u)
        auto_hw, auto_step = window_for(u, y)
        half_width = auto_hw if half_width is None else half_width
        step = auto_step if step is None else step
        grid = build_mellin_grid(alpha, u, step, half_width, prune=prune)
    x = np.log(y)
    w = whittaker_on_log_grid(grid, [x[0]], [x[1]], [x[2]])[0, 0, 0]
    amp = float(np.exp(np.dot(np.array([1.5, 2.0, 1.5]) - grid.u, x)))
    norm = amp * grid.step**3 / (2 * math.pi) ** 3
    err = float(np.sum(grid.errors) * norm)
    v = grid.values
    edge = np.concatenate([np.abs(v[[0, -1], :, :]).ravel(), np.abs(v[:, [0, -1], :]).ravel(),
                           np.abs(v[:, :, [0, -1]]).ravel()])
    err += float(edge.max() * v.size * norm)
    res = WhittakerValue(complex(w), err, bool(w == 0), tuple(float(t) for t in grid.u))
    return res if return_details else res.value


# ---------------------------------------------------------------------------
# inner product of two Whittaker functions


def inner_product_rhs(alpha, beta, s: float) -> complex:
    """``prod Gamma((s + alpha_j - beta_k)/2) / (2 pi^{s n(n-1)/2} Gamma(n s / 2))``."""
    a = as_langlands(alpha).alpha
    b = as_langlands(beta).alpha
    n = len(a)
    args = [(s + a[j] - b[k]) / 2 for j in range(n) for k in range(n)]
    logv = np.sum(log_gamma(np.array(args, dtype=complex)))
    logv -= math.log(2.0) + s * n * (n - 1) / 2 * LOG_PI + log_gamma(n * s / 2)
    return complex(np.exp(logv))


RHO = (1.5, 2.0, 1.5)


def inner_product_weight(s_real: float) -> tuple:
    """Exponents ``e`` with integrand ``W conj(W) e^{e.x}`` in log-coordinates ``x``."""
    return (3 * s_real - 3, 2 * s_real - 4, s_real - 3)


def balanced_contour(s_real: float) -> tuple:
    """``u = rho + e/2``: the weight is absorbed and ``|W|^2 e^{e.x}`` needs no growing factor."""
    return tuple(r + e / 2 for r, e in zip(RHO, inner_product_weight(s_real)))


@dataclass
class InnerProductGrid:
    """Log-coordinate window, x-spacing and transform grid for the y-quadrature.

    ``u=None`` selects ``balanced_contour(s)``.  The default window covers
    ``|W|^2`` down to about 1e-13 of its peak at ``s = 2``; the transform
    step must keep ``2 pi / mellin_step`` above the widest window side.
    """

    lower: tuple = (-6.0, -8.0, -15.0)
    upper: tuple = (2.5, 2.5, 2.5)
    points: int = 129
    mellin_step: float = 0.3
    mellin_half_width: float = 15.0
    u: tuple | None = None
    prune: float = 1e-13
    max_evaluations: float = 5e7


class InnerProduct(NamedTuple):
    lhs: complex
    rhs: complex
    ratio: complex
    lhs_parseval: complex
    u: tuple
    evaluations: int
    seconds: float


def inner_product_check(alpha, beta, s_real: float, grid: InnerProductGrid | None = None,
                        backend: str | None = None, return_details: bool = False):
    """Both sides of the inner-product formula at real ``s``.

    ``lhs`` integrates ``W_alpha conj(W_beta)`` against
    ``y1^{3s} y2^{2s} y3^{s} dy/(y1^4 y2^5 y3^4)`` over a truncated
    log-grid, with both Whittaker functions obtained from transform grids.
    The details also carry the same integral evaluated on the transform
    side (Parseval), which checks the window and the grids.
    """
    import time

    from scipy.integrate import simpson

    t0 = time.perf_counter()
    a = as_langlands(alpha).alpha
    b = as_langlands(beta).alpha
    if np.any(np.abs(a.real) > 1e-12) or np.any(np.abs(b.real) > 1e-12):
        raise ValueError("alpha and beta must be purely imaginary")
    if not s_real > 0:
        raise ValueError("s must be positive")
    g = grid or InnerProductGrid()
    u = balanced_contour(s_real) if g.u is None else tuple(g.u)
    if min(u) <= 0:
        raise ValueError("the balanced contour needs s > 1/2")
    same = bool(np.allclose(a, b))
    per_grid = (2 * int(round(g.mellin_half_width / g.mellin_step)) + 1) ** 3
    n_eval = per_grid * (1 if same else 2) + g.points**3
    if n_eval > g.max_evaluations:
        raise BudgetExceeded(f"{n_eval} evaluations exceed the budget {g.max_evaluations:g}")
    mg_a = build_mellin_grid(a, u, g.mellin_step, g.mellin_half_width, backend=backend, prune=g.prune)
    mg_b = mg_a if same else build_mellin_grid(b, u, g.mellin_step, g.mellin_half_width,
                                               backend=backend, prune=g.prune)
    xs = [np.linspace(lo, hi, g.points) for lo, hi in zip(g.lower, g.upper)]
    wa = whittaker_on_log_grid(mg_a, *xs)
    wb = wa if mg_b is mg_a else whittaker_on_log_grid(mg_b, *xs)
    expo = inner_product_weight(s_real)
    weight = (np.exp(expo[0] * xs[0])[:, None, None] * np.exp(expo[1] * xs[1])[None, :, None]
              * np.exp(expo[2] * xs[2])[None, None, :])
    integrand = wa * np.conj(wb) * weight
    lhs = complex(simpson(simpson(simpson(integrand, x=xs[2], axis=2), x=xs[1], axis=1), x=xs[0], axis=0))
    # the balanced contour pairs s with 2 Re(u) - conj(s); on a shared line this is plain Parseval
    parseval = complex(np.sum(mg_a.values * np.conj(mg_b.values)) * (mg_a.step / (2 * math.pi)) ** 3)
    rhs = inner_product_rhs(a, b, s_real)
    res = InnerProduct(lhs, rhs, lhs / rhs, parseval, u, int(np.count_nonzero(mg_a.values)),
                       time.perf_counter() - t0)
    return res if return_details else (lhs, rhs)
