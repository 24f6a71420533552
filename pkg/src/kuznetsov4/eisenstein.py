"""Langlands parameters of parabolic Eisenstein series and their Hecke eigenvalue sums."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .params import LanglandsParam, as_langlands, parse_complex_list

PARTITIONS = ((1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1))
MAX_M = 10**7


@dataclass(frozen=True)
class ParabolicClass:
    partition: tuple

    def __post_init__(self):
        p = tuple(int(x) for x in self.partition)
        object.__setattr__(self, "partition", p)
        if p not in PARTITIONS:
            raise ValueError(f"partition must be one of {PARTITIONS}")

    @classmethod
    def parse(cls, text) -> "ParabolicClass":
        if isinstance(text, ParabolicClass):
            return text
        if isinstance(text, str):
            text = [int(t) for t in text.replace("+", ",").split(",") if t.strip()]
        return cls(tuple(text))

    @property
    def blocks(self) -> tuple:
        """Ranks of the non-trivial (rank >= 2) Levi blocks, in order."""
        return tuple(k for k in self.partition if k > 1)


@dataclass(frozen=True)
class LeviSpectralData:
    """Free ``s`` variables plus spectral offsets of the cuspidal blocks.

    ``s`` holds ``(s1, s2, s3)`` for the minimal parabolic, ``(s1, s2)``
    for (2,1,1) (a third entry is accepted if ``2 s1 + s2 + s3 = 0``),
    and ``(s1,)`` for (2,2) and (3,1).  ``v`` lists one offset per GL(2)
    block and two for the GL(3) block.
    """

    s: tuple
    v: tuple = ()


def _check_constraint(pc: ParabolicClass, s: list, tol: float = 1e-12) -> list:
    p = pc.partition
    need = {(1, 1, 1, 1): 3, (2, 1, 1): 2, (2, 2): 1, (3, 1): 1}[p]
    if p == (2, 1, 1) and len(s) == 3:
        if abs(2 * s[0] + s[1] + s[2]) > tol * max(1.0, *map(abs, s)):
            raise ValueError("(2,1,1) requires 2 s1 + s2 + s3 = 0")
        return s[:2]
    if p in ((2, 2), (3, 1)) and len(s) == 2:
        # (s1, s2) with n1 s1 + n2 s2 = 0
        n1, n2 = p
        if abs(n1 * s[0] + n2 * s[1]) > tol * max(1.0, *map(abs, s)):
            raise ValueError(f"{p} requires {n1} s1 + {n2} s2 = 0")
        return s[:1]
    if len(s) != need:
        raise ValueError(f"partition {p} takes {need} free s variables")
    return s


def parabolic_langlands(pc, data: LeviSpectralData) -> LanglandsParam:
    pc = ParabolicClass.parse(pc)
    s = _check_constraint(pc, [complex(x) for x in data.s])
    v = [complex(x) for x in data.v]
    p = pc.partition
    want_v = {(1, 1, 1, 1): 0, (2, 1, 1): 1, (2, 2): 2, (3, 1): 2}[p]
    if len(v) != want_v:
        raise ValueError(f"partition {p} takes {want_v} spectral offsets")
    if p == (1, 1, 1, 1):
        s1, s2, s3 = s
        a = [3 * s1 + 2 * s2 + s3, -s1 + 2 * s2 + s3, -s1 - 2 * s2 + s3]
    elif p == (2, 1, 1):
        s1, s2 = s
        a = [s1 + v[0], s1 - v[0], s2]
    elif p == (2, 2):
        (s1,) = s
        a = [s1 + v[0], s1 - v[0], -s1 + v[1]]
    else:
        (s1,) = s
        a = [s1 + 2 * v[0] + v[1], s1 - v[0] + v[1], s1 - v[0] - 2 * v[1]]
    return LanglandsParam(tuple(a))


# ---------------------------------------------------------------------------
# divisor sums


def divisors(m: int) -> list:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return small + large[::-1]


def _check_m(m: int) -> int:
    m = int(m)
    if m < 1 or m > MAX_M:
        raise ValueError(f"m must lie in [1, {MAX_M}]")
    return m


def _power(n: int, a: complex) -> complex:
    return cmath.exp(a * math.log(n)) if a != 0 else 1.0 + 0j


def hecke_min(m: int, alpha) -> complex:
    """``sum over c1 c2 c3 c4 = m of c1^a1 c2^a2 c3^a3 c4^a4``, by nested divisor loops."""
    m = _check_m(m)
    a = as_langlands(alpha).alpha
    if len(a) != 4:
        raise ValueError("rank-4 parameters required")
    divs = divisors(m)
    logs = {d: math.log(d) for d in divs}
    pw = [{d: cmath.exp(aj * logs[d]) for d in divs} for aj in a]
    total = 0j
    for c1 in divs:
        m1 = m // c1
        p1 = pw[0][c1]
        for c2 in divs:
            if m1 % c2:
                continue
            m2 = m1 // c2
            p2 = p1 * pw[1][c2]
            for c3 in divs:
                if m2 % c3 == 0:
                    total += p2 * pw[2][c3] * pw[3][m2 // c3]
    return complex(total)


def _dirichlet(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Dirichlet convolution of two arrays indexed 1..N (index 0 unused)."""
    N = len(f) - 1
    out = np.zeros(N + 1, dtype=np.result_type(f, g))
    for d in range(1, N + 1):
        if f[d] != 0:
            out[d::d][: N // d] += f[d] * g[1 : N // d + 1]
    return out


def hecke_min_table(N: int, alpha) -> np.ndarray:
    """``hecke_min(m)`` for all ``m <= N`` at once (index ``m``; entry 0 unused)."""
    a = as_langlands(alpha).alpha
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    out = None
    for aj in a:
        f = np.exp(aj * np.log(n))
        f[0] = 0
        out = f if out is None else _dirichlet(out, f)
    return out


def d4_table(N: int) -> np.ndarray:
    """Number of ordered factorisations into four parts, for ``m <= N``."""
    one = np.ones(N + 1, dtype=np.int64)
    one[0] = 0
    out = one
    for _ in range(3):
        out = _dirichlet(out, one)
    return out


def d4(m: int) -> int:
    m = _check_m(m)
    total = 0
    for c1 in divisors(m):
        for c2 in divisors(m // c1):
            total += len(divisors(m // c1 // c2))
    return total


# ---------------------------------------------------------------------------
# Levi rows


class EigenvalueProvider:
    """Hecke eigenvalues ``lambda(k)`` of a lower-rank form, from a callable or a sequence.

    A sequence is read as ``lambda(1), lambda(2), ...``.
    """

    def __init__(self, source: Callable[[int], complex] | Sequence[complex] | None = None,
                 multiplicative: bool = False, name: str = ""):
        self.name = name
        self.multiplicative = multiplicative
        if source is None:
            self._f = lambda k: 1.0
            self.multiplicative = True
        elif callable(source):
            self._f = source
        else:
            vals = [complex(x) for x in source]
            self._vals = vals

            def f(k):
                if k > len(vals):
                    raise IndexError(f"provider {name!r} has no eigenvalue for {k}")
                return vals[k - 1]

            self._f = f
        if abs(complex(self(1)) - 1) > 1e-12:
            raise ValueError("an eigenvalue provider must have lambda(1) = 1")

    def __call__(self, k: int) -> complex:
        return complex(self._f(int(k)))

    @classmethod
    def from_file(cls, path: str) -> "EigenvalueProvider":
        with open(path) as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            vals = data["values"]
            mult = bool(data.get("multiplicative", False))
        else:
            vals, mult = data, False
        vals = [complex(*v) if isinstance(v, list) else parse_complex_list(str(v))[0]
                if isinstance(v, str) else complex(v) for v in vals]
        return cls(vals, multiplicative=mult, name=str(path))


def constant_provider() -> EigenvalueProvider:
    return EigenvalueProvider(None, name="constant")


def gl2_eisenstein_provider(v: complex) -> EigenvalueProvider:
    """``lambda(n) = sum_{ab=n} a^v b^-v``."""
    v = complex(v)
    return EigenvalueProvider(lambda n: sum(_power(a, v) * _power(n // a, -v) for a in divisors(n)),
                              multiplicative=True, name=f"gl2-eis({v})")


def gl3_eisenstein_provider(v: complex, vp: complex) -> EigenvalueProvider:
    """Divisor sum with the GL(3) parameters ``(2v+v', -v+v', -v-2v')``."""
    b = (2 * v + vp, -v + vp, -v - 2 * vp)

    def f(n):
        tot = 0j
        for a in divisors(n):
            for c in divisors(n // a):
                tot += _power(a, b[0]) * _power(c, b[1]) * _power(n // a // c, b[2])
        return tot

    return EigenvalueProvider(f, multiplicative=True, name=f"gl3-eis({v},{vp})")


def hecke_levi(pc, m: int, s, providers: Sequence[EigenvalueProvider] | None = None) -> complex:
    """Hecke eigenvalue ``lambda((m,1,1), s)`` of the Eisenstein series for partition ``pc``."""
    pc = ParabolicClass.parse(pc)
    m = _check_m(m)
    s = [complex(x) for x in (s if isinstance(s, (list, tuple)) else [s])]
    s = _check_constraint(pc, s)
    p = pc.partition
    providers = list(providers or [])
    if len(providers) != len(pc.blocks):
        raise ValueError(f"partition {p} needs {len(pc.blocks)} eigenvalue providers")
    if p == (1, 1, 1, 1):
        return hecke_min(m, parabolic_langlands(pc, LeviSpectralData(tuple(s))))
    total = 0j
    if p == (2, 1, 1):
        s1, s2 = s
        lam = providers[0]
        for c1 in divisors(m):
            base = lam(c1) * _power(c1, s1)
            r = m // c1
            for c2 in divisors(r):
                total += base * _power(c2, s2) * _power(r // c2, -2 * s1 - s2)
    elif p == (2, 2):
        (s1,) = s
        l1, l2 = providers
        for c1 in divisors(m):
            c2 = m // c1
            total += l1(c1) * l2(c2) * _power(c1, s1) * _power(c2, -s1)
    else:
        (s1,) = s
        lam = providers[0]
        for c1 in divisors(m):
            total += lam(c1) * _power(c1, s1) * _power(m // c1, -3 * s1)
    return complex(total)
