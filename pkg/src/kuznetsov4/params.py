"""Spectral and Langlands parameters for GL(n), n in {2, 3, 4}.

Spectral parameters ``v`` are offsets from ``1/n``; Langlands parameters
``alpha`` sum to zero.  The rank-4 maps use the linear forms

    alpha1 = 3v1 + 2v2 + v3
    alpha2 = -v1 + 2v2 + v3
    alpha3 = -v1 - 2v2 + v3
    alpha4 = -v1 - 2v2 - 3v3

and ranks 2 and 3 use the analogous matrix from ``_langlands_matrix``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

SUPPORTED_RANKS = (2, 3, 4)


class RankError(ValueError):
    """Raised for ranks outside {2, 3, 4} or mismatched lengths."""


def _langlands_matrix(n: int) -> np.ndarray:
    """Integer matrix ``B`` (n x (n-1)) with ``alpha = B @ v``.

    Column ``k`` (0-based) has entries ``n-1-k`` in rows ``0..k`` and
    ``-(k+1)`` in rows ``k+1..n-1``; every column sums to zero.  For n = 4
    this reproduces the four displayed linear forms.
    """
    B = np.zeros((n, n - 1))
    for k in range(n - 1):
        B[: k + 1, k] = n - 1 - k
        B[k + 1 :, k] = -(k + 1)
    return B


@dataclass(frozen=True)
class SpectralParam:
    v: tuple
    n: int

    def __post_init__(self):
        if self.n not in SUPPORTED_RANKS:
            raise RankError(f"unsupported rank n={self.n}")
        if len(self.v) != self.n - 1:
            raise RankError(f"rank {self.n} needs {self.n - 1} spectral entries, got {len(self.v)}")
        if not all(np.isfinite(complex(x)) for x in self.v):
            raise ValueError("spectral parameters must be finite")


@dataclass(frozen=True)
class LanglandsParam:
    """Langlands parameters; the last entry is always derived from the others."""

    head: tuple

    @classmethod
    def from_alpha(cls, alpha: Sequence[complex], tol: float = 1e-12) -> "LanglandsParam":
        alpha = [complex(a) for a in alpha]
        n = len(alpha)
        if n not in SUPPORTED_RANKS:
            raise RankError(f"unsupported rank n={n}")
        total = sum(alpha)
        if abs(total) > tol * max(1.0, max(abs(a) for a in alpha)):
            raise ValueError(f"Langlands parameters must sum to zero (sum = {total})")
        return cls(tuple(alpha[:-1]))

    @property
    def n(self) -> int:
        return len(self.head) + 1

    @property
    def alpha(self) -> np.ndarray:
        a = np.empty(self.n, dtype=complex)
        a[:-1] = self.head
        a[-1] = -sum(self.head)
        return a

    def __iter__(self):
        return iter(self.alpha)

    def __len__(self):
        return self.n

    def permuted(self, perm: Sequence[int]) -> "LanglandsParam":
        a = self.alpha
        return LanglandsParam.from_alpha([a[i] for i in perm])

    def negated(self) -> "LanglandsParam":
        return LanglandsParam(tuple(-x for x in self.head))

    def conjugated(self) -> "LanglandsParam":
        return LanglandsParam(tuple(np.conj(x) for x in self.head))


def as_langlands(alpha) -> LanglandsParam:
    if isinstance(alpha, LanglandsParam):
        return alpha
    return LanglandsParam.from_alpha(alpha)


def spectral_to_langlands(v) -> LanglandsParam:
    if not isinstance(v, SpectralParam):
        v = SpectralParam(tuple(complex(x) for x in v), len(v) + 1)
    B = _langlands_matrix(v.n)
    vv = np.asarray(v.v, dtype=complex)
    head = B[:-1] @ vv
    return LanglandsParam(tuple(complex(x) for x in head))


def langlands_to_spectral(alpha) -> SpectralParam:
    a = as_langlands(alpha).alpha
    n = len(a)
    # consecutive differences invert the linear forms: v_i = (a_i - a_{i+1}) / n
    v = tuple(complex((a[i] - a[i + 1]) / n) for i in range(n - 1))
    return SpectralParam(v, n)


def is_exponents(s: Sequence[complex]) -> tuple:
    """Exponents of (y1, y2, y3) in the power function I_s on GL(4)."""
    if len(s) != 3:
        raise RankError("I_s exponents are defined for three variables")
    s1, s2, s3 = (complex(x) for x in s)
    return (s1 + 2 * s2 + 3 * s3, 2 * s1 + 4 * s2 + 2 * s3, 3 * s1 + 2 * s2 + s3)


def laplace_eigenvalue(alpha) -> complex:
    a = as_langlands(alpha).alpha
    n = len(a)
    return complex((n**3 - n) / 24 - np.sum(a * a) / 2)


def weyl_orbit(alpha) -> list:
    """All 24 permutations of a rank-4 parameter, identity first."""
    lp = as_langlands(alpha)
    if lp.n != 4:
        raise RankError("the Weyl orbit is implemented for rank 4")
    return [lp.permuted(p) for p in permutations(range(4))]


def random_imaginary_alpha(rng: np.random.Generator, n: int = 4, scale: float = 1.0,
                           min_gap: float = 0.0, max_tries: int = 10_000) -> LanglandsParam:
    """Purely imaginary parameters with pairwise gaps of at least ``min_gap``."""
    for _ in range(max_tries):
        t = rng.uniform(-scale, scale, size=n)
        t -= t.mean()
        if min_gap <= 0 or np.min(np.abs(t[:, None] - t[None, :])[~np.eye(n, dtype=bool)]) >= min_gap:
            return LanglandsParam.from_alpha(1j * t)
    raise RuntimeError("could not draw well-separated parameters")


def parse_complex_list(text: str | Iterable) -> list:
    """Parse ``"0.3i,0.1i,-0.4i"`` style lists (``i`` or ``j`` suffix)."""
    if not isinstance(text, str):
        return [complex(x) for x in text]
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        tok = tok.replace("i", "j")
        if tok in {"j", "+j"}:
            tok = "1j"
        elif tok == "-j":
            tok = "-1j"
        out.append(complex(tok))
    return out


# ---------------------------------------------------------------------------
# relevant Weyl elements


@dataclass(frozen=True)
class WeylElement:
    """Signed permutation matrix; ``perm[j]`` is the row holding column ``j``'s entry."""

    label: str
    matrix: tuple

    def __post_init__(self):
        m = np.array(self.matrix, dtype=int)
        n = m.shape[0]
        if m.shape != (n, n) or not np.array_equal(np.abs(m).sum(axis=0), np.ones(n)) \
                or not np.array_equal(np.abs(m).sum(axis=1), np.ones(n)):
            raise ValueError("not a signed permutation matrix")
        if round(np.linalg.det(m)) != 1:
            raise ValueError(f"{self.label} has determinant {round(np.linalg.det(m))}")

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def perm(self) -> tuple:
        return tuple(next(i for i in range(self.n) if self.matrix[i][j]) for j in range(self.n))

    @property
    def signs(self) -> tuple:
        return tuple(self.matrix[self.perm[j]][j] for j in range(self.n))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=int)


def _signed_perm(entries, n=4) -> tuple:
    m = [[0] * n for _ in range(n)]
    for (i, j, s) in entries:
        m[i - 1][j - 1] = s
    return tuple(tuple(r) for r in m)


WEYL_ELEMENTS = {
    "w1": WeylElement("w1", _signed_perm([(1, 1, 1), (2, 2, 1), (3, 3, 1), (4, 4, 1)])),
    "w2": WeylElement("w2", _signed_perm([(1, 4, -1), (2, 1, 1), (3, 2, 1), (4, 3, 1)])),
    "w3": WeylElement("w3", _signed_perm([(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, -1)])),
    "w4": WeylElement("w4", _signed_perm([(1, 3, 1), (2, 4, 1), (3, 1, 1), (4, 2, 1)])),
    "w5": WeylElement("w5", _signed_perm([(1, 4, -1), (2, 2, 1), (3, 3, 1), (4, 1, 1)])),
    "w6": WeylElement("w6", _signed_perm([(1, 3, 1), (2, 4, 1), (3, 2, 1), (4, 1, -1)])),
    "w7": WeylElement("w7", _signed_perm([(1, 4, -1), (2, 3, 1), (3, 1, 1), (4, 2, 1)])),
    "w8": WeylElement("w8", _signed_perm([(1, 4, 1), (2, 3, 1), (3, 2, 1), (4, 1, 1)])),
}


def weyl_element(label) -> WeylElement:
    if isinstance(label, WeylElement):
        return label
    try:
        return WEYL_ELEMENTS[str(label).lower()]
    except KeyError:
        raise ValueError(f"unknown Weyl element {label!r}; expected w1..w8") from None
