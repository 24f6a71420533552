"""Characters of the unipotent group and Kloosterman sums by cell enumeration.

The GL(n) engine works for any signed permutation ``w`` and modulus torus
``c``.  A cell representative ``u'`` of the opposite unipotent part has
entries ``a/D`` with ``0 <= a < D``; the rows of ``A = c w u'`` are fixed
bottom-up, and at each level the partial row lattice must be integral and
saturated for some upper unitriangular ``u`` to make ``u A`` lie in
SL(n, Z).  Everything is exact until the final ``exp(2 pi i theta)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded
from .params import WeylElement, weyl_element

DEFAULT_MAX_CELLS = 10**7


class CellBudgetExceeded(BudgetExceeded):
    """Enumeration size above the cell budget."""


# ---------------------------------------------------------------------------
# characters


def _frac_mod1(x) -> Fraction:
    f = Fraction(x)
    return f - math.floor(f)


def e(theta) -> complex:
    """``exp(2 pi i theta)``; rational arguments are reduced mod 1 exactly first."""
    if isinstance(theta, (int, Fraction)):
        t = _frac_mod1(theta)
        return complex(np.exp(2j * math.pi * float(t)))
    return complex(np.exp(2j * math.pi * theta))


def _check_unipotent(u):
    n = len(u)
    for i in range(n):
        if u[i][i] != 1 or any(u[i][j] != 0 for j in range(i)):
            raise ValueError("expected an upper unitriangular matrix")


def character_phase(M: Sequence[int], u) -> Fraction | float:
    """``sum m_i u_{i,i+1}``, reduced mod 1 when exact."""
    n = len(u)
    if len(M) != n - 1:
        raise ValueError(f"character needs {n - 1} entries")
    theta = sum(M[i] * u[i][i + 1] for i in range(n - 1))
    if isinstance(theta, (int, Fraction)):
        return _frac_mod1(theta)
    return float(theta) % 1.0


def psi(M: Sequence[int], u) -> complex:
    """``exp(2 pi i (m1 u12 + m2 u23 + ...))`` for an upper unitriangular ``u``."""
    u = [list(r) for r in u]
    _check_unipotent(u)
    return e(character_phase(M, u))


def twist(M: Sequence[int], v: Sequence[int]) -> tuple:
    """Character triple of ``psi_M(v^-1 u v)``: ``m_i v_i v_{i+1}``."""
    v = parse_twist(v, len(M) + 1)
    return tuple(int(M[i]) * v[i] * v[i + 1] for i in range(len(M)))


def psi_twisted(M: Sequence[int], v: Sequence[int], u) -> complex:
    return psi(twist(M, v), u)


def parse_twist(v, n: int = 4) -> tuple:
    """Accept ``(1,-1,...)`` or ``"+,-,+,-"``; the product must be +1."""
    if v is None:
        return (1,) * n
    if isinstance(v, str):
        toks = [t.strip() for t in v.split(",") if t.strip()]
        v = [1 if t in {"+", "+1", "1"} else -1 if t in {"-", "-1"} else None for t in toks]
        if None in v:
            raise ValueError("twist entries must be + or -")
    v = tuple(int(x) for x in v)
    if len(v) != n or any(x not in (1, -1) for x in v):
        raise ValueError(f"twist needs {n} entries of +-1")
    if math.prod(v) != 1:
        raise ValueError("twist entries must multiply to +1")
    return v


# ---------------------------------------------------------------------------
# classical sums


def classical_kloosterman(m: int, n: int, c: int) -> float:
    """``S(m, n; c)`` as a direct loop over units mod ``c``."""
    if c < 1:
        raise ValueError("modulus must be positive")
    if c == 1:
        return 1.0
    d = np.arange(1, c, dtype=np.int64)
    d = d[np.gcd(d, c) == 1]
    dbar = np.array([pow(int(x), -1, c) for x in d], dtype=np.int64)
    k = (m % c * d + n % c * dbar) % c
    return float(np.sum(np.cos(2 * math.pi * k / c)))


def divisor_count(n: int) -> int:
    count, p = 1, 2
    while p * p <= n:
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        count *= k + 1
        p += 1
    return count * (2 if n > 1 else 1)


def weil_bound(m: int, n: int, c: int) -> float:
    return math.sqrt(math.gcd(math.gcd(m, n), c)) * math.sqrt(c) * divisor_count(c)


# ---------------------------------------------------------------------------
# exact integer linear algebra helpers


def _egcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _reduce_columns(V, b, start):
    """Column operations on ``V[:, start:]`` sending the primitive vector ``b`` to ``e_start``."""
    n = len(V)
    b = list(b)
    k = len(b)
    for j in range(1, k):
        if b[j] == 0:
            continue
        g, x, y = _egcd(b[0], b[j])
        p, q = b[0] // g, b[j] // g
        c0, cj = start, start + j
        for row in V:
            a0, aj = row[c0], row[cj]
            row[c0] = x * a0 + y * aj
            row[cj] = -q * a0 + p * aj
        b[0], b[j] = g, 0
    if b[0] < 0:
        for row in V:
            row[start] = -row[start]
        b[0] = -b[0]
    assert b[0] == 1 and len(V) == n


def _inverse(M) -> list:
    """Exact inverse of a small rational matrix."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


# ---------------------------------------------------------------------------
# cells


def modulus_torus(c: Sequence[int]) -> tuple:
    """``diag(1/c_{n-1}, c_{n-1}/c_{n-2}, ..., c2/c1, c1)`` for ``c = (c1, ..., c_{n-1})``."""
    c = [int(x) for x in c]
    if any(x < 1 for x in c):
        raise ValueError("moduli must be positive integers")
    k = len(c)
    d = [Fraction(1, c[k - 1])]
    for i in range(k - 1, 0, -1):
        d.append(Fraction(c[i], c[i - 1]))
    d.append(Fraction(c[0]))
    return tuple(d)


def _as_weyl(w) -> WeylElement:
    if isinstance(w, WeylElement):
        return w
    if isinstance(w, str):
        return weyl_element(w)
    return WeylElement("custom", tuple(tuple(int(x) for x in r) for r in w))


def opposite_positions(w) -> list:
    """Free entries ``(i, j)``, ``i < j``, of the opposite unipotent group of ``w``."""
    w = _as_weyl(w)
    pi = w.perm
    return [(i, j) for i in range(w.n) for j in range(i + 1, w.n) if pi[i] > pi[j]]


def same_side_positions(w) -> list:
    w = _as_weyl(w)
    pi = w.perm
    return [(i, j) for i in range(w.n) for j in range(i + 1, w.n) if pi[i] < pi[j]]


class Cell(NamedTuple):
    left: tuple     # upper unitriangular u with u c w u' integral
    right: tuple    # representative u'
    gamma: tuple    # the integral matrix u c w u'


def _enumerate(w: WeylElement, d, D: int, stats: Counter):
    n = w.n
    pi = w.perm
    sg = w.signs
    inv_pi = [0] * n
    for j, p in enumerate(pi):
        inv_pi[p] = j
    free = opposite_positions(w)
    free_by_row = {r: [j for (i, j) in free if i == r] for r in range(n)}
    # A_i = d_i * s_r * (row r of u'),  r = pi^{-1}(i)
    order = list(range(n - 1, -1, -1))
    cells = []

    def rec(level, V, chosen):
        if level == n:
            cells.append(dict(chosen))
            return
        i = order[level]
        r = inv_pi[i]
        cols = free_by_row[r]
        scale = d[i] * sg[r]
        num, den = scale.numerator, scale.denominator * D
        k = len(cols)
        if k:
            grid = np.array(list(product(range(D), repeat=k)), dtype=object)
        else:
            grid = np.zeros((1, 0), dtype=object)
        stats["candidates"] += len(grid)
        m = level
        for row_vals in grid:
            base = [0] * n
            base[r] = D
            for col, a in zip(cols, row_vals):
                base[col] = int(a)
            # (A_i V) scaled by den: num * base @ V
            vec = [num * sum(base[t] * V[t][j] for t in range(n)) for j in range(n)]
            tail = vec[m:]
            if any(x % den for x in tail):
                continue
            tail = [x // den for x in tail]
            if math.gcd(*tail) != 1:
                continue
            V2 = [list(rw) for rw in V]
            _reduce_columns(V2, tail, m)
            chosen[r] = tuple(int(a) for a in row_vals)
            rec(level + 1, V2, chosen)
            del chosen[r]

    identity = [[int(i == j) for j in range(n)] for i in range(n)]
    rec(0, identity, {})

    out = []
    W = [[Fraction(x) for x in row] for row in w.matrix]
    for choice in cells:
        up = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for r, vals in choice.items():
            for col, a in zip(free_by_row[r], vals):
                up[r][col] = Fraction(a, D)
        A = _matmul([[d[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)], _matmul(W, up))
        out.append((up, A))
    stats["cells"] += len(out)
    return out, cells


def _solve_left(A) -> tuple:
    """Upper unitriangular ``u`` with ``u A`` integral, found row by row from the bottom."""
    n = len(A)
    gamma = [None] * n
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    for m, i in enumerate(range(n - 1, -1, -1)):
        a = [sum(A[i][t] * V[t][j] for t in range(n)) for j in range(n)]
        tail = a[m:]
        if any(x.denominator != 1 for x in tail):
            raise ArithmeticError("row is not integral")
        tail = [int(x) for x in tail]
        if math.gcd(*tail) != 1:
            raise ArithmeticError("row lattice is not saturated")
        _reduce_columns(V, tail, m)
    Vinv = _inverse(V)
    for m, i in enumerate(range(n - 1, -1, -1)):
        gamma[i] = Vinv[m]
    u = _matmul(gamma, _inverse(A))
    for i in range(n):
        for j in range(n):
            want = 1 if i == j else 0
            if j <= i and u[i][j] != want:
                raise ArithmeticError("left factor is not unitriangular")
    return tuple(tuple(r) for r in u), tuple(tuple(int(x) for x in r) for r in gamma)


def bruhat_cells(w, c: Sequence[int], D: int | None = None, *, max_cells: int = DEFAULT_MAX_CELLS,
                 stats: Counter | None = None) -> list:
    """All cells ``U(Z) \\ (SL(n,Z) ∩ U c w U) / Ubar_w(Z)`` with denominators dividing ``D``."""
    w = _as_weyl(w)
    d = modulus_torus(c)
    if len(d) != w.n:
        raise ValueError("modulus length does not match the Weyl element")
    D = math.lcm(*[int(x) for x in c]) if D is None else int(D)
    est = cell_estimate(w, D)
    if est > max_cells:
        raise CellBudgetExceeded(f"{est} candidate cells exceed the budget of {max_cells}")
    stats = Counter() if stats is None else stats
    raw, _ = _enumerate(w, d, D, stats)
    out = []
    for up, A in raw:
        u, gamma = _solve_left(A)
        out.append(Cell(u, tuple(tuple(r) for r in up), gamma))
    return out


def cell_estimate(w, D: int) -> int:
    """Upper bound ``D ** dim`` on the number of enumerated representatives."""
    return int(D) ** len(opposite_positions(w))


# ---------------------------------------------------------------------------
# compatibility


def compatibility(L: Sequence[int], M: Sequence[int], c: Sequence[int], w) -> list:
    """Violated conditions ``psi_L(c w u w^-1 c^-1) = psi_M(u)`` on ``U_w``, as strings.

    Both sides are linear in the entries of ``u``; each position of ``U_w``
    gives one equation between coefficients.
    """
    w = _as_weyl(w)
    d = modulus_torus(c)
    pi, sg = w.perm, w.signs
    bad = []
    for (i, j) in same_side_positions(w):
        rhs = Fraction(M[i]) if j == i + 1 else Fraction(0)
        a, b = pi[i], pi[j]
        lhs = Fraction(0)
        if b == a + 1:
            lhs = L[a] * sg[i] * sg[j] * d[a] / d[b]
        if lhs != rhs:
            bad.append(f"position ({i + 1},{j + 1}): {lhs} != {rhs}")
    return bad


# ---------------------------------------------------------------------------
# sums


class KloostermanResult(NamedTuple):
    value: complex
    cells: int
    candidates: int
    denominator: int
    compatible: bool
    violations: tuple
    saturated: bool | None
    trivial_bound: int
    within_trivial_bound: bool
    estimate: int


def _sum_cells(cells, L, M) -> tuple:
    phases = []
    for cell in cells:
        th = character_phase(L, cell.left) + character_phase(M, cell.right)
        phases.append(_frac_mod1(th))
    counts = Counter(phases)
    value = sum(cnt * e(th) for th, cnt in counts.items())
    return complex(value), phases


def _smallest_prime(D: int) -> int:
    p = 2
    while D % p:
        p += 1
    return p


def kloosterman_sum(L: Sequence[int], M: Sequence[int], c: Sequence[int], w, v=None, *,
                    max_cells: int = DEFAULT_MAX_CELLS, check_saturation: bool = False,
                    enforce_compatibility: bool = True, denominator: int | None = None) -> KloostermanResult:
    """Kloosterman sum ``S_w(psi_L, psi_M^v, c)`` for any rank.

    When the characters are incompatible on ``U_w`` the sum is not well
    defined on the double coset; it is reported as 0 unless
    ``enforce_compatibility=False``, which returns the raw cell sum.
    """
    w = _as_weyl(w)
    n = w.n
    L = tuple(int(x) for x in L)
    M = twist(M, v) if v is not None else tuple(int(x) for x in M)
    if len(L) != n - 1 or len(M) != n - 1 or len(c) != n - 1:
        raise ValueError(f"characters and moduli need {n - 1} entries")
    D = math.lcm(*[int(x) for x in c]) if denominator is None else int(denominator)
    violations = tuple(compatibility(L, M, c, w))
    compatible = not violations
    stats = Counter()
    cells = bruhat_cells(w, c, D, max_cells=max_cells, stats=stats)
    value, _ = _sum_cells(cells, L, M)
    saturated = None
    if check_saturation and D > 1:
        D2 = D * _smallest_prime(D)
        more = bruhat_cells(w, c, D2, max_cells=max_cells)
        saturated = len(more) == len(cells)
    if enforce_compatibility and not compatible:
        value = 0j
    bound = math.prod(int(x) for x in c)
    return KloostermanResult(value, len(cells), int(stats["candidates"]), D, compatible, violations,
                             saturated, bound, abs(value) <= bound * (1 + 1e-12),
                             cell_estimate(w, D))


def gl4_kloosterman_bruhat(L, M, c, w, v=None, **kwargs) -> KloostermanResult:
    """GL(4) sum for one of ``w1 .. w8`` (or any signed 4x4 permutation)."""
    w = _as_weyl(w)
    if w.n != 4:
        raise ValueError("expected a 4x4 Weyl element")
    return kloosterman_sum(L, M, c, w, v, **kwargs)


GL2_W = WeylElement("gl2", ((0, -1), (1, 0)))


def gl2_kloosterman(m: int, n: int, c: int) -> complex:
    """Rank-2 sum through the cell engine (equals ``S(n, m; c)``)."""
    return kloosterman_sum((m,), (n,), (c,), GL2_W).value


# ---------------------------------------------------------------------------
# long element, prime-power moduli


@dataclass(frozen=True)
class LocalParams:
    p: int
    t: int
    r: int
    s: int
    nu: tuple = (1, 1, 1)
    nu_prime: tuple = (1, 1, 1)

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(math.isqrt(self.p)) + 1)):
            raise ValueError("p must be prime")
        if min(self.t, self.r, self.s) < 0:
            raise ValueError("exponents must be non-negative")

    @property
    def moduli(self) -> tuple:
        """``(c1, c2, c3) = (p^s, p^r, p^t)``."""
        return (self.p ** self.s, self.p ** self.r, self.p ** self.t)


def _valuation(x: int, p: int) -> float:
    if x == 0:
        return math.inf
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def long_element_constant(lp: LocalParams) -> float:
    p = lp.p
    ell = max(lp.r, lp.s, lp.t)
    rho, sigma = max(lp.t, lp.s), min(lp.t, lp.s)
    out = 64.0
    for i in range(3):
        v = _valuation(lp.nu[i] * lp.nu_prime[2 - i], p)
        out *= p ** (0.5 * min(v, ell))
    return out * (rho + 1) * (lp.r + 1) ** 2 * (sigma + 1) ** 2


class LocalW8Result(NamedTuple):
    value: complex
    cells: int
    constant: float
    bound: float
    bound_uniform: float
    within_bound: bool
    within_uniform_bound: bool
    within_trivial_bound: bool


def gl4_local_w8(lp: LocalParams, *, max_cells: int = DEFAULT_MAX_CELLS) -> LocalW8Result:
    """Long-element sum at a prime-power modulus, checked against its power-saving bound."""
    res = gl4_kloosterman_bruhat(lp.nu, lp.nu_prime, lp.moduli, "w8", max_cells=max_cells)
    p, t, r, s = lp.p, lp.t, lp.r, lp.s
    rho, sigma = max(t, s), min(t, s)
    C8 = long_element_constant(lp)
    bound = C8 * min(p ** (r + sigma + rho / 2), p ** (rho + 2 * sigma + r / 2))
    uniform = C8 * p ** (0.9 * (t + r + s))
    a = abs(res.value)
    tol = 1e-9 * max(1.0, a)
    return LocalW8Result(res.value, res.cells, C8, bound, uniform, a <= bound + tol,
                         a <= uniform + tol, res.within_trivial_bound)


# ---------------------------------------------------------------------------
# multiplicativity


def unit_twist(M: Sequence[int], w, c_other: Sequence[int], D: int) -> tuple:
    """Character seen by the ``c`` factor once the coprime modulus ``c_other`` is moved across ``w``.

    With ``t = w^-1 t0 w`` for the torus ``t0`` of ``c_other``, the right
    character picks up ``t_{i+1} / t_i``, read modulo ``D``.
    """
    w = _as_weyl(w)
    t0 = modulus_torus(c_other)
    t = [t0[w.perm[j]] for j in range(w.n)]
    out = []
    for i in range(w.n - 1):
        ratio = t[i + 1] / t[i]
        if D == 1:
            out.append(0)
        else:
            out.append(M[i] * ratio.numerator * pow(ratio.denominator, -1, D) % D)
    return tuple(out)


class MultiplicativityReport(NamedTuple):
    product_value: complex
    factor_values: tuple
    twisted_characters: tuple
    rel_error: float
    ok: bool


def multiplicativity_check(L, M, c, c_prime, w, v=None, *, tol: float = 1e-9,
                           max_cells: int = DEFAULT_MAX_CELLS) -> MultiplicativityReport:
    """Compare the sum at ``c * c'`` with the product of the two twisted factor sums.

    Raw cell sums are compared (no compatibility zeroing), so the check
    exercises the enumeration itself for every ``w``.
    """
    w = _as_weyl(w)
    c = tuple(int(x) for x in c)
    cp = tuple(int(x) for x in c_prime)
    if math.gcd(math.prod(c), math.prod(cp)) != 1:
        raise ValueError("moduli must be coprime")
    M = twist(M, v) if v is not None else tuple(int(x) for x in M)
    cc = tuple(a * b for a, b in zip(c, cp))
    D1, D2 = math.lcm(*c), math.lcm(*cp)
    M1 = unit_twist(M, w, cp, D1)
    M2 = unit_twist(M, w, c, D2)
    kw = dict(max_cells=max_cells, enforce_compatibility=False)
    whole = kloosterman_sum(L, M, cc, w, **kw).value
    f1 = kloosterman_sum(L, M1, c, w, **kw).value
    f2 = kloosterman_sum(L, M2, cp, w, **kw).value
    prod = f1 * f2
    err = abs(whole - prod) / max(1.0, abs(whole))
    return MultiplicativityReport(whole, (f1, f2), (M1, M2), float(err), err < tol)
