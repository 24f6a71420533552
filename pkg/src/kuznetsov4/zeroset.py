"""Zero set of the exponential factor of the rank-4 Gamma-quotient integrand.

Variables are ordered ``(tau1, tau2, tau3, rho, xi1, xi2, xi3)`` with
``tau4 = -tau1 - tau2 - tau3`` eliminated throughout.  The exponential
factor is a constant linear form plus twelve absolute values minus two
more; fixing a sign for every absolute value turns it into a linear form.
Sign vectors whose form vanishes identically cut out polyhedral pieces of
the zero set.  Everything here that decides a count uses exact integers
or rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._rational_lp import maximize_boxed

VARIABLES = ("tau1", "tau2", "tau3", "rho", "xi1", "xi2", "xi3")
SIGN_LABELS = ("t,1", "t,2", "1,0", "1,1", "1,2", "2,0", "2,1", "2,2", "2,3",
               "3,0", "3,1", "3,2", "2-1/2", "2+1/2")

BASE_FORM = np.array([-6, -4, -2, 0, 0, 0, 0])
# each row is the argument of one absolute value (tau4 eliminated)
TERMS = np.array([
    [1, 1, 1, 1, 0, 0, 0],     # rho - tau4
    [0, 0, -1, 1, 0, 0, 0],    # rho - tau3
    [1, 0, 0, 0, 1, 0, 0],     # xi1 + tau1
    [0, 1, 0, 0, 1, 0, 0],     # xi1 + tau2
    [0, 0, 0, 1, 1, 0, 0],     # xi1 + rho
    [1, 1, 0, 0, 0, 1, 0],     # xi2 + tau1 + tau2
    [1, 0, 0, 1, 0, 1, 0],     # xi2 + tau1 + rho
    [0, 1, 0, 1, 0, 1, 0],     # xi2 + tau2 + rho
    [-1, -1, 0, 0, 0, 1, 0],   # xi2 + tau3 + tau4
    [1, 1, 0, 1, 0, 0, 1],     # xi3 + tau1 + tau2 + rho
    [0, -1, 0, 0, 0, 0, 1],    # xi3 + tau1 + tau3 + tau4
    [-1, 0, 0, 0, 0, 0, 1],    # xi3 + tau2 + tau3 + tau4
    [1, 1, 0, 1, 1, 1, 0],     # xi1 + xi2 + tau1 + tau2 + rho
    [0, 0, 0, 1, 0, 1, 1],     # rho + xi2 + xi3
])
TERM_SIGNS = np.array([1] * 12 + [-1, -1])

# tau1 >= tau2 >= tau3 >= tau4, written as G x <= 0
CHAMBER = [
    (-1, 1, 0, 0, 0, 0, 0),
    (0, -1, 1, 0, 0, 0, 0),
    (-1, -1, -2, 0, 0, 0, 0),
]
SLICE = 10


@dataclass(frozen=True)
class SignVector:
    eps: tuple

    def __post_init__(self):
        if len(self.eps) != 14 or any(e not in (1, -1) for e in self.eps):
            raise ValueError("a sign vector has 14 entries equal to +1 or -1")

    def __getitem__(self, label: str) -> int:
        return self.eps[SIGN_LABELS.index(label)]

    def as_dict(self) -> dict:
        return dict(zip(SIGN_LABELS, self.eps))


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple

    def __call__(self, x) -> float:
        return float(np.dot(np.asarray(self.coeffs, dtype=float), x))


@dataclass
class Polyhedron:
    """``{x : a.x <= b for (a, b) in rows}`` over the seven variables."""

    rows: list = field(default_factory=list)
    name: str = ""

    def add(self, a, b=0):
        self.rows.append((tuple(Fraction(v) for v in a), Fraction(b)))
        return self

    def matrices(self):
        G = np.array([[float(v) for v in a] for a, _ in self.rows])
        h = np.array([float(b) for _, b in self.rows])
        return G, h

    def contains(self, x, tol: float = 1e-9) -> np.ndarray:
        G, h = self.matrices()
        x = np.atleast_2d(x)
        return np.all(x @ G.T <= h + tol, axis=-1)

    def with_slice(self, bound: int = SLICE) -> "Polyhedron":
        p = Polyhedron(list(self.rows), self.name)
        for a in CHAMBER:
            p.add(a, 0)
        for j in range(3):
            e = [0] * 7
            e[j] = 1
            p.add(e, bound)
            p.add([-v for v in e], bound)
        # tau4 within the slice as well
        p.add([-1, -1, -1, 0, 0, 0, 0], bound)
        p.add([1, 1, 1, 0, 0, 0, 0], bound)
        return p

    def describe(self) -> list:
        out = []
        for a, b in self.rows:
            terms = " ".join(f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}{v}"
                             for c, v in zip(a, VARIABLES) if c)
            out.append(f"{terms.lstrip('+')} <= {b}")
        return out


# ---------------------------------------------------------------------------
# the exponential factor


def _check_chamber(tau):
    t = np.asarray(tau, dtype=float)
    t4 = -t[..., 0] - t[..., 1] - t[..., 2]
    ok = (t[..., 0] >= t[..., 1]) & (t[..., 1] >= t[..., 2]) & (t[..., 2] >= t4)
    return ok


def exp_term(xi, tau, rho, *, check: bool = True):
    """Exponential factor at ``xi`` (3), ``tau`` (3, tau4 derived), ``rho``.

    Broadcasts over leading axes.
    """
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if check and not np.all(_check_chamber(tau)):
        raise ValueError("tau must satisfy tau1 >= tau2 >= tau3 >= tau4")
    x = np.concatenate([tau, rho[..., None], xi], axis=-1)
    return exp_term_packed(x)


def exp_term_packed(x) -> np.ndarray:
    """Same as ``exp_term`` on packed points ``(tau1, tau2, tau3, rho, xi1, xi2, xi3)``."""
    x = np.asarray(x, dtype=float)
    return x @ BASE_FORM + np.abs(x @ TERMS.T) @ TERM_SIGNS


def resolved_form(eps: SignVector) -> LinearForm:
    e = np.asarray(eps.eps, dtype=np.int64)
    return LinearForm(tuple(int(v) for v in BASE_FORM + (TERM_SIGNS * e) @ TERMS))


def identically_vanishing() -> list:
    """All sign vectors whose resolved form is the zero form (exact integers)."""
    signs = np.array(list(itertools.product((1, -1), repeat=14)), dtype=np.int64)
    forms = BASE_FORM[None, :] + (signs * TERM_SIGNS[None, :]) @ TERMS
    keep = np.all(forms == 0, axis=1)
    return [SignVector(tuple(int(v) for v in row)) for row in signs[keep]]


def region_of(eps: SignVector, *, check: bool = True) -> Polyhedron:
    """Inequalities making every signed term non-negative (chamber not included)."""
    if check and any(resolved_form(eps).coeffs):
        raise ValueError("sign vector does not make the form vanish identically")
    p = Polyhedron(name="".join("+" if e > 0 else "-" for e in eps.eps))
    for e, row in zip(eps.eps, TERMS):
        p.add([-e * int(v) for v in row], 0)
    return p


def interior_margin(poly: Polyhedron) -> Fraction:
    """Largest ``m`` with ``a.x + m <= b`` for every row and chamber gap, on the slice.

    Positive exactly when the region (intersected with the chamber) has
    non-empty interior.
    """
    G = [list(a) + [Fraction(1)] for a, _ in poly.rows]
    h = [b for _, b in poly.rows]
    for a in CHAMBER:
        G.append(list(a) + [Fraction(1)])
        h.append(Fraction(0))
    lower = [-SLICE] * 7 + [0]
    upper = [SLICE] * 7 + [1]
    c = [0] * 7 + [1]
    res = maximize_boxed(c, G, h, lower, upper)
    return res.value if res.status == "optimal" else Fraction(-1)


def enumerate_sign_solutions(return_counts: bool = False):
    """Sign vectors whose form vanishes identically and whose region is full-dimensional."""
    vanishing = identically_vanishing()
    feasible = [e for e in vanishing if interior_margin(region_of(e)) > 0]
    if return_counts:
        return feasible, {"identically_vanishing": len(vanishing), "feasible": len(feasible)}
    return feasible


# ---------------------------------------------------------------------------
# the three regions as stated


def _interval(p: Polyhedron, var: str, lo: Sequence, hi: Sequence):
    """Add ``lo.x <= var <= hi.x`` (coefficient vectors over the variables)."""
    e = np.zeros(7, dtype=object)
    e[VARIABLES.index(var)] = 1
    p.add(list(np.array(lo, dtype=object) - e), 0)
    p.add(list(e - np.array(hi, dtype=object)), 0)


# coefficient vectors (tau1, tau2, tau3, rho, xi1, xi2, xi3)
_TAU4 = (-1, -1, -1, 0, 0, 0, 0)
_TAU3 = (0, 0, 1, 0, 0, 0, 0)


def stated_region(k: int, variant: str = "statement") -> Polyhedron:
    """Region ``k`` (1, 2 or 3) exactly as displayed.

    ``variant="proof"`` uses the alternative ``xi3`` range written for the
    first region inside the argument.
    """
    p = Polyhedron(name=f"R{k}")
    _interval(p, "rho", _TAU4, _TAU3)
    if k == 1:
        _interval(p, "xi1", (0, -1, 0, 0, 0, 0, 0), (0, 0, 0, -1, 0, 0, 0))
        _interval(p, "xi2", (0, -1, 0, -1, 0, 0, 0), (1, 1, 0, 0, 0, 0, 0))
        if variant == "proof":
            _interval(p, "xi3", (-1, -1, 0, -1, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0))
        else:
            _interval(p, "xi3", (0, 1, 0, 0, 0, 0, 0), (1, 0, 0, 0, 0, 0, 0))
    elif k == 2:
        _interval(p, "xi1", (0, -1, 0, 0, 0, 0, 0), (0, 0, 0, -1, 0, 0, 0))
        _interval(p, "xi2", (-1, 0, 0, -1, 0, 0, 0), (0, -1, 0, -1, 0, 0, 0))
        _interval(p, "xi3", (-1, -1, 0, -1, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0))
    elif k == 3:
        _interval(p, "xi1", (-1, 0, 0, 0, 0, 0, 0), (0, -1, 0, 0, 0, 0, 0))
        _interval(p, "xi2", (-1, -1, 0, 0, 0, 0, 0), (-1, 0, 0, -1, 0, 0, 0))
        _interval(p, "xi3", (-1, -1, 0, -1, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0))
    else:
        raise ValueError("k must be 1, 2 or 3")
    return p


def _max_over(poly: Polyhedron, c) -> Fraction | None:
    p = poly.with_slice()
    G = [list(a) for a, _ in p.rows]
    h = [b for _, b in p.rows]
    big = 4 * SLICE
    res = maximize_boxed(list(c), G, h, [-big] * 7, [big] * 7)
    return res.value if res.status == "optimal" else None


def contained_in(P: Polyhedron, Q: Polyhedron) -> tuple:
    """Whether ``P`` lies in ``Q`` on the slice; returns ``(ok, worst_violation)``."""
    worst = Fraction(0)
    for a, b in Q.rows:
        v = _max_over(P, a)
        if v is None:  # P empty on the slice
            return True, Fraction(0)
        worst = max(worst, v - b)
    return worst <= 0, worst


def regions_equal(P: Polyhedron, Q: Polyhedron) -> dict:
    ab, vab = contained_in(P, Q)
    ba, vba = contained_in(Q, P)
    return {"equal": ab and ba, "P_in_Q": ab, "Q_in_P": ba,
            "violation_P_in_Q": vab, "violation_Q_in_P": vba}


EXPECTED_REGION = {(1, 1): 1, (1, -1): 2, (-1, -1): 3}


def match_survivors(survivors=None, variant: str = "statement", exhaustive: bool = False) -> list:
    """Pair each survivor with the stated region it equals (or ``None``).

    By default only the region predicted by the last two signs is tried;
    ``exhaustive=True`` tries all three.
    """
    survivors = enumerate_sign_solutions() if survivors is None else survivors
    out = []
    for e in survivors:
        reg = region_of(e)
        guess = EXPECTED_REGION.get((e["2-1/2"], e["2+1/2"]))
        order = (1, 2, 3) if exhaustive or guess is None else (guess,)
        match = None
        for k in order:
            if regions_equal(reg, stated_region(k, variant))["equal"]:
                match = k
                break
        out.append((e, match))
    return out


# ---------------------------------------------------------------------------
# sampling


def sample_chamber(rng: np.random.Generator, n: int, bound: float = SLICE) -> np.ndarray:
    """Uniform points ``(tau, rho, xi)`` with ordered ``tau`` inside the slice box."""
    out = np.empty((0, 7))
    while out.shape[0] < n:
        x = rng.uniform(-bound, bound, size=(2 * n, 7))
        x[:, :3] = -np.sort(-x[:, :3], axis=1)
        keep = _check_chamber(x[:, :3]) & (np.abs(x[:, :3].sum(axis=1)) <= bound)
        out = np.vstack([out, x[keep]])
    return out[:n]


def sample_region(poly: Polyhedron, rng: np.random.Generator, n: int, burn: int = 50) -> np.ndarray:
    """Hit-and-run samples from the region intersected with chamber and slice."""
    from scipy.optimize import linprog

    p = poly.with_slice()
    G, h = p.matrices()
    norms = np.linalg.norm(G, axis=1)
    res = linprog(np.r_[np.zeros(7), -1.0], A_ub=np.c_[G, norms], b_ub=h,
                  bounds=[(None, None)] * 7 + [(0, None)], method="highs")
    if not res.success or res.x[-1] <= 1e-9:
        raise ValueError("region has empty interior on the slice")
    x = res.x[:7]
    out = np.empty((n, 7))
    for i in range(-burn, n):
        d = rng.normal(size=7)
        d /= np.linalg.norm(d)
        gd = G @ d
        slack = h - G @ x
        with np.errstate(divide="ignore"):
            r = slack / gd
        hi = np.min(r[gd > 1e-14]) if np.any(gd > 1e-14) else 1.0
        lo = np.max(r[gd < -1e-14]) if np.any(gd < -1e-14) else -1.0
        x = x + rng.uniform(lo, hi) * d
        if i >= 0:
            out[i] = x
    return out


# ---------------------------------------------------------------------------
# changes of variables between regions


@dataclass(frozen=True)
class AffineMap:
    """``x -> M x`` on the seven variables (all maps here are linear)."""

    name: str
    matrix: tuple

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ np.asarray(self.matrix, dtype=float).T

    @property
    def det(self) -> float:
        return float(np.linalg.det(np.asarray(self.matrix, dtype=float)))

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(np.asarray(self.matrix, dtype=float))
        return AffineMap(self.name + "^-1", tuple(tuple(Fraction(v).limit_denominator(64) for v in row)
                                                  for row in inv))


def _map_from(updates: dict, name: str) -> AffineMap:
    M = [[Fraction(int(i == j)) for j in range(7)] for i in range(7)]
    for var, coeffs in updates.items():
        M[VARIABLES.index(var)] = [Fraction(c) for c in coeffs]
    return AffineMap(name, tuple(tuple(r) for r in M))


# (xi2, xi3) -> (-xi3 - rho, xi2 - tau1)
STATED_MAP_1 = _map_from({"xi2": (0, 0, 0, -1, 0, 0, -1), "xi3": (-1, 0, 0, 0, 0, 1, 0)}, "stated map 1")
# (xi1, xi2) -> (xi2 - tau1, -xi1 + rho)
STATED_MAP_2 = _map_from({"xi1": (-1, 0, 0, 0, 0, 1, 0), "xi2": (0, 0, 0, 1, -1, 0, 0)}, "stated map 2")
# (xi1, xi2) -> (xi2 + tau1, -xi1 - tau1 - tau2 - rho), from the third region onto the second
CORRECTED_MAP_2 = _map_from({"xi1": (1, 0, 0, 0, 0, 1, 0), "xi2": (-1, -1, 0, -1, -1, 0, 0)},
                            "corrected map 2")


def preimage(poly: Polyhedron, f: AffineMap) -> Polyhedron:
    """``{x : f(x) in poly}``."""
    M = [list(r) for r in f.matrix]
    p = Polyhedron(name=f"{f.name}^-1({poly.name})")
    for a, b in poly.rows:
        p.add([sum(a[i] * M[i][j] for i in range(7)) for j in range(7)], b)
    return p


def maps_onto(f: AffineMap, source: Polyhedron, target: Polyhedron) -> dict:
    """``f(source) == target`` on the slice, via ``source == f^-1(target)``."""
    return regions_equal(source, preimage(target, f))


def _counterexample(f, source, target, rng, n=400):
    pts = sample_region(source, rng, n)
    bad = ~target.contains(f(pts), tol=1e-9)
    return pts[np.argmax(bad)] if np.any(bad) else None


def verify_region_maps(rng: np.random.Generator | None = None, samples: int = 100) -> dict:
    """Check the region-to-region changes of variables in both readings.

    "forward" means the new point is ``f(old)``; "substitution" means the
    old variables are replaced by ``f`` of the new ones, i.e. the image is
    ``f^-1(old)``.
    """
    rng = rng or np.random.default_rng(0)
    R = {k: stated_region(k) for k in (1, 2, 3)}
    report = []
    cases = [
        (STATED_MAP_1, 2, 1),
        (STATED_MAP_2, 2, 3),
        (CORRECTED_MAP_2, 3, 2),
    ]
    for f, src, dst in cases:
        entry = {"map": f.name, "from": f"R{src}", "to": f"R{dst}", "abs_det": abs(f.det)}
        for reading, g in (("forward", f), ("substitution", f.inverse())):
            eq = maps_onto(g, R[src], R[dst])
            ce = None if eq["equal"] else _counterexample(g, R[src], R[dst], rng)
            pts = sample_region(R[src], rng, samples)
            entry[reading] = {
                "bijective_onto": eq["equal"],
                "sampled_inside": int(np.sum(R[dst].contains(g(pts)))),
                "samples": samples,
                "counterexample": None if ce is None else ce.tolist(),
            }
        entry["ok"] = entry["forward"]["bijective_onto"] or entry["substitution"]["bijective_onto"]
        report.append(entry)
    return {"maps": report}
