import math

import numpy as np
import pytest

from kuznetsov4.errors import BudgetExceeded
from kuznetsov4.params import weyl_orbit
from kuznetsov4.special import LineQuadrature, gamma
from kuznetsov4.whittaker import (
    ContourTooCloseError,
    InnerProductGrid,
    PoleCollisionError,
    auto_contour,
    balanced_contour,
    build_mellin_grid,
    calibration_report,
    contour_residue,
    inner_product_check,
    inner_product_rhs,
    mellin_residue,
    mellin_transform,
    mellin_transform_batch,
    pole_lattice,
    shift_denominators,
    whittaker_value,
    window_for,
)

ZERO = np.zeros(4)
ALPHA = np.array([0.3j, 0.1j, -0.15j, -0.25j])

# 34-digit t-quadrature of the Barnes integral
M_ZERO_222 = 3.125833198449167e-4
M_ALPHA = 0.03995825639380425 + 1.3082327942157096e-05j
# agreement of the u = 1 and u = 1.5 contours
W_ZERO_03 = 2.097805e-6


def test_mellin_frozen_value_at_zero():
    v = mellin_transform(ZERO, (2, 2, 2))
    assert abs(v - M_ZERO_222) < 1e-11 * M_ZERO_222


def test_mellin_frozen_value_at_alpha():
    v = mellin_transform(ALPHA, (1.5, 1.2, 1.7))
    assert abs(v - M_ALPHA) < 1e-11 * abs(M_ALPHA)


def test_mellin_extended_matches_double():
    s = (1.1 + 0.4j, 0.8 - 0.3j, 1.3 + 0.2j)
    a = mellin_transform(ALPHA, s)
    b = mellin_transform(ALPHA, s, precision="extended")
    assert abs(a - b) < 1e-10 * abs(b)


def test_mellin_details_and_rules():
    s = (1.0, 1.0, 1.0)
    det = mellin_transform(ZERO, s, return_details=True)
    assert det.error < 1e-10 * abs(det.value)
    trap = mellin_transform(ZERO, s, LineQuadrature(nodes=16, rule="trapezoid"))
    assert abs(trap - det.value) < 1e-10 * abs(det.value)


def test_mellin_reduces_to_gamma_at_zero_first_variable():
    # near s2, s3 -> large the transform stays finite and positive on the real axis
    for s in [(0.5, 0.5, 0.5), (3.0, 1.0, 2.0), (1.0, 4.0, 1.0)]:
        v = mellin_transform(ZERO, s)
        assert v.real > 0 and abs(v.imag) < 1e-12 * v.real


def test_weyl_invariance(rng):
    s = (1.2 + 0.3j, 0.7 - 0.5j, 0.9 + 0.1j)
    ref = mellin_transform(ALPHA, s)
    for perm in [weyl_orbit(ALPHA)[k] for k in (5, 11, 23)]:
        assert abs(mellin_transform(perm, s) - ref) < 1e-9 * abs(ref)


def test_involution():
    s = (1.2 + 0.3j, 0.7 - 0.5j, 0.9 + 0.1j)
    a = mellin_transform(ALPHA, s)
    b = mellin_transform(-ALPHA, s[::-1])
    assert abs(a - b) < 1e-9 * abs(a)


def test_offset_rules_agree():
    s = (1.2 + 0.3j, 0.7 - 0.5j, 0.9 + 0.1j)
    a = mellin_transform(ALPHA, s)
    b = mellin_transform(ALPHA, s, offset_rule="mid")
    assert abs(a - b) < 1e-10 * abs(a)


def test_continuation_left_of_poles():
    # Re s2 below the first s2 pole: the contour is moved and residues added
    s = (1.0, -0.3 + 0.05j, 1.0)
    v = mellin_transform(ALPHA, s, return_details=True)
    w = mellin_transform(ALPHA, s, precision="extended")
    assert abs(v.value - w) < 1e-8 * abs(w)


def test_pole_is_rejected():
    with pytest.raises(ContourTooCloseError):
        mellin_transform(ZERO, (0.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        mellin_transform([0, 0, 0], (1.0, 1.0, 1.0))


def test_pole_lattice_sizes():
    assert len(pole_lattice(ALPHA, "s1")) == 4
    assert len(pole_lattice(ALPHA, "s2")) == 6
    assert len(pole_lattice(ALPHA, 3, delta_max=2)) == 12
    p = pole_lattice(ALPHA, "s1", 1)[1]
    assert p.location == pytest.approx(-ALPHA[0] - 2)


@pytest.mark.parametrize("axis", ["s1", "s2", "s3"])
def test_residue_matches_contour(axis):
    which = pole_lattice(ALPHA, axis)[0]
    closed = mellin_residue(ALPHA, which, (1.5, 1.2))
    numeric = contour_residue(ALPHA, which, (1.5, 1.2), radius=0.03, nodes=32)
    assert abs(numeric - closed) < 1e-7 * abs(closed)


def test_calibration_report_ratio():
    rep = calibration_report(ALPHA, nodes=24, radius=0.03)
    for row in rep["rows"]:
        assert row["relative_error"] < 1e-6
        s_sum = row["pole"] + sum(rep["s_rest"])
        assert abs(row["expected_ratio"] - math.pi ** (-s_sum) / 4) < 1e-12


def test_residue_needs_distinct_parameters():
    which = pole_lattice(ZERO, "s1")[0]
    with pytest.raises(PoleCollisionError):
        mellin_residue(ZERO, which, (1.0, 1.0))


def test_shift_denominators_vanish_on_poles():
    d = shift_denominators(ALPHA, (-ALPHA[0], 1.0, ALPHA[2]))
    assert abs(d.B1) < 1e-15 and abs(d.B3) < 1e-15 and abs(d.B2) > 0


def test_batch_matches_scalar(backend):
    pts = np.array([(1.0 + 0.5j, 0.7, 1.3 - 2j), (2.0, 2.0, 2.0), (0.4, 1.1 + 3j, 0.8)])
    vals, errs = mellin_transform_batch(ALPHA, pts, backend=backend)
    for p, v, e in zip(pts, vals, errs):
        ref = mellin_transform(ALPHA, p)
        assert abs(v - ref) < 1e-9 * abs(ref)
        assert abs(v - ref) <= max(e, 1e-12 * abs(ref))


def test_grid_backends_agree():
    a = build_mellin_grid(ALPHA, (1.5,) * 3, 0.5, 3.0, backend="numba", prune=0)
    b = build_mellin_grid(ALPHA, (1.5,) * 3, 0.5, 3.0, backend="numpy", prune=0)
    assert np.max(np.abs(a.values - b.values)) < 1e-13 * np.max(np.abs(a.values))


def test_contour_choice():
    c = auto_contour((0.3, 0.3, 0.3))
    assert c.u == (1.5, 1.5, 1.5) and c.half_width == 12.0
    assert c.step == pytest.approx(0.24)
    assert auto_contour((4, 4, 4)).u == (30.0,) * 3
    assert window_for((14.0,) * 3, (2, 2, 2)) == (24.0, 0.5)


def test_whittaker_value_frozen():
    r = whittaker_value(ZERO, (0.3, 0.3, 0.3), return_details=True)
    assert abs(r.value - W_ZERO_03) < 2e-5 * W_ZERO_03
    assert not r.underflow


def test_whittaker_value_validates_y():
    with pytest.raises(ValueError):
        whittaker_value(ZERO, (1.0, -1.0, 1.0))


@pytest.mark.slow
def test_whittaker_contour_independence():
    a = whittaker_value(ZERO, (0.3,) * 3, u=(1.0,) * 3)
    b = whittaker_value(ZERO, (0.3,) * 3, u=(1.5,) * 3)
    assert abs(a - b) < 1e-4 * abs(b)


@pytest.mark.slow
def test_whittaker_weyl_invariance():
    y = (0.3, 0.4, 0.5)
    a = whittaker_value(ALPHA, y)
    b = whittaker_value(ALPHA[[2, 0, 3, 1]], y)
    assert abs(a - b) < 1e-4 * abs(a)
    # conjugation sends alpha to -alpha, which the involution turns into reversed y
    c = whittaker_value(ALPHA, y[::-1])
    assert abs(np.conj(a) - c) < 1e-4 * abs(a)


@pytest.mark.slow
def test_whittaker_decay():
    w = {k: whittaker_value(ZERO, (k, k, k)).real for k in (0.5, 1, 2, 3, 4)}
    assert all(v > 0 for v in w.values())
    assert w[2] / w[1] < w[1] / w[0.5]
    # the exponent p_k of a matching power law k^-p grows without bound
    powers = [-math.log(w[k + 1] / w[k]) / math.log((k + 1) / k) for k in (1, 2, 3)]
    assert powers[0] < powers[1] < powers[2]
    assert powers[0] > 20


def test_inner_product_rhs_closed_form():
    assert inner_product_rhs(ZERO, ZERO, 2.0) == pytest.approx(1 / (12 * math.pi**12), rel=1e-13)
    b = np.array([0.2j, -0.2j, 0.1j, -0.1j])
    args = [(2 + a - c) / 2 for a in ALPHA for c in b]
    ref = np.prod([gamma(z) for z in args]) / (2 * math.pi**12 * 6)
    assert inner_product_rhs(ALPHA, b, 2.0) == pytest.approx(ref, rel=1e-12)


def test_balanced_contour():
    assert balanced_contour(2.0) == (3.0, 2.0, 1.0)


def test_inner_product_budget():
    with pytest.raises(BudgetExceeded):
        inner_product_check(ZERO, ZERO, 2.0, InnerProductGrid(max_evaluations=1000))


def test_inner_product_ratio_is_one_quarter():
    """The computed lhs sits at 1/4 of the closed form; both quadratures agree on it."""
    grid = InnerProductGrid(points=81, mellin_step=0.35, mellin_half_width=13.0, prune=1e-11)
    r = inner_product_check(ZERO, ZERO, 2.0, grid, return_details=True)
    assert abs(r.lhs - r.lhs_parseval) < 1e-4 * abs(r.lhs)
    assert r.ratio.real == pytest.approx(0.25, abs=1e-4)
