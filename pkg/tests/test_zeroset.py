from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from kuznetsov4._rational_lp import maximize, maximize_boxed
from kuznetsov4.zeroset import (
    CORRECTED_MAP_2,
    STATED_MAP_2,
    SignVector,
    enumerate_sign_solutions,
    exp_term,
    exp_term_packed,
    identically_vanishing,
    interior_margin,
    maps_onto,
    match_survivors,
    region_of,
    regions_equal,
    resolved_form,
    sample_chamber,
    sample_region,
    stated_region,
    verify_region_maps,
)


@pytest.fixture(scope="module")
def survivors():
    return enumerate_sign_solutions()


def test_counts(survivors):
    assert len(identically_vanishing()) == 6
    assert len(survivors) == 3


def test_survivors_match_stated_regions(survivors):
    matches = match_survivors(survivors, exhaustive=True)
    assert sorted(k for _, k in matches) == [1, 2, 3]


def test_fixed_signs_of_vanishing_vectors(survivors):
    # the tau3 coefficient is -2 + eps_{t,1} - eps_{t,2}, which pins both t-signs
    for e in identically_vanishing():
        assert (e["t,1"], e["t,2"]) == (1, -1)
        assert e["2,3"] == -1
    for e in survivors:
        assert (e["1,0"], e["1,2"]) == (1, -1)


def test_proof_variant_of_first_region_differs(survivors):
    r1 = next(region_of(e) for e, k in match_survivors(survivors) if k == 1)
    rep = regions_equal(r1, stated_region(1, "proof"))
    assert not rep["equal"]


def test_resolved_form_of_survivors_is_zero(survivors):
    for e in survivors:
        assert not any(resolved_form(e).coeffs)


def test_region_of_rejects_non_vanishing():
    with pytest.raises(ValueError):
        region_of(SignVector((1,) * 14))
    with pytest.raises(ValueError):
        SignVector((1, 0) * 7)


def test_exp_term_nonnegative(rng):
    x = sample_chamber(rng, 20_000)
    assert exp_term_packed(x).min() >= -1e-9


def test_exp_term_vanishes_on_regions(rng, survivors):
    for e in survivors:
        pts = sample_region(region_of(e), rng, 200)
        assert np.max(np.abs(exp_term_packed(pts))) < 1e-9


def test_exp_term_unpacked_matches_packed(rng):
    x = sample_chamber(rng, 10)
    a = exp_term(x[:, 4:], x[:, :3], x[:, 3])
    np.testing.assert_allclose(a, exp_term_packed(x))
    with pytest.raises(ValueError):
        exp_term((0, 0, 0), (0.0, 1.0, 0.0), 0.0)


def test_interior_margin_positive_for_survivors(survivors):
    for e in survivors:
        assert interior_margin(region_of(e)) > 0


def test_region_maps():
    rep = {m["map"]: m for m in verify_region_maps(samples=40)["maps"]}
    assert rep["stated map 1"]["substitution"]["bijective_onto"]
    assert not rep["stated map 1"]["forward"]["bijective_onto"]
    assert not rep["stated map 2"]["ok"]
    assert rep["stated map 2"]["forward"]["counterexample"] is not None
    assert rep["corrected map 2"]["ok"]
    assert rep["corrected map 2"]["abs_det"] == pytest.approx(1.0)


def test_corrected_map_is_measure_preserving():
    assert abs(CORRECTED_MAP_2.det) == pytest.approx(1.0)
    assert maps_onto(CORRECTED_MAP_2, stated_region(3), stated_region(2))["equal"]
    assert not maps_onto(STATED_MAP_2, stated_region(2), stated_region(3))["equal"]


def test_rational_lp_against_scipy(rng):
    for _ in range(20):
        A = rng.integers(-3, 5, size=(4, 3))
        b = rng.integers(1, 10, size=4)
        c = rng.integers(-2, 4, size=3)
        res = maximize(c.tolist(), A.tolist(), b.tolist())
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * 3, method="highs")
        if ref.status == 3:
            assert res.status == "unbounded"
        else:
            assert res.status == "optimal"
            assert float(res.value) == pytest.approx(-ref.fun, abs=1e-9)
            assert isinstance(res.value, Fraction)


def test_rational_lp_boxed_and_infeasible():
    res = maximize_boxed([1, 1], [[1, 1]], [Fraction(3, 2)], [-1, -1], [1, 1])
    assert res.value == Fraction(3, 2)
    assert maximize_boxed([1], [[1]], [-5], [0], [1]).status == "infeasible"
