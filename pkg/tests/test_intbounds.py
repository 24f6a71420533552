import math

import numpy as np
import pytest

from kuznetsov4.intbounds import (
    a1_exponent,
    a3_rhs,
    lhs_integral_A1,
    random_node_family,
    verify_A1,
    verify_A3,
    window_integral,
)


@pytest.mark.parametrize("T", [1.0, 10.0, 1e3, 1e5])
def test_closed_forms(T):
    # e = 0, f = 2
    assert lhs_integral_A1(0, 2, T) == pytest.approx(1 - 1 / (1 + T), rel=1e-10)
    # e = f = 1: partial fractions
    assert lhs_integral_A1(1, 1, T) == pytest.approx(2 * math.log1p(T) / (2 + T), rel=1e-10)
    # e = f = 0 is the length
    assert lhs_integral_A1(0, 0, T) == pytest.approx(T, rel=1e-12)


def test_a1_exponent():
    assert a1_exponent(2, 3) == 2
    assert a1_exponent(0.5, 0.5) == 0.0
    assert a1_exponent(1, 1) == 1


def test_a1_bounded_away_from_log_case():
    rep = verify_A1(2.0, 0.5)
    assert rep.bounded and rep.witness is None


def test_a1_log_case_grows_slowly():
    rep = verify_A1(1.0, 1.0)
    # log T growth, absorbed by the epsilon slack over four decades
    assert rep.bounded
    assert 1.5 < rep.growth < 10


def test_a1_without_slack_detects_log():
    rep = verify_A1(1.0, 1.0, T_grid=(10, 1e5), epsilon=0.0, factor=2.0)
    assert not rep.bounded and rep.witness == 1e5


def test_a1_input_checks():
    with pytest.raises(ValueError):
        lhs_integral_A1(1, 1, 1e6)
    with pytest.raises(ValueError):
        lhs_integral_A1(1, 1, -1.0)


def test_window_integral_two_nodes_is_a1():
    T = 50.0
    assert window_integral([0.0, T], [1.3, 0.7]) == pytest.approx(lhs_integral_A1(0.7, 1.3, T), rel=1e-9)


def test_a3_two_nodes_reduces_to_a1_bound():
    T = 100.0
    rhs = a3_rhs([0.0, T], [2.0, 2.0], epsilon=0.0)
    assert rhs == pytest.approx((1 + T) ** -2.0)


def test_a3_random_families(rng):
    for k in (3, 4, 6):
        for _ in range(5):
            B, e = random_node_family(rng, k, span=rng.uniform(10, 1e3))
            rep = verify_A3(B, e)
            assert rep.ok, (B, e, rep)


def test_a3_coincident_nodes(rng):
    B, e = random_node_family(rng, 4, 200.0, coincide=True)
    assert B[1] == B[2]
    assert verify_A3(B, e).ok


def test_a3_window():
    B = np.array([0.0, 10.0, 40.0, 100.0])
    e = np.array([1.5, 0.5, 2.0, 1.0])
    full = window_integral(B, e)
    parts = sum(window_integral(B, e, (j, j + 1)) for j in (1, 2, 3))
    assert full == pytest.approx(parts, rel=1e-10)
    with pytest.raises(ValueError):
        window_integral(B, e, (3, 2))


def test_node_validation():
    with pytest.raises(ValueError):
        window_integral([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        window_integral([0.0] * 7, [1.0] * 7)
