import math

import numpy as np
import pytest

from kuznetsov4.kloosterman import (
    CellBudgetExceeded,
    LocalParams,
    bruhat_cells,
    cell_estimate,
    classical_kloosterman,
    compatibility,
    divisor_count,
    gl2_kloosterman,
    gl4_kloosterman_bruhat,
    gl4_local_w8,
    kloosterman_sum,
    modulus_torus,
    multiplicativity_check,
    parse_twist,
    psi,
    twist,
    unit_twist,
    weil_bound,
)


def _oracle(m, n, c):
    """Sum over all residues, units found by trial multiplication."""
    total = 0j
    for x in range(c):
        inv = next((y for y in range(c) if (x * y) % c == 1 % c), None)
        if inv is not None:
            total += np.exp(2j * math.pi * (m * x + n * inv) / c)
    return total


def test_frozen_classical_values():
    assert classical_kloosterman(1, 1, 3) == pytest.approx(-1.0)
    assert classical_kloosterman(1, 1, 5) == pytest.approx((3 - math.sqrt(5)) / 2)
    assert classical_kloosterman(1, 1, 4) == pytest.approx(-2.0)
    assert classical_kloosterman(0, 0, 12) == 4  # Euler phi
    # Ramanujan sum c_7(1) = mu(7)
    assert classical_kloosterman(1, 0, 7) == pytest.approx(-1.0)


@pytest.mark.parametrize("c", [1, 2, 6, 9, 16, 35, 49])
def test_classical_against_oracle(c):
    for m in range(1, 5):
        for n in range(1, 5):
            assert classical_kloosterman(m, n, c) == pytest.approx(_oracle(m, n, c).real, abs=1e-9)
            assert abs(classical_kloosterman(m, n, c)) <= weil_bound(m, n, c) + 1e-9


def test_gl2_engine_matches_classical():
    for c in range(1, 13):
        for m, n in [(1, 1), (2, 3), (4, 6)]:
            assert gl2_kloosterman(m, n, c) == pytest.approx(classical_kloosterman(n, m, c), abs=1e-9)


def test_divisor_count():
    assert [divisor_count(n) for n in (1, 2, 12, 36, 97)] == [1, 2, 6, 9, 2]


def test_w1_row():
    assert gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (1, 1, 1), "w1").value == 1
    assert gl4_kloosterman_bruhat((1, 2, 1), (1, 1, 1), (1, 1, 1), "w1").value == 0
    assert gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (2, 1, 1), "w1").cells == 0


def test_frozen_long_element_values():
    r = gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (2, 2, 2), "w8", check_saturation=True)
    assert r.value == pytest.approx(-3)
    assert r.cells == 9 and r.saturated
    r5 = gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (2, 2, 2), "w5")
    assert r5.value == pytest.approx(6) and r5.cells == 8


def test_cells_are_distinct_integral_unimodular():
    cells = bruhat_cells("w8", (2, 2, 2))
    gammas = {c.gamma for c in cells}
    assert len(gammas) == len(cells)
    for g in gammas:
        assert round(np.linalg.det(np.array(g, dtype=float))) == 1


def test_modulus_torus():
    d = modulus_torus((2, 3, 5))
    assert [str(x) for x in d] == ["1/5", "5/3", "3/2", "2"]
    assert math.prod(d) == 1
    with pytest.raises(ValueError):
        modulus_torus((0, 1, 1))


def test_cell_budget():
    assert cell_estimate("w8", 30) == 30**6
    with pytest.raises(CellBudgetExceeded):
        gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (30, 30, 30), "w8", max_cells=10**6)


def test_compatibility_conditions():
    assert compatibility((1, 1, 1), (1, 1, 1), (1, 1, 1), "w8") == []
    assert compatibility((1, 1, 1), (1, 2, 1), (1, 1, 1), "w1")
    bad = kloosterman_sum((1, 1, 1), (2, 1, 1), (1, 1, 1), "w2")
    assert not bad.compatible and bad.value == 0


def test_trivial_bound_flag():
    r = gl4_kloosterman_bruhat((1, 1, 1), (1, 1, 1), (2, 2, 2), "w8")
    assert r.trivial_bound == 8 and r.within_trivial_bound


def test_twists():
    assert parse_twist("+,-,-,+") == (1, -1, -1, 1)
    assert twist((1, 2, 3), (1, -1, -1, 1)) == (-1, 2, -3)
    with pytest.raises(ValueError):
        parse_twist((1, 1, 1, -1))


def test_psi_character():
    u = [[1, 0.25, 0, 0], [0, 1, 0.5, 0], [0, 0, 1, 0.125], [0, 0, 0, 1]]
    assert psi((1, 1, 2), u) == pytest.approx(np.exp(2j * math.pi * 1.0))
    with pytest.raises(ValueError):
        psi((1, 1, 1), [[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_unit_twist_trivial_for_unit_modulus():
    assert unit_twist((1, 1, 1), "w8", (1, 1, 1), 5) == (1, 1, 1)


@pytest.mark.parametrize("w,L,c,cp,expected", [
    ("w8", (1, 1, 1), (2, 2, 2), (3, 3, 3), 12),
    ("w2", (1, 1, 1), (1, 2, 4), (1, 3, 9), 6),
])
def test_multiplicativity(w, L, c, cp, expected):
    rep = multiplicativity_check(L, (1, 1, 1), c, cp, w)
    assert rep.ok
    assert rep.product_value.real == pytest.approx(expected)


def test_multiplicativity_needs_coprime():
    with pytest.raises(ValueError):
        multiplicativity_check((1, 1, 1), (1, 1, 1), (2, 2, 2), (2, 1, 1), "w8")


@pytest.mark.parametrize("t,r,s", [(1, 0, 0), (0, 1, 0), (1, 1, 1), (2, 1, 0)])
def test_local_long_element_bound(t, r, s):
    res = gl4_local_w8(LocalParams(2, t, r, s))
    assert res.within_bound and res.within_uniform_bound and res.within_trivial_bound


def test_local_params_validation():
    with pytest.raises(ValueError):
        LocalParams(4, 1, 1, 1)
    assert LocalParams(3, 1, 2, 0).moduli == (1, 9, 3)
