import itertools
import math

import mpmath
import numpy as np
import pytest

from kuznetsov4.params import random_imaginary_alpha
from kuznetsov4.testfn import (
    TestParams,
    direct_integrand,
    f_r,
    f_r_product_form,
    fit_slope,
    h_tr_n,
    k_r,
    k_r_T,
    main_term_integral,
    main_term_scaling,
    p_sharp,
    stirling_comparison,
    stirling_integrand,
    tau_from_T,
)

ALPHA = [0.3j, 0.1j, -0.15j, -0.25j]


def _p_sharp_oracle(alpha, T, R):
    """Direct mpmath product, written independently of the library."""
    a = [mpmath.mpc(x) for x in alpha]
    v = mpmath.exp(sum(x * x for x in a) / (2 * T**2))
    for j, k in itertools.permutations(range(4), 2):
        v *= mpmath.gamma((2 + R + a[j] - a[k]) / 4)
    combos = [a[0] + a[1] - a[2] - a[3], a[0] + a[2] - a[1] - a[3], a[0] + a[3] - a[1] - a[2]]
    for c in combos:
        v *= (1 + abs(c) ** 2) ** (mpmath.mpf(R) / 6)
    return complex(v)


@pytest.mark.parametrize("T,R", [(4.0, 1.0), (10.0, 2.5)])
def test_p_sharp_against_oracle(T, R):
    assert p_sharp(ALPHA, TestParams(T, R)) == pytest.approx(_p_sharp_oracle(ALPHA, T, R), rel=1e-12)


def test_p_sharp_weyl_invariant():
    tp = TestParams(5.0, 1.5)
    ref = p_sharp(ALPHA, tp)
    for perm in itertools.permutations(range(4)):
        assert p_sharp([ALPHA[i] for i in perm], tp) == pytest.approx(ref, rel=1e-12)


def test_p_sharp_lower_ranks():
    tp = TestParams(3.0)
    assert p_sharp([0.2j, -0.2j], tp) == pytest.approx(
        math.exp(-0.08 / 18) * abs(complex(mpmath.gamma((3 + 0.4j) / 4))) ** 2, rel=1e-12)
    assert h_tr_n([0.2j, 0.1j, -0.3j], 3, tp) > 0


def test_fr_product_form(rng):
    for _ in range(50):
        a = random_imaginary_alpha(rng, scale=3.0)
        R = rng.uniform(1, 4)
        assert abs(f_r_product_form(a, R) - f_r(a, R)) < 1e-12 * f_r(a, R)


def test_params_validation():
    with pytest.raises(ValueError):
        TestParams(1.0)
    with pytest.raises(ValueError):
        TestParams(5.0, 0.5)


def test_k_r_forms_agree():
    for gaps in [(0.0, 0.0, 0.0), (1.0, 2.0, 0.5), (10.0, 0.0, 3.0)]:
        tau = tau_from_T(*gaps)
        assert sum(tau) == pytest.approx(0.0, abs=1e-12)
        assert k_r(tau, 2.0) == pytest.approx(k_r_T(*gaps, 2.0), rel=1e-12)
    with pytest.raises(ValueError):
        k_r((0.0, 1.0, 0.0, -1.0), 1.0)
    with pytest.raises(ValueError):
        k_r_T(-1.0, 0.0, 0.0, 1.0)


def test_stirling_comparison_tends_to_one():
    tp = TestParams(60.0, 1.0)
    near = stirling_comparison((15.0, 5.0, -5.0, -15.0), tp)
    far = stirling_comparison((45.0, 15.0, -15.0, -45.0), tp)
    assert abs(far - 1) < abs(near - 1)
    assert abs(far - 1) < 0.01


def test_direct_integrand_vanishes_on_walls():
    tp = TestParams(8.0)
    assert direct_integrand((1.0, 1.0, -1.0, -1.0), tp) == 0.0
    assert direct_integrand((3.0, 1.0, -1.0, -3.0), tp) > 0


def test_reduced_integrand_is_even():
    tp = TestParams(8.0)
    t = np.array([4.0, 1.0, -2.0, -3.0])
    assert stirling_integrand(t, tp) == pytest.approx(stirling_integrand(-t[::-1], tp), rel=1e-14)


def test_main_term_scaling():
    rep = main_term_scaling(quad=16)
    assert rep["expected_slope"] == 17
    assert abs(rep["slope"] - 17) < 0.05 * 17
    # the leading ratio settles as T grows
    lr = rep["leading_ratio"]
    assert abs(lr[2] / lr[1] - 1) < abs(lr[1] / lr[0] - 1)


def test_main_term_error_estimate():
    r = main_term_integral(TestParams(8.0), quad=24)
    assert r.quad_error < 1e-2 * r.value
    with pytest.raises(ValueError):
        main_term_integral(TestParams(100.0))


def test_fit_slope_exact_power():
    Ts = [2.0, 4.0, 8.0]
    assert fit_slope(Ts, [t**3.5 for t in Ts]) == pytest.approx(3.5)
