import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from capflow.errors import DomainError
from capflow.symcore import (
    curvature_quotient,
    elementary_symmetric,
    newton_maclaurin_gap,
    normalized_hk,
    reg_inc_beta,
    sigma_k,
    sigma_partial,
    sphere_area,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
kappas = st.integers(min_value=2, max_value=6).flatmap(lambda n: st.lists(positive, min_size=n, max_size=n))


def brute_sigma(kappa, k):
    return sum(math.prod(c) for c in itertools.combinations(kappa, k))


def test_sigma_small_cases():
    assert sigma_k([2.5, 2.5, 2.5], 1) == pytest.approx(7.5)
    assert sigma_k([1, 2, 3], 2) == 11
    assert sigma_k([1, 2, 3], 4) == 0
    assert sigma_k([1, 2, 3], 0) == 1


def test_sigma_range_errors():
    with pytest.raises(DomainError):
        sigma_k([1, 2], 4)
    with pytest.raises(DomainError):
        sigma_k([1, 2], -1)
    with pytest.raises(DomainError):
        elementary_symmetric([])
    with pytest.raises(DomainError):
        sigma_k([1.0, np.nan], 1)


def test_normalized_hk():
    c = 0.7
    for k in range(5):
        assert normalized_hk([c] * 4, k) == pytest.approx(c ** k, rel=1e-14)
    assert normalized_hk([1, 2, 3], 2) == pytest.approx(11 / 3)
    assert normalized_hk([5, 9], 0) == 1
    assert normalized_hk([5, 9], 3) == 0


def test_sigma_partial_examples():
    # zero-based index: i = 0 drops the entry 1
    assert sigma_partial([1, 2, 3], 2, 0) == 5
    assert sigma_partial([0.3, 0.3], 1, 1) == 1
    assert sigma_partial([1, 2, 3], 3, 1) == 3
    with pytest.raises(IndexError):
        sigma_partial([1, 2, 3], 2, 3)
    with pytest.raises(DomainError):
        sigma_partial([1, 2, 3], 0, 0)


@given(kappas)
def test_sigma_matches_enumeration(kappa):
    sig = elementary_symmetric(kappa)
    for k in range(len(kappa) + 1):
        assert sig[k] == pytest.approx(brute_sigma(kappa, k), rel=1e-12)


@given(kappas)
def test_partial_derivative_identities(kappa):
    n = len(kappa)
    kap = np.array(kappa)
    sig = np.append(elementary_symmetric(kap), 0.0)
    for k in range(1, n + 1):
        parts = np.array([sigma_partial(kap, k, i) for i in range(n)])
        for i in range(n):
            rest = sigma_k(np.delete(kap, i), k) if k < n else 0.0
            assert parts[i] * kap[i] + rest == pytest.approx(sig[k], rel=1e-12)
        assert np.sum(kap * parts) == pytest.approx(k * sig[k], rel=1e-12)
        lhs = np.sum(kap ** 2 * parts)
        rhs = sig[1] * sig[k] - (k + 1) * sig[k + 1]
        # rhs is a difference of positive terms; compare on the scale of sig1 sigk
        assert abs(lhs - rhs) <= 1e-12 * sig[1] * sig[k]
    for k in range(0, n):
        total = sum(sigma_partial(kap, k + 1, i) for i in range(n))
        assert total == pytest.approx((n - k) * sig[k], rel=1e-12)


@given(kappas)
def test_newton_maclaurin(kappa):
    n = len(kappa)
    spread = max(kappa) / min(kappa)
    for k in range(1, n):
        for l in range(k + 1, n + 1):
            gap = newton_maclaurin_gap(kappa, k, l)
            scale = normalized_hk(kappa, k) * normalized_hk(kappa, l)
            assert gap >= -1e-12 * scale
            if spread > 1 + 1e-3:
                assert gap > 0


@pytest.mark.parametrize("n", [2, 3, 6])
def test_newton_maclaurin_umbilic_equality(n):
    for c in (0.01, 1.0, 37.0):
        for k in range(1, n):
            for l in range(k + 1, n):
                gap = newton_maclaurin_gap([c] * n, k, l)
                assert abs(gap) <= 1e-12 * c ** (k + l)
            # H_{n+1} = 0, so at l = n the gap is H_k H_n and never vanishes
            assert newton_maclaurin_gap([c] * n, k, n) == pytest.approx(c ** (k + n), rel=1e-12)


def test_newton_maclaurin_range():
    with pytest.raises(DomainError):
        newton_maclaurin_gap([1, 2, 3], 2, 2)


def test_curvature_quotient_umbilic():
    assert curvature_quotient([0.8] * 5) == pytest.approx(0.8, rel=1e-14)
    assert curvature_quotient([1.0, 2.0]) == pytest.approx(2 * 2 / 3)


def _beta_oracle(s, a, b):
    # t = sin^2(phi) removes the (1 - t)^(-1/2) endpoint singularity for b = 1/2
    g = lambda p: 2.0 * math.sin(p) ** (2 * a - 1) * math.cos(p) ** (2 * b - 1)
    # atan2 keeps the upper limit accurate as s -> 1, where asin(sqrt(s)) does not
    top_limit = math.atan2(math.sqrt(s), math.sqrt(1.0 - s))
    with warnings.catch_warnings():
        # quad flags roundoff at these tight tolerances; the result is still ~1e-15
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        top = integrate.quad(g, 0.0, top_limit, epsabs=1e-15, epsrel=1e-14)[0]
        full = integrate.quad(g, 0.0, 0.5 * math.pi, epsabs=1e-15, epsrel=1e-14)[0]
    return top / full


@pytest.mark.parametrize("theta", np.linspace(0.05, 0.5 * math.pi, 9))
def test_reg_inc_beta_closed_forms(theta):
    s = math.sin(theta) ** 2
    assert abs(reg_inc_beta(s, 1.0, 0.5) - (1 - math.cos(theta))) <= 1e-12
    assert abs(reg_inc_beta(s, 1.5, 0.5) - (2 * theta - math.sin(2 * theta)) / math.pi) <= 1e-12


@given(st.floats(0.0, 1.0), st.sampled_from([0.5, 1.0, 1.5, 2.0, 2.5]))
@settings(max_examples=60)
def test_reg_inc_beta_against_quadrature(s, a):
    assert abs(reg_inc_beta(s, a, 0.5) - _beta_oracle(s, a, 0.5)) <= 1e-12


def test_reg_inc_beta_endpoints_and_monotone():
    assert reg_inc_beta(0.0, 1.5, 0.5) == 0.0
    assert reg_inc_beta(1.0, 3.7, 0.2) == 1.0
    vals = [reg_inc_beta(s, 2.0, 0.5) for s in np.linspace(0, 1, 101)]
    assert np.all(np.diff(vals) >= 0)
    for bad in ((-0.1, 1, 1), (1.1, 1, 1), (0.5, 0, 1), (0.5, 1, -2)):
        with pytest.raises(DomainError):
            reg_inc_beta(*bad)


def test_sphere_area():
    assert sphere_area(0) == pytest.approx(2.0)
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(8 * math.pi ** 2 / 3)
    assert 0.5 * sphere_area(4) * reg_inc_beta(1.0, 2.0, 0.5) == pytest.approx(4 * math.pi ** 2 / 3)
    with pytest.raises(DomainError):
        sphere_area(-1)


def test_batched_tuples_match_rows():
    rng = np.random.default_rng(3)
    kap = rng.uniform(0.1, 5.0, size=(50, 4))
    sig = elementary_symmetric(kap)
    assert sig.shape == (50, 5)
    for row, s in zip(kap, sig):
        assert np.allclose(s, elementary_symmetric(row), rtol=1e-15)
    assert np.allclose(sigma_partial(kap, 3, 2), [sigma_partial(r, 3, 2) for r in kap], rtol=1e-15)
    assert np.allclose(newton_maclaurin_gap(kap, 1, 4), [newton_maclaurin_gap(r, 1, 4) for r in kap])
    assert np.array_equal(sigma_k(kap, 5), np.zeros(50))
    assert np.allclose(curvature_quotient(kap), [curvature_quotient(r) for r in kap])
    assert isinstance(sigma_k([1.0, 2.0], 1), float)
