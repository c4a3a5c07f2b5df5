import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from capflow.capgeom import (
    CapProfile,
    cap_point_radius,
    cap_quermass,
    cap_quermass_inverse,
    cap_spec,
    cap_state,
)
from capflow.errors import DomainError, GeometryError
from capflow.quermass import meridian_integral
from capflow.surface import reconstruct, validate
from capflow.symcore import reg_inc_beta, sphere_area

THETAS = [math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2]


def rim_angle_oracle(theta, r):
    """Polar angle of the point where the unit circle meets the cap circle."""
    c = math.sqrt(r * r + 2 * r * math.cos(theta) + 1)
    g = lambda a: 1.0 - 2.0 * c * math.cos(a) + c * c - r * r
    return optimize.brentq(g, 0.0, math.pi, xtol=1e-15)


def test_cap_spec_free_boundary_unit():
    cap = cap_spec(math.pi / 2, 1.0)
    assert cap.center_dist == pytest.approx(math.sqrt(2))
    assert cap.tip_height == pytest.approx(math.sqrt(2) - 1)
    assert cap.boundary_geodesic_radius == pytest.approx(math.pi / 4)


@given(st.sampled_from(THETAS), st.floats(0.01, 100.0))
def test_alpha_against_sphere_intersection(theta, r):
    cap = cap_spec(theta, r)
    assert cap.boundary_geodesic_radius == pytest.approx(rim_angle_oracle(theta, r), abs=1e-12)
    assert math.cos(cap.boundary_geodesic_radius) == pytest.approx(cap.rim_height, abs=1e-12)
    assert cap.center_dist > 1 and 0 < cap.tip_height < 1


@given(st.floats(0.01, 100.0))
def test_free_boundary_alpha_is_arctan(r):
    assert cap_spec(math.pi / 2, r).boundary_geodesic_radius == pytest.approx(math.atan(r), abs=1e-14)


@pytest.mark.parametrize("theta", THETAS)
def test_large_radius_limit(theta):
    cap = cap_spec(theta, 1e8)
    assert cap.tip_height == pytest.approx(math.cos(theta), abs=1e-7)
    assert cap.boundary_geodesic_radius == pytest.approx(theta, abs=1e-7)


def test_cap_spec_domain():
    for th, r in ((0.0, 1.0), (2.0, 1.0), (1.0, 0.0), (1.0, -1.0), (1.0, math.inf)):
        with pytest.raises(DomainError):
            cap_spec(th, r)
    with pytest.raises(DomainError):
        cap_state(1.0, 1.0, 8, 2)


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3])
def test_cap_state_curvatures_converge(theta):
    r = 0.8
    errs = []
    for m in (32, 64):
        g = reconstruct(cap_state(theta, r, m, 2))
        errs.append(max(np.abs(g.kappa_m - 1 / r).max(), np.abs(g.kappa_r - 1 / r).max()))
    assert errs[1] < 1e-4
    assert math.log2(errs[0] / errs[1]) >= 1.8


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("n", [2, 3])
def test_caps_are_static_and_valid(theta, n):
    r = 1.3
    st_ = cap_state(theta, r, 200, n)
    g = reconstruct(st_)
    static = g.xcn - g.Xenu / r
    assert np.abs(static).max() < 1e-8
    assert validate(st_).ok


def test_cap_point_radius_tip_and_nodes():
    for theta in THETAS:
        for r in (0.3, 1.0, 4.0):
            tip = np.array([0.0, cap_spec(theta, r).tip_height])
            assert cap_point_radius(tip, theta) == pytest.approx(r, rel=1e-12)
            g = reconstruct(cap_state(theta, r, 64, 2))
            radii = [cap_point_radius(np.array([s, z]), theta) for s, z in zip(g.s, g.z)]
            assert np.allclose(radii, r, rtol=1e-10, atol=0)


def test_cap_point_radius_full_coordinates_and_residual():
    theta, r = 1.0, 0.7
    g = reconstruct(cap_state(theta, r, 32, 3))
    x = g.x[10]
    rr = cap_point_radius(x, theta)
    c = math.sqrt(rr * rr + 2 * rr * math.cos(theta) + 1)
    assert abs(2 * x[-1] * c - (np.dot(x, x) + 2 * rr * math.cos(theta) + 1)) <= 1e-12


def test_cap_point_radius_degenerate_limit():
    z = 1 - 1e-9
    r = cap_point_radius(np.array([0.0, z]), math.pi / 2)
    # 2 z sqrt(r^2 + 1) = z^2 + 1 solved for r
    expected = math.sqrt(((z * z + 1) / (2 * z)) ** 2 - 1)
    assert r == pytest.approx(expected, rel=1e-6)
    assert r < 1e-4


def test_cap_point_radius_errors():
    with pytest.raises(GeometryError):
        cap_point_radius(np.array([0.0, 0.2]), math.pi / 3)
    with pytest.raises(GeometryError):
        cap_point_radius(np.array([1.0, 0.9]), math.pi / 3)


@pytest.mark.parametrize("r", [0.2, 1.0, 5.0])
def test_gauss_bonnet_chern_profile_constant(r):
    assert 3 * cap_quermass(math.pi / 3, r, 3, 200, 2) == pytest.approx(math.pi, rel=1e-8)
    ref = 0.5 * sphere_area(3) * reg_inc_beta(math.sin(0.9) ** 2, 1.5, 0.5)
    assert 4 * cap_quermass(0.9, r, 4, 200, 3) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 2])
def test_profiles_strictly_increasing(n, theta):
    prof = CapProfile(n, theta, 64)
    radii = np.geomspace(0.01, 100, 25)
    table = np.array([prof.values(r) for r in radii])
    for k in range(0, n + 1):
        assert np.all(np.diff(table[:, k]) > 0), k
    assert np.ptp(table[:, n + 1]) < 1e-6


def test_profiles_vanish_for_tiny_caps():
    prof = CapProfile(2, math.pi / 3, 64)
    for k in range(3):
        assert prof.f(k, 1e-4) < 1e-3


@pytest.mark.parametrize("k", [0, 1, 2])
def test_inverse_round_trip(k):
    prof = CapProfile(2, math.pi / 3, 64)
    for r0 in (0.05, 0.9, 20.0):
        w = prof.f(k, r0)
        r = prof.inverse(k, w)
        assert r == pytest.approx(r0, rel=1e-8)
        assert abs(prof.f(k, r) - w) <= 1e-10 * max(1.0, abs(w))


def test_inverse_monotone_and_free_boundary_example():
    prof = CapProfile(3, math.pi / 4, 64)
    ws = np.linspace(prof.f(2, 0.1), prof.f(2, 10.0), 7)
    rs = [prof.inverse(2, w) for w in ws]
    assert np.all(np.diff(rs) > 0)
    w1 = cap_quermass(math.pi / 2, 1.0, 1, 100, 2)
    assert cap_quermass_inverse(math.pi / 2, 1, w1, 100, 2) == pytest.approx(1.0, rel=1e-8)


def test_inverse_out_of_range():
    prof = CapProfile(2, math.pi / 3, 32)
    with pytest.raises(DomainError):
        prof.inverse(1, 1e6)
    with pytest.raises(DomainError):
        prof.inverse(3, 0.1)


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([math.pi / 4, math.pi / 3]), st.floats(0.3, 3.0), st.sampled_from([2, 3]))
def test_dilation_ode(theta, r, n):
    # r' = r c along the dilation; dW_k/dt = k/(n+1) C(n,k-1)^{-1} int sigma_k <X_e,nu> dA
    prof = CapProfile(n, theta, 200)
    c = cap_spec(theta, r).center_dist
    dr = 1e-4 * r
    g = reconstruct(cap_state(theta, r, 200, n))
    for k in range(1, n + 1):
        fd = (prof.f(k, r + dr) - prof.f(k, r - dr)) / (2 * dr) * r * c
        formula = k / (n + 1) / math.comb(n, k - 1) * meridian_integral(g, g.Hk[k] * math.comb(n, k) * g.Xenu)
        assert fd == pytest.approx(formula, rel=1e-6)
