"""Quermassintegrals of geodesic balls in S^n and the capillary
quermassintegrals W_{0,theta} .. W_{n+1,theta} of a graph state.

All integrals over the hypersurface are reduced to the meridian,
dA = omega_{n-1} area_w dbeta, and evaluated with composite Simpson on the
uniform beta grid. Simpson is fourth order here because every integrand is
smooth on the closed interval; it matches the fourth-order curvatures.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, GeometryError
from .surface import reconstruct
from .symcore import sphere_area

__all__ = [
    "QuermassVector",
    "geodesic_ball_quermass",
    "geodesic_ball_quermass_all",
    "meridian_integral",
    "curvature_integral",
    "enclosed_volume",
    "quermass_theta",
    "quermass_theta_from_geometry",
    "second_quermass_direct",
    "free_boundary_quermass",
    "minkowski_residual",
]

VOLUME_SLACK = 1e-10


@dataclass(frozen=True)
class QuermassVector:
    """W_{0,theta} .. W_{n+1,theta} of one state, plus the boundary data used."""

    n: int
    theta: float
    values: tuple
    alpha: float
    area: float

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.array(self.values)


def _sin_power_integral(n, alpha):
    # int_0^alpha sin^(n-1) t dt
    val, _ = integrate.quad(lambda t: math.sin(t) ** (n - 1), 0.0, alpha, epsabs=1e-14, epsrel=1e-13)
    return val


def geodesic_ball_quermass_all(n, alpha):
    """W_0^S .. W_n^S of the geodesic ball of radius alpha in S^n."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not (0.0 < alpha < 0.5 * math.pi + 1e-6):
        raise DomainError(f"geodesic radius {alpha} outside (0, pi/2]")
    om = sphere_area(n - 1)
    bdry = om * math.sin(alpha) ** (n - 1)
    cot = math.cos(alpha) / math.sin(alpha)
    W = np.empty(n + 1)
    W[0] = om * _sin_power_integral(n, alpha)
    if n >= 1:
        W[1] = bdry / n
    for k in range(2, n + 1):
        W[k] = bdry * cot ** (k - 1) / n + (k - 1) / (n - k + 2) * W[k - 2]
    return W


def geodesic_ball_quermass(n, alpha, l):
    """W_l^S of the geodesic ball of radius alpha in S^n, 0 <= l <= n.

    Examples
    --------
    >>> round(geodesic_ball_quermass(2, 0.7, 2) - 2 * math.pi / 2, 12)
    0.0
    """
    if not 0 <= l <= n:
        raise DomainError(f"l={l} outside [0, {n}]")
    return float(geodesic_ball_quermass_all(n, alpha)[l])


def meridian_integral(geom, values):
    """omega_{n-1} * int values * area_w dbeta over the hypersurface."""
    h = geom.beta[1] - geom.beta[0]
    return sphere_area(geom.n - 1) * integrate.simpson(values * geom.area_w, dx=h)


def curvature_integral(geom, k):
    """int_Sigma H_k dA with H_k normalized (H_0 = 1)."""
    if not 0 <= k <= geom.n:
        raise DomainError(f"k={k} outside [0, {geom.n}]")
    return meridian_integral(geom, geom.Hk[k])


def _alpha(geom):
    return math.acos(min(max(float(geom.z[-1]), -1.0), 1.0))


def enclosed_volume(geom, ball_patch=None):
    """|Sigma-hat|, the region between the hypersurface and e.

    By the divergence theorem applied to x, whose outward normal along the
    hypersurface is +nu and along the spherical patch is x itself:
    (n + 1) |Sigma-hat| = int <x, nu> dA + |B_alpha|.
    """
    if ball_patch is None:
        ball_patch = geodesic_ball_quermass(geom.n, _alpha(geom), 0)
    xnu = geom.s * geom.nu_s + geom.z * geom.nu_z
    vol = (meridian_integral(geom, xnu) + ball_patch) / (geom.n + 1)
    if vol < -VOLUME_SLACK:
        raise GeometryError(f"negative enclosed volume {vol:.3e}; orientation is inconsistent")
    return vol


def quermass_theta_from_geometry(geom):
    n, theta = geom.n, geom.theta
    ct, st = math.cos(theta), math.sin(theta)
    alpha = _alpha(geom)
    WS = geodesic_ball_quermass_all(n, alpha)
    Hint = [curvature_integral(geom, k) for k in range(n + 1)]
    W = np.empty(n + 2)
    W[0] = enclosed_volume(geom, WS[0])
    W[1] = (Hint[0] - ct * WS[0]) / (n + 1)
    for k in range(1, n):
        acc = Hint[k] - ct * st ** k * WS[k]
        for l in range(k):
            coef = (-1) ** (k + l) / (n - l) * math.comb(k, l) * ((n - k) * ct * ct + (k - l))
            acc -= coef * ct ** (k - 1 - l) * st ** l * WS[l]
        W[k + 1] = acc / (n + 1)
    acc = Hint[n]
    for l in range(n):
        acc -= (-1) ** (n + l) * math.comb(n, l) * ct ** (n - 1 - l) * st ** l * WS[l]
    W[n + 1] = acc / (n + 1)
    return QuermassVector(n=n, theta=theta, values=tuple(float(w) for w in W), alpha=alpha, area=Hint[0])


def quermass_theta(state):
    """All capillary quermassintegrals W_{0,theta} .. W_{n+1,theta} of a state."""
    return quermass_theta_from_geometry(reconstruct(state))


def second_quermass_direct(geom):
    """W_{2,theta} from mean curvature, boundary length and boundary patch only.

    Uses the unnormalized mean curvature sigma_1; serves as an independent
    check of the general coefficient formula at k = 1.
    """
    n, theta = geom.n, geom.theta
    ct, st = math.cos(theta), math.sin(theta)
    alpha = _alpha(geom)
    bdry_len = sphere_area(n - 1) * math.sin(alpha) ** (n - 1)
    patch = geodesic_ball_quermass(n, alpha, 0)
    mean = meridian_integral(geom, n * geom.Hk[1])
    return (mean - st * ct * bdry_len + (1.0 + (n - 1) * ct * ct) * patch) / (n * (n + 1))


def free_boundary_quermass(geom):
    """W_{1..n+1} written out for theta = pi/2, where every cos(theta) term drops.

    W_1 = |Sigma| / (n + 1), W_{k+1} = (int H_k + k/(n-k+1) W_{k-1}^S) / (n + 1)
    for 1 <= k <= n - 1, and (n + 1) W_{n+1} = int H_n + n W_{n-1}^S.
    """
    n = geom.n
    WS = geodesic_ball_quermass_all(n, _alpha(geom))
    out = [curvature_integral(geom, 0) / (n + 1)]
    for k in range(1, n):
        out.append((curvature_integral(geom, k) + k / (n - k + 1) * WS[k - 1]) / (n + 1))
    out.append((curvature_integral(geom, n) + n * WS[n - 1]) / (n + 1))
    return np.array(out)


def minkowski_residual(state, k, geom=None):
    """int H_{k-1} <x + cos(theta) nu, e> dA - int H_k <X_e, nu> dA."""
    if geom is None:
        geom = reconstruct(state)
    if not 1 <= k <= geom.n:
        raise DomainError(f"k={k} outside [1, {geom.n}]")
    return meridian_integral(geom, geom.Hk[k - 1] * geom.xcn) - meridian_integral(geom, geom.Hk[k] * geom.Xenu)
