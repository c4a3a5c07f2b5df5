"""Model spherical caps C_{theta,r}(e): the sphere of radius r centred at
sqrt(r^2 + 2 r cos(theta) + 1) e, cut by the closed unit ball.

Also the cap profile functions f_k(r) = W_{k,theta} of the cap and their
inverses, which drive the Alexandrov-Fenchel comparison.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .errors import DomainError, GeometryError
from .state import GraphState, uniform_grid

__all__ = [
    "CapSpec",
    "cap_spec",
    "cap_state",
    "cap_point_radius",
    "cap_quermass",
    "cap_quermass_inverse",
    "CapProfile",
]

R_BRACKET = (1e-3, 1e3)
BRACKET_EXPANSIONS = 6


def _check_theta(theta):
    if not (0.0 < theta <= 0.5 * math.pi + 1e-15):
        raise DomainError(f"theta must lie in (0, pi/2], got {theta}")


@dataclass(frozen=True)
class CapSpec:
    theta: float
    r: float

    @property
    def center_dist(self):
        return math.sqrt(self.r * self.r + 2.0 * self.r * math.cos(self.theta) + 1.0)

    @property
    def tip_height(self):
        # c - r, written to avoid cancellation for large r
        c = self.center_dist
        return (2.0 * self.r * math.cos(self.theta) + 1.0) / (c + self.r)

    @property
    def rim_height(self):
        """<x, e> along the boundary circle, cos(alpha)."""
        return (1.0 + self.r * math.cos(self.theta)) / self.center_dist

    @property
    def boundary_geodesic_radius(self):
        """alpha, the geodesic radius in S^n of the boundary circle."""
        # atan2 keeps precision when alpha is small
        return math.atan2(self.r * math.sin(self.theta), 1.0 + self.r * math.cos(self.theta))


def cap_spec(theta, r):
    """Validated cap parameters with derived centre distance, tip height and alpha."""
    _check_theta(theta)
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"cap radius must be positive and finite, got {r}")
    return CapSpec(float(theta), float(r))


def _image_sphere(cap):
    """Centre height and radius of the half-space image of the cap sphere.

    The image of a sphere under the Moebius map is a sphere symmetric about
    the vertical axis; it crosses the axis at the images of c - r and c + r.
    """
    zt = cap.tip_height
    zb = cap.center_dist + cap.r
    y_top = (1.0 + zt) / (1.0 - zt)
    y_bot = -(zb + 1.0) / (zb - 1.0)
    return 0.5 * (y_top + y_bot), 0.5 * (y_top - y_bot)


def cap_state(theta, r, m, n):
    """GraphState sampling the cap C_{theta,r} on an m-cell grid in dimension n.

    rho(beta) is the distance from the origin to the image sphere along the
    ray at colatitude beta; the origin lies inside that sphere, so the ray
    meets it exactly once.
    """
    cap = cap_spec(theta, r)
    if m < 16:
        raise DomainError(f"cap_state needs m >= 16, got {m}")
    hc, R = _image_sphere(cap)
    beta = uniform_grid(m)
    disc = R * R - (hc * np.sin(beta)) ** 2
    if np.any(disc <= 0):
        raise GeometryError("cap image is not a radial graph over the hemisphere")
    rho = hc * np.cos(beta) + np.sqrt(disc)
    if np.any(rho <= 0):
        raise GeometryError("cap image does not enclose the origin")
    return GraphState(n, theta, np.log(rho))


def _cap_equation(r, x, theta):
    # 2 <x,e> sqrt(r^2 + 2 r cos + 1) - (|x|^2 + 2 r cos + 1); zero on the cap sphere
    ct = math.cos(theta)
    return 2.0 * x[-1] * math.sqrt(r * r + 2.0 * r * ct + 1.0) - (float(np.dot(x, x)) + 2.0 * r * ct + 1.0)


def cap_point_radius(x, theta):
    """The radius r of the cap C_{theta,r} through the ball point x."""
    _check_theta(theta)
    x = np.asarray(x, dtype=float)
    if np.dot(x, x) > 1.0 + 1e-12:
        raise GeometryError("point lies outside the closed unit ball")
    if not x[-1] > math.cos(theta):
        raise GeometryError("point is not above the flat capillary ball <x,e> = cos(theta)")
    lo, hi = 1e-14, 1.0
    if _cap_equation(lo, x, theta) > 0:
        raise GeometryError("no bracket: point too close to e")
    for _ in range(80):
        if _cap_equation(hi, x, theta) > 0:
            break
        hi *= 10.0
    else:
        raise GeometryError("no bracket found for cap radius")
    return optimize.brentq(_cap_equation, lo, hi, args=(x, theta), xtol=1e-300, rtol=4 * np.finfo(float).eps,
                           maxiter=500)


def cap_quermass(theta, r, k, m, n):
    """f_k(r) = W_{k,theta} of the cap of radius r, by quadrature at resolution m."""
    if not 0 <= k <= n + 1:
        raise DomainError(f"k={k} outside [0, {n + 1}]")
    return CapProfile(n, theta, m).f(k, r)


def cap_quermass_inverse(theta, k, w, m, n, bracket=R_BRACKET):
    """Radius r with f_k(r) = w, by bisection in log r on an expanding bracket."""
    return CapProfile(n, theta, m, bracket).inverse(k, w)


class CapProfile:
    """Cached cap profile functions f_0 .. f_{n+1} at fixed (n, theta, m)."""

    def __init__(self, n, theta, m, bracket=R_BRACKET):
        _check_theta(theta)
        self.n = int(n)
        self.theta = float(theta)
        self.m = int(m)
        self.bracket = (float(bracket[0]), float(bracket[1]))
        self._values = lru_cache(maxsize=4096)(self._compute)

    def _compute(self, r):
        from .quermass import quermass_theta
        return quermass_theta(cap_state(self.theta, r, self.m, self.n)).values

    def values(self, r):
        return self._values(float(r))

    def f(self, k, r):
        return float(self.values(r)[k])

    def inverse(self, k, w):
        """Radius r with f_k(r) = w.

        Bisection in log r runs until the bracket is at machine precision, so
        |f_k(r) - w| is limited only by the rounding of f_k itself (well below
        1e-10 max(1, |w|)) and r is as accurate as the slope of f_k allows.
        """
        if not 0 <= k <= self.n:
            raise DomainError(f"profile inverse needs 0 <= k <= n, got k={k}")
        lo, hi = self.bracket
        for _ in range(BRACKET_EXPANSIONS):
            if self.f(k, lo) <= w:
                break
            lo /= 10.0
        for _ in range(BRACKET_EXPANSIONS):
            if self.f(k, hi) >= w:
                break
            hi *= 10.0
        if not (self.f(k, lo) <= w <= self.f(k, hi)):
            raise DomainError(f"value {w} outside the range of f_{k} on [{lo:g}, {hi:g}]")
        a, b = math.log(lo), math.log(hi)
        while b - a > 4e-16 * max(1.0, abs(a), abs(b)):
            mid = 0.5 * (a + b)
            fm = self.f(k, math.exp(mid))
            if fm == w:
                return math.exp(mid)
            if fm < w:
                a = mid
            else:
                b = mid
        return math.exp(0.5 * (a + b))
