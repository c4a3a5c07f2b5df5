"""Pointwise geometry of a graph state, boundary quantities and validity checks.

A state is reconstructed node by node as a meridian curve xi(beta) = s + i z
in the ball, where s is the distance to the e-axis and z = <x, e>. The ball
point itself sits in the (E_1, E_{n+1}) plane. Curvatures come from the
surface-of-revolution formulas with normal nu = -i T, which points out of the
region between the hypersurface and e; caps then have kappa = +1/r.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .capgeom import cap_state
from .errors import BlowUpError, DomainError, GeometryError, InvalidInitialDataError
from .state import GraphState

__all__ = [
    "MeridianGeometry",
    "BoundaryFrame",
    "ValidityReport",
    "reconstruct",
    "boundary_frame",
    "validate",
    "make_initial",
    "rim_slope",
    "sigma_rotational",
]

# Largest |<nu, x> + cos(theta)| accepted by validate. The residual is
# measured with a fourth-order one-sided slope; perturbed caps at m = 50 stay
# below 2e-6, so 1e-4 only rejects states whose contact angle is really off.
CONTACT_TOL = 1e-4
RIM_RADIUS_TOL = 1e-9


def rim_slope(theta):
    """End slope u_beta(pi/2) forced by the contact angle.

    With beta measured from the axis the image radius shrinks towards the rim,
    hence the minus sign.
    """
    return -1.0 / math.tan(theta)


def sigma_rotational(km, kr, n):
    """sigma_0..sigma_n for kappa = (km, kr repeated n - 1 times).

    Returns an array of shape (n + 1,) + km.shape.
    """
    km = np.asarray(km, dtype=float)
    kr = np.asarray(kr, dtype=float)
    out = np.empty((n + 1,) + np.broadcast(km, kr).shape)
    out[0] = 1.0
    for k in range(1, n + 1):
        lead = math.comb(n - 1, k) * kr ** k if k <= n - 1 else 0.0
        out[k] = lead + km * math.comb(n - 1, k - 1) * kr ** (k - 1)
    return out


@dataclass(frozen=True)
class MeridianGeometry:
    """Per-node geometry of a reconstructed state.

    ``x`` and ``nu`` are (m + 1, n + 1) arrays in the meridian plane spanned by
    E_1 and E_{n+1}. ``Hk`` has shape (n + 1, m + 1) with normalized mean
    curvatures H_0 .. H_n. ``area_w`` is s^(n-1) |x_beta|, so that
    dA = omega_{n-1} area_w dbeta with omega_{n-1} the area of S^{n-1}.
    """

    n: int
    theta: float
    beta: np.ndarray
    s: np.ndarray
    z: np.ndarray
    nu_s: np.ndarray
    nu_z: np.ndarray
    kappa_m: np.ndarray
    kappa_r: np.ndarray
    Hk: np.ndarray
    F: np.ndarray
    Xenu: np.ndarray
    area_w: np.ndarray
    ew: np.ndarray
    rho: np.ndarray
    u_beta: np.ndarray
    v: np.ndarray
    tangent: np.ndarray = field(repr=False)

    @property
    def x(self):
        pts = np.zeros((self.s.size, self.n + 1))
        pts[:, 0] = self.s
        pts[:, -1] = self.z
        return pts

    @property
    def nu(self):
        vec = np.zeros((self.s.size, self.n + 1))
        vec[:, 0] = self.nu_s
        vec[:, -1] = self.nu_z
        return vec

    @property
    def xe(self):
        return self.z

    @property
    def nue(self):
        return self.nu_z

    @property
    def xcn(self):
        """<x + cos(theta) nu, e>."""
        return self.z + math.cos(self.theta) * self.nu_z

    @property
    def sigma(self):
        return sigma_rotational(self.kappa_m, self.kappa_r, self.n)


def reconstruct(state):
    """Ball geometry at every node of ``state``.

    Raises
    ------
    GeometryError
        If an interior node lands on the axis.
    BlowUpError
        If any derivative or curvature is not finite.
    """
    n, theta = state.n, state.theta
    try:
        s, z, nus, nuz, ts, tz, speed, km, kr, ub, _, _ = _kernel.fields(
            np.ascontiguousarray(state.u), n, math.cos(theta), rim_slope(theta), state.h)
    except ZeroDivisionError as exc:
        # the compiled kernel raises this when a node collapses onto a point
        raise BlowUpError("degenerate meridian in reconstruction") from exc
    if np.any(s[1:] <= 0.0):
        raise GeometryError("meridian touches the axis away from beta = 0")
    if not (np.all(np.isfinite(km)) and np.all(np.isfinite(kr)) and np.all(np.isfinite(speed))):
        raise BlowUpError("non-finite curvature in reconstruction")
    sig = sigma_rotational(km, kr, n)
    binom = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    Hk = sig / binom[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        F = n * sig[n] / sig[n - 1]
    xnu = s * nus + z * nuz
    Xenu = z * xnu - 0.5 * (s * s + z * z + 1.0) * nuz
    ew = 0.5 * (s * s + (z - 1.0) ** 2)
    return MeridianGeometry(
        n=n, theta=theta, beta=state.beta, s=s, z=z, nu_s=nus, nu_z=nuz,
        kappa_m=km, kappa_r=kr, Hk=Hk, F=F, Xenu=Xenu,
        area_w=s ** (n - 1) * speed, ew=ew, rho=np.exp(state.u), u_beta=ub,
        v=np.sqrt(1.0 + ub * ub), tangent=np.stack([ts, tz]),
    )


@dataclass(frozen=True)
class BoundaryFrame:
    contact_residual: float
    h_mu_mu: float
    alpha: float
    hhat: float
    rel2_residual: float
    mu_e: float
    boundary_convexity: float


def _rim_normal_from_data(state):
    """Normal and position at the rim using a one-sided slope of the data.

    The kernel pins u_beta at the rim, so its normal satisfies the contact
    condition by construction. Differencing the stored values instead lets
    the residual see states whose contact angle is off.
    """
    u, h = state.u, state.h
    slope = (25.0 * u[-1] - 48.0 * u[-2] + 36.0 * u[-3] - 16.0 * u[-4] + 3.0 * u[-5]) / (12.0 * h)
    w = 1j * math.exp(u[-1]) * complex(math.cos(state.beta[-1]), -math.sin(state.beta[-1]))
    q = w + 1j
    xi = 1j * (w - 1j) / q
    xb = -2.0 / (q * q) * (slope - 1j) * w
    nu = -1j * xb / abs(xb)
    return xi, nu


def boundary_frame(state, geom=None):
    """Boundary-node quantities of ``state``."""
    if geom is None:
        geom = reconstruct(state)
    xi, nu = _rim_normal_from_data(state)
    if abs(abs(xi) - 1.0) > RIM_RADIUS_TOL:
        raise GeometryError(f"rim node off the unit sphere by {abs(abs(xi) - 1.0):.3e}")
    theta = state.theta
    contact = nu.real * xi.real + nu.imag * xi.imag + math.cos(theta)
    zr = min(max(geom.z[-1], -1.0), 1.0)
    alpha = math.acos(zr)
    hhat = 1.0 / math.tan(alpha)
    kr = float(geom.kappa_r[-1])
    rel2 = kr - (math.sin(theta) * hhat - math.cos(theta))
    return BoundaryFrame(
        contact_residual=float(contact),
        h_mu_mu=float(geom.kappa_m[-1]),
        alpha=alpha,
        hhat=hhat,
        rel2_residual=float(rel2),
        mu_e=float(geom.tangent[1, -1]),
        boundary_convexity=1.0 / math.sin(theta) + kr / math.tan(theta),
    )


@dataclass
class ValidityReport:
    min_kappa: float = math.nan
    min_Xenu: float = math.nan
    min_height_gap: float = math.nan
    max_nue_shift: float = math.nan
    min_xcn: float = math.nan
    mu_e: float = math.nan
    contact_residual: float = math.nan
    proper: bool = False
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def as_dict(self):
        return {
            "ok": self.ok,
            "min_kappa": self.min_kappa,
            "min_Xenu": self.min_Xenu,
            "min_height_gap": self.min_height_gap,
            "max_nue_shift": self.max_nue_shift,
            "min_xcn": self.min_xcn,
            "mu_e": self.mu_e,
            "contact_residual": self.contact_residual,
            "proper": self.proper,
            "failures": list(self.failures),
        }


def validate(state):
    """Check the hypotheses the flow and the inequalities need.

    Never raises for geometric reasons; problems are listed in
    ``report.failures``.
    """
    report = ValidityReport()
    try:
        geom = reconstruct(state)
        frame = boundary_frame(state, geom)
    except (GeometryError, BlowUpError) as exc:
        report.failures.append(f"reconstruction: {exc}")
        return report
    ct = math.cos(state.theta)
    report.min_kappa = float(min(geom.kappa_m.min(), geom.kappa_r.min()))
    report.min_Xenu = float(geom.Xenu.min())
    report.min_height_gap = float((geom.z - ct).min())
    report.max_nue_shift = float((geom.nu_z + ct * ct).max())
    report.min_xcn = float(geom.xcn.min())
    report.mu_e = frame.mu_e
    report.contact_residual = frame.contact_residual
    r2 = geom.s[:-1] ** 2 + geom.z[:-1] ** 2
    report.proper = bool(np.all(r2 < 1.0))
    checks = [
        ("convexity", report.min_kappa > 0.0),
        ("star_shaped", report.min_Xenu > 0.0),
        ("height", report.min_height_gap > 0.0),
        ("normal_height", report.max_nue_shift < 0.0),
        ("ellipticity", report.min_xcn > 0.0),
        ("conormal", report.mu_e > 0.0),
        ("contact", abs(report.contact_residual) <= CONTACT_TOL),
        ("proper", report.proper),
    ]
    report.failures.extend(name for name, good in checks if not good)
    return report


def make_initial(kind, theta, r, amplitude=0.0, mode=1, m=400, n=2):
    """Cap or perturbed cap u_cap + amplitude cos(2 mode beta), validated."""
    if amplitude < 0:
        raise DomainError("amplitude must be non-negative")
    if int(mode) != mode or mode < 1:
        raise DomainError("mode must be a positive integer")
    base = cap_state(theta, r, m, n)
    if kind == "cap":
        state = base
    elif kind == "perturbed_cap":
        state = base.with_u(base.u + amplitude * np.cos(2 * mode * base.beta))
    else:
        raise DomainError(f"unknown initial kind {kind!r}")
    report = validate(state)
    if not report.ok:
        raise InvalidInitialDataError(f"initial state fails validation: {report.failures}", report)
    return state
