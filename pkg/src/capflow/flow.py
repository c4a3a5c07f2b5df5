"""Explicit integration of the capillary curvature flow in graph form.

The hypersurface moves with normal speed

    f = <x + cos(theta) nu, e> / F - <X_e, nu>,    F = n sigma_n / sigma_{n-1},

and in the half-space picture this becomes du/dt = -(v / (rho e^w)) f. The
minus sign appears because raising u moves a point towards e, which is the
direction of -X_e. The heavy loop lives in :mod:`capflow._kernel`; this module
adds configuration, monitors and the trace.
"""

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .capgeom import cap_point_radius, cap_spec
from .errors import BlowUpError, ConvexityLossError, DomainError, GeometryError, InvalidInitialDataError
from .quermass import quermass_theta_from_geometry
from .surface import make_initial, reconstruct, rim_slope, validate

__all__ = [
    "THETA_MIN",
    "FlowConfig",
    "FlowTrace",
    "speed_field",
    "time_derivative",
    "step",
    "run",
    "fit_cap",
    "barrier_epsilon",
]

THETA_MIN = 0.2

_STATUS = {
    _kernel.CONVERGED: "converged",
    _kernel.T_MAX: "t_max",
    _kernel.CONVEXITY_LOSS: "error",
    _kernel.BLOW_UP: "error",
}


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of one flow run.

    ``initial`` holds the keyword arguments of :func:`make_initial` apart from
    theta, m and n (``kind``, ``r`` and optionally ``amplitude`` and ``mode``).
    ``every`` is the number of steps between recorded trace rows.
    """

    n: int
    theta: float
    m: int
    initial: dict
    cfl: float = 0.9
    t_max: float = 50.0
    tol_static: float = 1e-7
    max_steps: int = 5_000_000
    every: int = 2000

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if not (THETA_MIN <= self.theta <= 0.5 * math.pi + 1e-15):
            raise DomainError(f"theta must lie in [{THETA_MIN}, pi/2], got {self.theta}")
        if not (0.0 < self.cfl <= 1.0):
            raise DomainError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.tol_static > 0:
            raise DomainError("tol_static must be positive")
        if not self.t_max > 0:
            raise DomainError("t_max must be positive")
        if int(self.max_steps) != self.max_steps or self.max_steps < 0:
            raise DomainError("max_steps must be a non-negative integer")
        if int(self.every) != self.every or self.every < 1:
            raise DomainError("every must be a positive integer")
        if int(self.m) != self.m or self.m < 16:
            raise DomainError("grid must be an integer >= 16")

    def initial_state(self):
        kwargs = dict(self.initial)
        kind = kwargs.pop("kind")
        return make_initial(kind, self.theta, m=self.m, n=self.n, **kwargs)


@dataclass
class FlowTrace:
    """Recorded monitor rows of a run plus its outcome.

    ``status`` is one of converged, t_max, max_steps, error. ``epsilon0`` is
    the barrier margin computed from the caps sandwiching the initial state.
    """

    n: int
    columns: list
    rows: list = field(default_factory=list)
    status: str = "running"
    message: str = ""
    epsilon0: float = math.nan
    wall_time: float = 0.0
    halvings: int = 0

    def column(self, name):
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows], dtype=float)

    def quermass(self, k):
        return self.column(f"W{k}")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def trace_columns(n):
    return (["step", "t", "dt"] + [f"W{k}" for k in range(n + 2)]
            + ["min_F", "max_H", "min_xe", "max_xe", "min_xcn", "min_Xenu", "max_abs_speed", "convex_ok"])


def speed_field(geom, theta=None):
    """Normal speed f at every node of a reconstructed state."""
    theta = geom.theta if theta is None else theta
    if not np.all(geom.F > 0):
        raise ConvexityLossError("curvature quotient F is not positive at some node")
    xcn = geom.z + math.cos(theta) * geom.nu_z
    return xcn / geom.F - geom.Xenu


def time_derivative(state):
    """du/dt at every node, -(v / (rho e^w)) f."""
    geom = reconstruct(state)
    f = speed_field(geom, state.theta)
    return -geom.v / (geom.rho * geom.ew) * f


def _rhs(state, u):
    try:
        return _kernel.rhs(np.ascontiguousarray(u), state.n, math.cos(state.theta), rim_slope(state.theta), state.h)
    except ZeroDivisionError as exc:
        raise BlowUpError("degenerate meridian") from exc


def _checked_rhs(state, u):
    dudt, _, _, ok = _rhs(state, u)
    if not np.all(np.isfinite(dudt)):
        raise BlowUpError("non-finite time derivative")
    if not ok:
        raise ConvexityLossError("stage state is not strictly convex")
    return dudt


def step(state, dt):
    """One explicit midpoint step of size dt.

    Raises
    ------
    BlowUpError
        The update is not finite.
    ConvexityLossError
        A stage lost strict convexity; the caller may retry with dt / 2.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    u = np.array(state.u)
    k1 = _checked_rhs(state, u)
    k2 = _checked_rhs(state, u + 0.5 * dt * k1)
    unew = u + dt * k2
    if not np.all(np.isfinite(unew)):
        raise BlowUpError("non-finite update")
    return state.with_u(unew)


def fit_cap(state):
    """Mean cap radius through the nodes and the largest relative deviation."""
    geom = reconstruct(state)
    try:
        radii = np.array([cap_point_radius(np.array([s, z]), state.theta) for s, z in zip(geom.s, geom.z)])
    except GeometryError as exc:
        raise GeometryError(f"cap fit failed: {exc}") from exc
    r_hat = float(radii.mean())
    return r_hat, float(np.max(np.abs(radii - r_hat)) / r_hat)


def barrier_epsilon(state):
    """Margin eps0 from the two caps C_{theta,R1}, C_{theta,R2} that sandwich a state.

    R1 and R2 are the smallest and largest cap radii through the nodes. The
    lowest point of the outer cap is its tip and the highest point of the inner
    cap is its rim.
    """
    geom = reconstruct(state)
    radii = [cap_point_radius(np.array([s, z]), state.theta) for s, z in zip(geom.s, geom.z)]
    inner, outer = cap_spec(state.theta, min(radii)), cap_spec(state.theta, max(radii))
    lower = min(outer.tip_height, outer.rim_height)
    upper = inner.rim_height
    return min(lower - math.cos(state.theta), 1.0 - upper)


def _monitor_row(state, step_no, t, dt):
    geom = reconstruct(state)
    q = quermass_theta_from_geometry(geom)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = geom.xcn / geom.F - geom.Xenu
    convex = bool(np.all(geom.kappa_m > 0) and np.all(geom.kappa_r > 0))
    return ([int(step_no), float(t), float(dt)] + list(q.values)
            + [float(geom.F.min()), float((state.n * geom.Hk[1]).max()), float(geom.z.min()),
               float(geom.z.max()), float(geom.xcn.min()), float(geom.Xenu.min()),
               float(np.abs(f).max()), convex])


def run(config, initial=None):
    """Integrate until max|f| < tol_static, t_max, or max_steps.

    Numerical failures end the run with status "error"; the trace recorded so
    far is returned together with the last good state.
    """
    clock = time.perf_counter()
    state = config.initial_state() if initial is None else initial
    report = validate(state)
    if not report.ok:
        raise InvalidInitialDataError(f"initial state fails validation: {report.failures}", report)
    trace = FlowTrace(n=state.n, columns=trace_columns(state.n))
    trace.epsilon0 = barrier_epsilon(state)
    trace.rows.append(_monitor_row(state, 0, 0.0, 0.0))
    u = np.ascontiguousarray(state.u, dtype=float)
    t, steps, dt = 0.0, 0, 0.0
    ct, slope = math.cos(state.theta), rim_slope(state.theta)
    while True:
        chunk = min(config.every, config.max_steps - steps)
        if chunk <= 0:
            _, f, _, _ = _rhs(state, u)
            trace.status = "converged" if np.abs(f).max() < config.tol_static else "max_steps"
            break
        try:
            u_new, t_new, taken, code, maxf, dt_last, halv = _kernel.advance(
                u, state.n, ct, slope, state.h, config.cfl, chunk, t, config.t_max, config.tol_static)
        except ZeroDivisionError:
            # the compiled loop works on a copy, so u still holds the state at the start of this chunk
            trace.status, trace.message = "error", "blow-up"
            break
        trace.halvings += int(halv)
        # advance hands back the last accepted state even when it stops early
        u, t, steps = u_new, t_new, steps + int(taken)
        state = state.with_u(u)
        if taken:
            dt = dt_last
            trace.rows.append(_monitor_row(state, steps, t, dt))
        if code in (_kernel.CONVEXITY_LOSS, _kernel.BLOW_UP):
            trace.status = "error"
            trace.message = "convexity loss" if code == _kernel.CONVEXITY_LOSS else "blow-up"
            break
        if code != _kernel.RUNNING:
            trace.status = _STATUS[code]
            break
    if trace.rows[-1][0] != steps:
        trace.rows.append(_monitor_row(state, steps, t, dt))
    trace.wall_time = time.perf_counter() - clock
    return trace, state
