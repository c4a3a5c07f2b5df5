"""The graph state: log radial distance u(beta) of the half-space image over a
uniform grid of the half-meridian beta in [0, pi/2].

beta = 0 is the symmetry axis (image of the e-axis) and beta = pi/2 the
equator (image of the unit sphere).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["GraphState", "uniform_grid", "load_state", "save_state"]

GRID_TOL = 1e-12


def uniform_grid(m):
    """m + 1 uniformly spaced nodes on [0, pi/2]."""
    if m < 2:
        raise DomainError(f"grid needs at least 2 cells, got {m}")
    return np.linspace(0.0, 0.5 * math.pi, m + 1)


@dataclass(frozen=True)
class GraphState:
    """Axisymmetric capillary hypersurface as a radial graph u = log rho.

    Attributes
    ----------
    n : int
        Dimension of the hypersurface (n >= 2); the ambient ball is B^{n+1}.
    theta : float
        Contact angle in (0, pi/2].
    u : ndarray
        Values of log rho at the m + 1 grid nodes.
    beta : ndarray
        The grid itself, uniform from 0 to pi/2.
    """

    n: int
    theta: float
    u: np.ndarray
    beta: np.ndarray = field(default=None)

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim != 1 or u.size < 3:
            raise DomainError("u must be 1-D with at least 3 nodes")
        beta = uniform_grid(u.size - 1) if self.beta is None else np.array(self.beta, dtype=float)
        if beta.shape != u.shape:
            raise DomainError("beta and u must have the same length")
        ref = uniform_grid(u.size - 1)
        if np.max(np.abs(beta - ref)) > GRID_TOL:
            raise DomainError("beta must be the uniform grid on [0, pi/2]")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if not (0.0 < self.theta <= 0.5 * math.pi + 1e-15):
            raise DomainError(f"theta must lie in (0, pi/2], got {self.theta}")
        if not np.all(np.isfinite(u)):
            raise DomainError("u must be finite")
        u.setflags(write=False)
        ref.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "beta", ref)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def m(self):
        return self.u.size - 1

    @property
    def h(self):
        return 0.5 * math.pi / self.m

    def with_u(self, u):
        return GraphState(self.n, self.theta, u)

    def to_dict(self):
        return {
            "n": self.n,
            "theta": self.theta,
            "beta": [float(b) for b in self.beta],
            "u": [float(x) for x in self.u],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            n, theta, beta, u = data["n"], data["theta"], data["beta"], data["u"]
        except (KeyError, TypeError) as exc:
            raise DomainError(f"state object missing field: {exc}") from exc
        extra = set(data) - {"n", "theta", "beta", "u"}
        if extra:
            raise DomainError(f"unknown state fields: {sorted(extra)}")
        if not isinstance(n, int) or isinstance(n, bool):
            raise DomainError("n must be an integer")
        return cls(n, float(theta), np.asarray(u, dtype=float), np.asarray(beta, dtype=float))


def save_state(state, path):
    with open(path, "w") as fh:
        json.dump(state.to_dict(), fh)
        fh.write("\n")


def load_state(path):
    with open(path) as fh:
        return GraphState.from_dict(json.load(fh))
