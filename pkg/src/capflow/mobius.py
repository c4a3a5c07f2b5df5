"""Conformal map between the unit ball and the upper half-space.

The distinguished axis e is always the last coordinate axis E_{n+1}. Points are
arrays whose last axis holds the n+1 coordinates, so batches of points of shape
(..., n+1) are accepted everywhere.

Restricted to a meridian half-plane (x_1, x_{n+1}) the map is the Moebius map
of the complex plane w -> i (w - i) / (w + i) run backwards; the flow module
uses that form directly.
"""

import numpy as np

from .errors import DomainError, GeometryError

__all__ = [
    "SINGULAR_RADIUS",
    "ball_to_halfspace",
    "halfspace_to_ball",
    "conformal_factor",
    "conformal_killing_field",
]

SINGULAR_RADIUS = 1e-12


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] < 2:
        raise DomainError("points need at least two coordinates")
    return x


def _dist2_to_pole(x):
    # |x'|^2 + (x_{n+1} - 1)^2
    return np.sum(x[..., :-1] ** 2, axis=-1) + (x[..., -1] - 1.0) ** 2


def ball_to_halfspace(x):
    """Map ball points to the upper half-space; e goes to infinity.

    y = (2 x' + (1 - |x|^2) E_{n+1}) / (|x'|^2 + (x_{n+1} - 1)^2)
    """
    x = _points(x)
    d2 = _dist2_to_pole(x)
    if np.any(d2 <= SINGULAR_RADIUS ** 2):
        raise GeometryError("point within singular radius of e = E_{n+1}")
    norm2 = np.sum(x ** 2, axis=-1)
    y = 2.0 * x
    y[..., -1] = 1.0 - norm2
    return y / d2[..., None]


def halfspace_to_ball(y):
    """Inverse of :func:`ball_to_halfspace`.

    x = (2 y' + (|y|^2 - 1) E_{n+1}) / (|y'|^2 + (y_{n+1} + 1)^2)
    """
    y = _points(y)
    if not np.all(np.isfinite(y)):
        raise DomainError("half-space point must be finite")
    d2 = np.sum(y[..., :-1] ** 2, axis=-1) + (y[..., -1] + 1.0) ** 2
    norm2 = np.sum(y ** 2, axis=-1)
    x = 2.0 * y
    x[..., -1] = norm2 - 1.0
    return x / d2[..., None]


def conformal_factor(x):
    """e^w = (|x'|^2 + (x_{n+1} - 1)^2) / 2, so the pulled back flat metric is e^{-2w} delta."""
    x = _points(x)
    d2 = _dist2_to_pole(x)
    if np.any(d2 <= SINGULAR_RADIUS ** 2):
        raise GeometryError("point within singular radius of e = E_{n+1}")
    return 0.5 * d2


def conformal_killing_field(x):
    """X_e(x) = <x, e> x - (|x|^2 + 1) e / 2, tangent to the unit sphere."""
    x = _points(x)
    xe = x[..., -1]
    norm2 = np.sum(x ** 2, axis=-1)
    out = xe[..., None] * x
    out[..., -1] -= 0.5 * (norm2 + 1.0)
    return out
