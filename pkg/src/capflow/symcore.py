"""Elementary symmetric functions of principal curvatures and a few special
functions (regularized incomplete beta, unit sphere areas).

sigma_k is evaluated by inserting the entries of kappa one at a time into the
running vector (sigma_0, ..., sigma_n). For positive entries every update is a
sum of positive terms, so there is no cancellation.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "elementary_symmetric",
    "sigma_k",
    "normalized_hk",
    "sigma_partial",
    "newton_maclaurin_gap",
    "curvature_quotient",
    "reg_inc_beta",
    "sphere_area",
]


def _as_kappa(kappa):
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim < 1 or kappa.shape[-1] < 1:
        raise DomainError("kappa must be a non-empty sequence (or a stack of them along the last axis)")
    if not np.all(np.isfinite(kappa)):
        raise DomainError("kappa must be finite")
    return kappa


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def elementary_symmetric(kappa):
    """Return (sigma_0, ..., sigma_n) for the tuple kappa.

    A 2-D input is read as one tuple per row, and the result then has shape
    ``(rows, n + 1)``.
    """
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    sig = np.zeros(kappa.shape[:-1] + (n + 1,))
    sig[..., 0] = 1.0
    for j in range(1, n + 1):
        # right-hand side is evaluated before assignment
        sig[..., 1:j + 1] = sig[..., 1:j + 1] + kappa[..., j - 1:j] * sig[..., 0:j]
    return sig


def _check_k(k, n):
    if not 0 <= k <= n + 1:
        raise DomainError(f"k={k} outside [0, {n + 1}]")


def sigma_k(kappa, k):
    """k-th elementary symmetric polynomial; sigma_0 = 1 and sigma_{n+1} = 0."""
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    _check_k(k, n)
    if k == n + 1:
        return _out(np.zeros(kappa.shape[:-1]))
    return _out(elementary_symmetric(kappa)[..., k])


def _normalized_all(kappa):
    n = kappa.shape[-1]
    binom = np.array([math.comb(n, j) for j in range(n + 1)], dtype=float)
    hk = elementary_symmetric(kappa) / binom
    return np.concatenate([hk, np.zeros(kappa.shape[:-1] + (1,))], axis=-1)


def normalized_hk(kappa, k):
    """Normalized k-th mean curvature sigma_k / C(n, k), with H_{n+1} = 0."""
    kappa = _as_kappa(kappa)
    _check_k(k, kappa.shape[-1])
    return _out(_normalized_all(kappa)[..., k])


def sigma_partial(kappa, k, i):
    """Derivative of sigma_k with respect to kappa[i], i.e. sigma_{k-1}(kappa | i).

    ``i`` is a zero-based index into the last axis of ``kappa``.
    """
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside [1, {n}]")
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for n={n}")
    if k == 1:
        return _out(np.ones(kappa.shape[:-1]))
    rest = np.delete(kappa, i, axis=-1)
    return _out(elementary_symmetric(rest)[..., k - 1])


def newton_maclaurin_gap(kappa, k, l):
    """H_k H_l - H_{k-1} H_{l+1}, non-negative on the positive cone for k < l."""
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    if not 1 <= k < l <= n:
        raise DomainError(f"need 1 <= k < l <= n, got k={k}, l={l}, n={n}")
    hk = _normalized_all(kappa)
    return _out(hk[..., k] * hk[..., l] - hk[..., k - 1] * hk[..., l + 1])


def curvature_quotient(kappa):
    """F = n sigma_n / sigma_{n-1} (equals kappa_1 when kappa is umbilic)."""
    sig = elementary_symmetric(kappa)
    n = sig.shape[-1] - 1
    return _out(n * sig[..., n] / sig[..., n - 1])


def reg_inc_beta(s, a, b):
    """Regularized incomplete beta function I_s(a, b), via scipy.special.betainc.

    For s > 1/2 the reflection I_s(a, b) = 1 - I_{1-s}(b, a) is used, since
    1 - s is exact there and betainc loses digits close to s = 1.
    """
    if not (0.0 <= s <= 1.0) or not (a > 0) or not (b > 0):
        raise DomainError(f"reg_inc_beta needs 0<=s<=1, a>0, b>0; got {s}, {a}, {b}")
    if s > 0.5:
        return float(1.0 - special.betainc(b, a, 1.0 - s))
    return float(special.betainc(a, b, s))


def sphere_area(m):
    """Total measure of the unit m-sphere, 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    if m < 0 or int(m) != m:
        raise DomainError(f"sphere dimension must be a non-negative integer, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)
