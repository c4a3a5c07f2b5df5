"""Compiled pointwise geometry of a graph state and the explicit RK2 driver.

In the meridian half-plane write the half-space point as the complex number
w = y_1 + i y_{n+1} = i exp(u - i beta) and the ball point as
xi = s + i z = g(w) = i (w - i) / (w + i), s the distance to the axis and
z = <x, e>. Derivatives along beta then follow from the chain rule, with only
u_beta and u_betabeta taken by finite differences.

Derivatives of u use fourth-order central stencils on a padded array. At
the axis u is even, so the two ghost values mirror u[1] and u[2]. At the rim
u_beta is pinned to slope_end = -cot(theta); the two ghost values there come
from the quintic through u[m-4..m] with that end slope. Fourth order matters
here: the cap family is only approximately steady for the discrete system, and
the slow drift along it scales like the truncation error.
"""

import numpy as np
from numba import njit

RUNNING = 0
CONVERGED = 1
T_MAX = 2
CONVEXITY_LOSS = 3
BLOW_UP = 4

MAX_HALVINGS = 10
# RK2 is stable for real eigenvalues in [-2, 0] and the fourth-order second
# difference has spectral radius 16 / (3 h^2), hence 2 * 3 / 16.
DT_FACTOR = 0.375


@njit(cache=True)
def _padded(u, sh):
    """u with two ghost values at each end; sh is the rim slope times h."""
    m = u.size - 1
    ue = np.empty(m + 5)
    ue[2:m + 3] = u
    ue[1] = u[1]
    ue[0] = u[2]
    u0, u1, u2, u3, u4 = u[m], u[m - 1], u[m - 2], u[m - 3], u[m - 4]
    ue[m + 3] = 5.0 * sh - 65.0 / 12.0 * u0 + 10.0 * u1 - 5.0 * u2 + 5.0 / 3.0 * u3 - 0.25 * u4
    ue[m + 4] = 30.0 * sh - 47.5 * u0 + 80.0 * u1 - 45.0 * u2 + 16.0 * u3 - 2.5 * u4
    return ue


@njit(cache=True)
def fields(u, n, cos_t, slope_end, h):
    """Per-node geometry. Returns a tuple of arrays, see surface.reconstruct."""
    m = u.size - 1
    N = m + 1
    s = np.empty(N)
    z = np.empty(N)
    nus = np.empty(N)
    nuz = np.empty(N)
    ts = np.empty(N)
    tz = np.empty(N)
    speed = np.empty(N)
    km = np.empty(N)
    kr = np.empty(N)
    ub = np.empty(N)
    ubb = np.empty(N)
    dkm = np.empty(N)
    ue = _padded(u, slope_end * h)
    for i in range(N):
        beta = i * h
        j = i + 2
        b2 = (-ue[j + 2] + 16.0 * ue[j + 1] - 30.0 * ue[j] + 16.0 * ue[j - 1] - ue[j - 2]) / (12.0 * h * h)
        if i == m:
            b1 = slope_end
        else:
            b1 = (-ue[j + 2] + 8.0 * ue[j + 1] - 8.0 * ue[j - 1] + ue[j - 2]) / (12.0 * h)
        ub[i] = b1
        ubb[i] = b2
        rho = np.exp(u[i])
        w = 1j * rho * (np.cos(beta) - 1j * np.sin(beta))
        wb = (b1 - 1j) * w
        wbb = (b2 + (b1 - 1j) * (b1 - 1j)) * w
        q = w + 1j
        g = 1j * (w - 1j) / q
        g1 = -2.0 / (q * q)
        g2 = 4.0 / (q * q * q)
        xb = g1 * wb
        xbb = g2 * wb * wb + g1 * wbb
        L = abs(xb)
        t = xb / L
        nu = -1j * t
        s[i] = g.real if i > 0 else 0.0
        z[i] = g.imag
        ts[i] = t.real
        tz[i] = t.imag
        nus[i] = nu.real if i > 0 else 0.0
        nuz[i] = nu.imag
        speed[i] = L
        km[i] = -(xbb.real * nu.real + xbb.imag * nu.imag) / (L * L)
        gw = g1 * w
        dkm[i] = -(gw.real * nu.real + gw.imag * nu.imag) / (L * L)
        if i > 0:
            kr[i] = nu.real / g.real
        else:
            kr[i] = km[i]
    return s, z, nus, nuz, ts, tz, speed, km, kr, ub, ubb, dkm


@njit(cache=True)
def rhs(u, n, cos_t, slope_end, h):
    """du/dt = -v f / (rho e^w), the speed f, the u_bb coefficient, and a validity flag."""
    s, z, nus, nuz, ts, tz, speed, km, kr, ub, ubb, dkm = fields(u, n, cos_t, slope_end, h)
    N = u.size
    dudt = np.empty(N)
    f = np.empty(N)
    diff = np.empty(N)
    ok = True
    for i in range(N):
        a = km[i]
        b = kr[i]
        den = b + (n - 1) * a
        F = n * a * b / den
        xcn = z[i] + cos_t * nuz[i]
        xnu = s[i] * nus[i] + z[i] * nuz[i]
        xenu = z[i] * xnu - 0.5 * (s[i] * s[i] + z[i] * z[i] + 1.0) * nuz[i]
        ew = 0.5 * (s[i] * s[i] + (z[i] - 1.0) ** 2)
        v = np.sqrt(1.0 + ub[i] * ub[i])
        fac = v / (np.exp(u[i]) * ew)
        fi = xcn / F - xenu
        f[i] = fi
        # raising u moves the point towards e, against X_e
        dudt[i] = -fac * fi
        dF = n * b * b / (den * den)
        if i == 0:
            # on the axis kappa_r is kappa_m, so u_bb enters through both
            dF += n * (n - 1) * a * a / (den * den)
        diff[i] = fac * xcn / (F * F) * dF * dkm[i]
        if not (a > 0.0 and b > 0.0 and np.isfinite(dudt[i]) and np.isfinite(diff[i])):
            ok = False
        if i > 0 and i < N - 1 and not (s[i] > 0.0):
            ok = False
    return dudt, f, diff, ok


@njit(cache=True)
def _all_finite(a):
    for x in a:
        if not np.isfinite(x):
            return False
    return True


@njit(cache=True)
def advance(u, n, cos_t, slope_end, h, cfl, max_steps, t, t_max, tol):
    """Take up to max_steps adaptive RK2 (midpoint) steps.

    The step is cfl * DT_FACTOR * h^2 / max a with a the coefficient of u_bb, halved on
    loss of convexity or non-finite values, at most MAX_HALVINGS times in a row.
    Returns (u, t, steps, status, max|f|, dt_last, halvings_total).
    """
    u = u.copy()
    dudt, f, diff, ok = rhs(u, n, cos_t, slope_end, h)
    maxf = np.max(np.abs(f))
    if not ok:
        status = BLOW_UP if not (_all_finite(dudt)) else CONVEXITY_LOSS
        return u, t, 0, status, maxf, 0.0, 0
    steps = 0
    status = RUNNING
    dt = 0.0
    total_halvings = 0
    unew = u.copy()
    k3 = dudt
    f3 = f
    d3 = diff
    while steps < max_steps:
        maxf = np.max(np.abs(f))
        if maxf < tol:
            status = CONVERGED
            break
        if t >= t_max:
            status = T_MAX
            break
        dt = cfl * DT_FACTOR * h * h / np.max(diff)
        if dt > t_max - t:
            dt = t_max - t
        halvings = 0
        accepted = False
        finite = True
        while not accepted:
            umid = u + 0.5 * dt * dudt
            k2, f2, d2, ok2 = rhs(umid, n, cos_t, slope_end, h)
            finite = _all_finite(k2)
            if ok2:
                unew = u + dt * k2
                k3, f3, d3, ok3 = rhs(unew, n, cos_t, slope_end, h)
                finite = _all_finite(unew) and _all_finite(k3)
                if ok3:
                    accepted = True
                    break
            halvings += 1
            total_halvings += 1
            if halvings > MAX_HALVINGS:
                break
            dt *= 0.5
        if not accepted:
            status = CONVEXITY_LOSS if finite else BLOW_UP
            break
        u = unew
        dudt = k3
        f = f3
        diff = d3
        t += dt
        steps += 1
    maxf = np.max(np.abs(f))
    if status == RUNNING and maxf < tol:
        status = CONVERGED
    return u, t, steps, status, maxf, dt, total_halvings
