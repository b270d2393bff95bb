"""Loop kernels compiled with numba."""
import numpy as np

from ._backend import njit
from ._tableau import (
    A, B, C, E, EVENT, MAX_STEPS, ORDER, REACHED_END, SINGULAR, STEP_UNDERFLOW, SYSTEM_AS,
)
from .dynamics import as_derivatives, sigma_derivatives

_EPS = np.finfo(np.float64).eps


@njit
def _rhs(system, x, y, out, floor):
    if system == SYSTEM_AS:
        if not abs(y[3] * y[1]) > floor:
            return False
        d0, d1, d2, d3 = as_derivatives(y[0], y[1], y[2], y[3])
    else:
        if not abs(3.0 * x**3 - 6.0 * y[3] * y[1]) > floor or not y[2] > 0.0:
            return False
        d0, d1, d2, d3 = sigma_derivatives(x, y[1], y[2], y[3])
    out[0] = d0
    out[1] = d1
    out[2] = d2
    out[3] = d3
    return True


@njit
def _rms(v, scale):
    acc = 0.0
    for i in range(v.size):
        r = v[i] / scale[i]
        acc += r * r
    return np.sqrt(acc / v.size)


@njit
def _initial_step(system, x0, y0, f0, direction, span, rtol, atol, floor):
    n = y0.size
    scale = atol + np.abs(y0) * rtol
    d0 = _rms(y0, scale)
    d1 = _rms(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = np.empty(n)
    if not _rhs(system, x0 + direction * h0, y1, f1, floor):
        return h0 * 1e-3
    d2 = _rms(f1 - f0, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / ORDER)
    return min(100.0 * h0, h1, span)


@njit
def integrate(system, x0, y0, x_end, rtol, atol, max_steps, event_index, event_level, floor):
    n = y0.size
    direction = 1.0 if x_end > x0 else -1.0
    span = abs(x_end - x0)

    cap = 256
    xs = np.empty(cap)
    ys = np.empty((cap, n))
    ks = np.empty((cap, 7, n))
    xs[0] = x0
    ys[0, :] = y0

    K = np.zeros((7, n))
    if not _rhs(system, x0, y0, K[0], floor):
        return xs[:1].copy(), ys[:1].copy(), ks[:0].copy(), SINGULAR

    h = direction * _initial_step(system, x0, y0, K[0], direction, span, rtol, atol, floor)
    x = x0
    y = y0.copy()
    ytmp = np.empty(n)
    ynew = np.empty(n)
    err = np.empty(n)
    scale = np.empty(n)
    g_old = y[event_index] - event_level if event_index >= 0 else 0.0

    count = 0
    last_singular = False
    status = REACHED_END
    while True:
        if count >= max_steps:
            status = MAX_STEPS
            break
        h_min = 10.0 * _EPS * max(abs(x), 1.0)
        if abs(h) < h_min:
            status = SINGULAR if last_singular else STEP_UNDERFLOW
            break
        if direction * (x + h - x_end) > 0.0:
            h = x_end - x

        ok = True
        for i in range(1, 6):
            for m in range(n):
                acc = 0.0
                for j in range(i):
                    acc += A[i, j] * K[j, m]
                ytmp[m] = y[m] + h * acc
            if not _rhs(system, x + C[i] * h, ytmp, K[i], floor):
                ok = False
                break
        if ok:
            for m in range(n):
                acc = 0.0
                for j in range(6):
                    acc += B[j] * K[j, m]
                ynew[m] = y[m] + h * acc
            ok = _rhs(system, x + h, ynew, K[6], floor)
        if not ok:
            last_singular = True
            h *= 0.25
            continue

        finite = True
        for m in range(n):
            acc = 0.0
            for j in range(7):
                acc += E[j] * K[j, m]
            err[m] = h * acc
            scale[m] = atol + rtol * max(abs(y[m]), abs(ynew[m]))
            if not (np.isfinite(ynew[m]) and np.isfinite(err[m])):
                finite = False
        if not finite:
            last_singular = False
            h *= 0.25
            continue

        err_norm = _rms(err, scale)
        if err_norm >= 1.0:
            last_singular = False
            h *= max(0.2, 0.9 * err_norm ** (-1.0 / ORDER))
            continue

        if count + 2 > cap:
            cap *= 2
            xs2 = np.empty(cap)
            ys2 = np.empty((cap, n))
            ks2 = np.empty((cap, 7, n))
            xs2[: count + 1] = xs[: count + 1]
            ys2[: count + 1] = ys[: count + 1]
            ks2[:count] = ks[:count]
            xs, ys, ks = xs2, ys2, ks2
        ks[count] = K
        x = x + h
        y[:] = ynew
        count += 1
        xs[count] = x
        ys[count] = y
        K[0] = K[6]
        last_singular = False

        if event_index >= 0:
            g_new = y[event_index] - event_level
            if g_old != 0.0 and g_old * g_new <= 0.0:
                status = EVENT
                break
            g_old = g_new
        if x == x_end:
            status = REACHED_END
            break

        factor = 10.0 if err_norm == 0.0 else min(10.0, 0.9 * err_norm ** (-1.0 / ORDER))
        h *= factor

    return xs[: count + 1].copy(), ys[: count + 1].copy(), ks[:count].copy(), status


@njit
def _tridiag_solve(off, diag, rhs):
    """Thomas algorithm for a symmetric tridiagonal matrix."""
    n = diag.size
    c = np.empty(n)
    d = np.empty(n)
    denom = diag[0]
    c[0] = off[0] / denom if n > 1 else 0.0
    d[0] = rhs[0] / denom
    for i in range(1, n):
        denom = diag[i] - off[i - 1] * c[i - 1]
        if i < n - 1:
            c[i] = off[i] / denom
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom
    x = np.empty(n)
    x[n - 1] = d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


@njit
def _tridiag_matvec(off, diag, x):
    n = diag.size
    y = diag * x
    for i in range(n - 1):
        y[i] += off[i] * x[i + 1]
        y[i + 1] += off[i] * x[i]
    return y


@njit
def lowest_eigenpair(diag, off, mass, shift, deflate, x0, tol, maxit):
    """Inverse iteration on ``K x = lam M x`` (K tridiagonal, M diagonal).

    With ``deflate`` the constant vector is projected out M-orthogonally
    after every solve. Returns ``(lam, x, iterations)``; iterations is
    negative when ``maxit`` was hit first.
    """
    shifted = diag - shift * mass
    msum = mass.sum()
    x = x0.copy()
    lam_old = np.inf
    lam = np.inf
    for it in range(maxit):
        y = _tridiag_solve(off, shifted, mass * x)
        if deflate:
            y -= (mass * y).sum() / msum
        y /= np.sqrt((mass * y * y).sum())
        lam = (y * _tridiag_matvec(off, diag, y)).sum()
        x = y
        if abs(lam - lam_old) <= tol * abs(lam):
            return lam, x, it + 1
        lam_old = lam
    return lam, x, -maxit
