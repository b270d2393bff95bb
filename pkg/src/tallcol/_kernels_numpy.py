"""Pure numpy/scipy versions of the hot kernels.

Same contracts as ``_kernels_numba``. The integrator is the identical
Dormand-Prince scheme written with array operations; the eigen kernel
uses LAPACK's tridiagonal solver instead of inverse iteration, which
makes the two backends independent checks on each other.
"""
import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._tableau import (
    A, B, C, E, EVENT, MAX_STEPS, ORDER, REACHED_END, SINGULAR, STEP_UNDERFLOW, SYSTEM_AS,
)
from .dynamics import as_derivatives, sigma_derivatives

_EPS = np.finfo(np.float64).eps


def _rhs(system, x, y, floor):
    if system == SYSTEM_AS:
        if not abs(y[3] * y[1]) > floor:
            return None
        return np.array(as_derivatives(y[0], y[1], y[2], y[3]))
    if not abs(3.0 * x**3 - 6.0 * y[3] * y[1]) > floor or not y[2] > 0.0:
        return None
    return np.array(sigma_derivatives(x, y[1], y[2], y[3]))


def _rms(v, scale):
    return float(np.sqrt(np.mean((v / scale) ** 2)))


def _initial_step(system, x0, y0, f0, direction, span, rtol, atol, floor):
    scale = atol + np.abs(y0) * rtol
    d0, d1 = _rms(y0, scale), _rms(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = _rhs(system, x0 + direction * h0, y0 + direction * h0 * f0, floor)
    if f1 is None:
        return h0 * 1e-3
    d2 = _rms(f1 - f0, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / ORDER)
    return min(100.0 * h0, h1, span)


def integrate(system, x0, y0, x_end, rtol, atol, max_steps, event_index, event_level, floor):
    y = np.array(y0, dtype=float)
    n = y.size
    direction = 1.0 if x_end > x0 else -1.0
    xs, ys, ks = [x0], [y.copy()], []

    K = np.zeros((7, n))
    f0 = _rhs(system, x0, y, floor)
    if f0 is None:
        return np.array(xs), np.array(ys), np.empty((0, 7, n)), SINGULAR
    K[0] = f0

    h = direction * _initial_step(system, x0, y, K[0], direction, abs(x_end - x0), rtol, atol, floor)
    x = x0
    g_old = y[event_index] - event_level if event_index >= 0 else 0.0
    last_singular = False
    status = REACHED_END
    while True:
        if len(ks) >= max_steps:
            status = MAX_STEPS
            break
        if abs(h) < 10.0 * _EPS * max(abs(x), 1.0):
            status = SINGULAR if last_singular else STEP_UNDERFLOW
            break
        if direction * (x + h - x_end) > 0.0:
            h = x_end - x

        ok = True
        for i in range(1, 6):
            f = _rhs(system, x + C[i] * h, y + h * (A[i, :i] @ K[:i]), floor)
            if f is None:
                ok = False
                break
            K[i] = f
        if ok:
            ynew = y + h * (B @ K[:6])
            f = _rhs(system, x + h, ynew, floor)
            ok = f is not None
        if not ok:
            last_singular = True
            h *= 0.25
            continue
        K[6] = f
        last_singular = False

        err = h * (E @ K)
        if not (np.all(np.isfinite(ynew)) and np.all(np.isfinite(err))):
            h *= 0.25
            continue
        err_norm = _rms(err, atol + rtol * np.maximum(np.abs(y), np.abs(ynew)))
        if err_norm >= 1.0:
            h *= max(0.2, 0.9 * err_norm ** (-1.0 / ORDER))
            continue

        ks.append(K.copy())
        x += h
        y = ynew
        xs.append(x)
        ys.append(y.copy())
        K[0] = K[6]

        if event_index >= 0:
            g_new = y[event_index] - event_level
            if g_old != 0.0 and g_old * g_new <= 0.0:
                status = EVENT
                break
            g_old = g_new
        if x == x_end:
            break
        h *= 10.0 if err_norm == 0.0 else min(10.0, 0.9 * err_norm ** (-1.0 / ORDER))

    ks = np.array(ks) if ks else np.empty((0, 7, n))
    return np.array(xs), np.array(ys), ks, status


def lowest_eigenpair(diag, off, mass, shift, deflate, x0, tol, maxit):
    """Lowest (with ``deflate``: lowest non-constant) eigenpair of ``K x = lam M x``.

    ``shift``, ``x0``, ``tol`` and ``maxit`` are accepted for signature
    parity with the numba kernel and ignored.
    """
    r = 1.0 / np.sqrt(mass)
    vals, vecs = eigh_tridiagonal(diag * r * r, off * r[:-1] * r[1:], select="i", select_range=(0, 1))
    vecs = vecs * r[:, None]
    vecs /= np.sqrt((mass[:, None] * vecs**2).sum(axis=0))
    k = 0
    if deflate:
        overlap = np.abs((mass[:, None] * vecs).sum(axis=0))
        k = int(np.argmin(overlap))
    return float(vals[k]), vecs[:, k], 0
