"""Backend dispatch for the hot loops, plus dense output evaluation.

``numba`` is the default when importable and not disabled through
``TALLCOL_DISABLE_NUMBA``; ``numpy`` is always available.
"""
from contextlib import contextmanager

import numpy as np

from . import _backend, _kernels_numpy
from ._tableau import P

__all__ = ["available", "active", "select", "use", "integrate", "lowest_eigenpair", "DenseOutput"]

_BACKENDS = {"numpy": _kernels_numpy}
if _backend.HAVE_NUMBA:
    from . import _kernels_numba

    _BACKENDS["numba"] = _kernels_numba

_active = "numba" if "numba" in _BACKENDS else "numpy"


def available():
    return sorted(_BACKENDS)


def active():
    return _active


def select(name):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; choose from {available()}")
    _active = name


@contextmanager
def use(name):
    previous = _active
    select(name)
    try:
        yield
    finally:
        select(previous)


def integrate(system, x0, y0, x_end, rtol, atol, max_steps=100_000, event_index=-1, event_level=0.0, floor=1e-12):
    """Adaptive Dormand-Prince integration from ``x0`` toward ``x_end``.

    Stops after the first accepted step across which ``y[event_index] -
    event_level`` changes sign. Returns ``(xs, ys, ks, status)`` with the
    stage derivatives ``ks`` of every accepted step for dense output.
    """
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    return _BACKENDS[_active].integrate(
        int(system), float(x0), y0, float(x_end), float(rtol), float(atol),
        int(max_steps), int(event_index), float(event_level), float(floor),
    )


def lowest_eigenpair(diag, off, mass, shift=0.0, deflate=False, x0=None, tol=1e-13, maxit=2000):
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    if x0 is None:
        x0 = np.linspace(1.0, 0.0, diag.size, endpoint=False)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    return _BACKENDS[_active].lowest_eigenpair(diag, off, mass, float(shift), bool(deflate), x0, float(tol), int(maxit))


class DenseOutput:
    """Continuous extension over the accepted steps of :func:`integrate`."""

    def __init__(self, xs, ys, ks):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.ks = np.asarray(ks, dtype=float)
        if self.ks.shape[0] != self.xs.size - 1:
            raise ValueError("need one stage block per step")
        self._increasing = self.xs[-1] >= self.xs[0]

    @property
    def bounds(self):
        return min(self.xs[0], self.xs[-1]), max(self.xs[0], self.xs[-1])

    def _locate(self, x):
        lo, hi = self.bounds
        if np.any((x < lo - 1e-12 * max(1.0, abs(lo))) | (x > hi + 1e-12 * max(1.0, abs(hi)))):
            raise ValueError(f"dense output requested outside [{lo}, {hi}]")
        if self._increasing:
            i = np.searchsorted(self.xs, x, side="right") - 1
        else:
            i = self.xs.size - 1 - np.searchsorted(self.xs[::-1], x, side="left")
        i = np.clip(i, 0, self.xs.size - 2)
        h = self.xs[i + 1] - self.xs[i]
        return i, h, (x - self.xs[i]) / h

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        i, h, th = self._locate(x.ravel())
        powers = th[:, None] ** np.arange(1, 5)  # (m, 4)
        q = powers @ P.T  # (m, 7)
        y = self.ys[i] + h[:, None] * np.einsum("mj,mjn->mn", q, self.ks[i])
        return y.reshape(x.shape + (self.ys.shape[1],))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        i, h, th = self._locate(x.ravel())
        dpowers = np.arange(1, 5) * th[:, None] ** np.arange(0, 4)
        q = dpowers @ P.T
        dy = np.einsum("mj,mjn->mn", q, self.ks[i])
        return dy.reshape(x.shape + (self.ys.shape[1],))
