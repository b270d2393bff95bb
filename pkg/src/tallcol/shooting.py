"""Backward shooting along the stable manifold of the critical point.

The run starts a small step ``delta`` off ``(1, 2, 1, 1)`` along the only
decaying eigenmode and integrates toward decreasing ``t`` until the base
condition holds. The base sits at ``t = t_stop`` and ``lam = 96 / beta``
there.

Clamped base: ``tau`` changes sign; the crossing is refined by Brent's
method on the dense output.

Hinged base: ``alpha**2 w -> 0`` is reached as ``alpha -> 0`` and
``w -> inf`` at a finite ``t``, so there is no sign change to bracket.
Once ``alpha`` falls below ``HINGE_SWITCH_ALPHA`` the run continues in
``sigma = (alpha**2 w)**(1/3)`` down to exactly ``sigma = 0``.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from ._tableau import EVENT, MAX_STEPS, REACHED_END, SINGULAR, STEP_UNDERFLOW, SYSTEM_AS, SYSTEM_SIGMA
from .dynamics import (
    SINGULAR_FLOOR,
    AsState,
    BoundaryKind,
    event_residual,
    from_sigma_state,
    initial_state,
    to_sigma_state,
)
from .linearize import stable_mode

__all__ = [
    "BoundaryKind",
    "ShootingOptions",
    "Solution",
    "ShootingError",
    "NoCrossing",
    "StepFailure",
    "integrate_backward",
    "lambda_sensitivity",
    "richardson_extrapolate",
]

log = logging.getLogger(__name__)

HINGE_SWITCH_ALPHA = 0.25

_STATUS_TEXT = {
    REACHED_END: "reached the end of the span",
    STEP_UNDERFLOW: "step size underflow",
    SINGULAR: "singular elimination (|alpha*w| below floor)",
    MAX_STEPS: "step budget exhausted",
}


class ShootingError(RuntimeError):
    pass


class NoCrossing(ShootingError):
    """The trajectory never met the base surface."""

    def __init__(self, message, t_last=None, reason=None):
        super().__init__(message)
        self.t_last = t_last
        self.reason = reason


class StepFailure(ShootingError):
    """The integrator could not meet its tolerance."""


@dataclass(frozen=True)
class ShootingOptions:
    delta: float = -1e-4
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_span: float = 10.0
    event_tol: float = 1e-12
    max_steps: int = 100_000
    floor: float = SINGULAR_FLOOR

    def __post_init__(self):
        if self.delta == 0 or not np.isfinite(self.delta):
            raise ValueError("delta must be finite and nonzero")
        for name in ("rel_tol", "abs_tol", "max_span", "event_tol", "floor"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


class _SigmaBranch:
    """Dense output of the hinged end segment, addressed by ``t``."""

    def __init__(self, dense):
        self.dense = dense
        self.sigma_lo, self.sigma_hi = dense.bounds

    def at_t(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo = np.full(t.shape, self.sigma_lo)
        hi = np.full(t.shape, self.sigma_hi)
        # t(sigma) is increasing; bisect to machine resolution
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = self.dense(mid)[:, 0] < t
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        sigma = 0.5 * (lo + hi)
        return from_sigma_state(sigma, self.dense(sigma).T)[1]


@dataclass
class Solution:
    bc: BoundaryKind
    lam: float
    t_stop: float
    t: np.ndarray  # ascending, t[0] == t_stop, t[-1] == 0
    states: np.ndarray  # (n, 4) rows of (tau, w, beta, alpha)
    options: ShootingOptions
    _dense: kernels.DenseOutput = field(repr=False, default=None)
    _branch: _SigmaBranch = field(repr=False, default=None)
    _t_switch: float = field(repr=False, default=None)

    @property
    def delta(self):
        return self.options.delta

    @property
    def trajectory(self):
        return [(float(t), AsState(*y)) for t, y in zip(self.t, self.states)]

    @property
    def base_state(self):
        return AsState(*self.states[0])

    def state(self, t):
        """Peeled state at arbitrary ``t`` in ``[t_stop, 0]`` (rows of tau, w, beta, alpha)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any((t < self.t_stop - 1e-12) | (t > 1e-12)):
            raise ValueError(f"t must lie in [{self.t_stop}, 0]")
        t = np.clip(t, self.t_stop, 0.0)
        out = np.empty(t.shape + (4,))
        if self._branch is None:
            out[...] = self._dense(t)
            return out
        upper = t >= self._t_switch
        if np.any(upper):
            out[upper] = self._dense(t[upper])
        if np.any(~upper):
            out[~upper] = self._branch.at_t(t[~upper])
        return out


def _first_phase(y0, opts, event_index, event_level):
    return kernels.integrate(
        SYSTEM_AS, 0.0, y0, -opts.max_span, opts.rel_tol, opts.abs_tol,
        max_steps=opts.max_steps, event_index=event_index, event_level=event_level, floor=opts.floor,
    )


def _no_crossing(bc, opts, xs, status):
    reason = _STATUS_TEXT.get(status, f"status {status}")
    hint = " (the positive-delta branch does not reach the base; try negating delta)" if opts.delta > 0 else ""
    return NoCrossing(
        f"{bc.value} base never reached from delta={opts.delta:g}: {reason} at t={xs[-1]:.6g}{hint}",
        t_last=float(xs[-1]),
        reason=reason,
    )


def _locate(dense, x_old, x_new, index, level, tol):
    g = lambda x: float(dense(x)[index]) - level  # noqa: E731
    g_new = g(x_new)
    if g_new == 0.0:
        return float(x_new)
    return float(brentq(g, x_new, x_old, xtol=tol, rtol=4 * np.finfo(float).eps))


def integrate_backward(bc=BoundaryKind.CLAMPED, opts=None):
    """Shoot from the tip toward the base and return the :class:`Solution`."""
    bc = BoundaryKind(bc)
    opts = opts or ShootingOptions()
    y0 = np.array(initial_state(opts.delta, stable_mode()))

    if bc is BoundaryKind.CLAMPED:
        xs, ys, ks, status = _first_phase(y0, opts, 0, 0.0)
        if status != EVENT:
            raise _no_crossing(bc, opts, xs, status)
        dense = kernels.DenseOutput(xs, ys, ks)
        t_stop = _locate(dense, xs[-2], xs[-1], 0, 0.0, opts.event_tol)
        base = dense(t_stop)
        t = np.concatenate([[t_stop], xs[-2::-1]])
        states = np.vstack([base, ys[-2::-1]])
        lam = float(96.0 / base[2])
        sol = Solution(bc, lam, t_stop, t, states, opts, _dense=dense)
    else:
        xs, ys, ks, status = _first_phase(y0, opts, 3, HINGE_SWITCH_ALPHA)
        if status != EVENT:
            raise _no_crossing(bc, opts, xs, status)
        dense = kernels.DenseOutput(xs, ys, ks)
        t_sw = _locate(dense, xs[-2], xs[-1], 3, HINGE_SWITCH_ALPHA, opts.event_tol)
        sigma_sw, z0 = to_sigma_state(t_sw, dense(t_sw))
        zs_x, zs_y, zs_k, status2 = kernels.integrate(
            SYSTEM_SIGMA, sigma_sw, z0, 0.0, opts.rel_tol, opts.abs_tol,
            max_steps=opts.max_steps, floor=opts.floor,
        )
        if status2 != REACHED_END:
            raise StepFailure(f"hinged end segment failed: {_STATUS_TEXT.get(status2, status2)} at sigma={zs_x[-1]:.3g}")
        t_end, end_states = from_sigma_state(zs_x, zs_y.T)
        t_stop = float(t_end[-1])
        upper_t = xs[-2::-1]
        upper_y = ys[-2::-1]
        t = np.concatenate([t_end[::-1], upper_t])
        states = np.vstack([end_states[::-1], upper_y])
        lam = float(96.0 / states[0, 2])
        sol = Solution(
            bc, lam, t_stop, t, states, opts,
            _dense=dense, _branch=_SigmaBranch(kernels.DenseOutput(zs_x, zs_y, zs_k)), _t_switch=t_sw,
        )

    if not sol.lam > 0:
        raise ShootingError(f"non-physical lambda {sol.lam}")
    if abs(event_residual(sol.base_state, bc)) >= opts.event_tol:
        raise StepFailure("base condition not met to event_tol")
    log.debug("%s: lam=%.10g t_stop=%.10g (%d samples)", bc.value, sol.lam, sol.t_stop, sol.t.size)
    return sol


def lambda_sensitivity(bc, deltas, opts=None):
    """Run :func:`integrate_backward` for each delta.

    Returns ``[(delta, lam_or_error), ...]``; a :class:`ShootingError` for
    a run is placed in the list instead of raising.
    """
    deltas = [float(d) for d in deltas]
    if any(d == 0 for d in deltas):
        raise ValueError("deltas must be nonzero")
    if len({np.sign(d) for d in deltas}) > 1:
        raise ValueError("deltas must share one sign (one branch of the manifold)")
    base = opts or ShootingOptions()
    out = []
    for d in deltas:
        run = ShootingOptions(**{**base.__dict__, "delta": d})
        try:
            out.append((d, integrate_backward(bc, run).lam))
        except ShootingError as exc:
            out.append((d, exc))
    return out


def richardson_extrapolate(deltas, values):
    """Estimate ``lim value`` as ``|delta| -> 0`` assuming ``value = L + c |delta|**p``.

    Uses the three smallest ``|delta|``; ``p`` is solved from their
    differences. Falls back to the value at the smallest ``|delta|`` when
    the differences do not behave like a power law.
    """
    pairs = sorted(zip(np.abs(np.asarray(deltas, dtype=float)), np.asarray(values, dtype=float)), reverse=True)
    if not pairs:
        raise ValueError("nothing to extrapolate")
    if len(pairs) < 3:
        return pairs[-1][1], None
    (d1, v1), (d2, v2), (d3, v3) = pairs[-3:]
    diff12, diff23 = v1 - v2, v2 - v3
    if diff12 == 0 or diff23 == 0 or np.sign(diff12) != np.sign(diff23):
        return v3, None
    ratio = diff23 / diff12

    def mismatch(p):
        return (d2**p - d3**p) / (d1**p - d2**p) - ratio

    try:
        p = brentq(mismatch, 0.05, 20.0)
    except ValueError:
        return v3, None
    c = diff23 / (d2**p - d3**p)
    return v3 - c * d3**p, p
