"""Explicit form of the peeled autonomous system.

State is ``(tau, w, beta, alpha)`` with ``w = tau_t + 2 tau`` and log-time
``t = -ln s``. The implicit equations

    (3 - D)(alpha**2 w) - 6 beta tau = 0
    (3 + D)(alpha w**2) - 12 tau**2 = 0
    (4 - D) beta - 4 alpha = 0

are made explicit through ``u = alpha**2 w`` and ``v = alpha w**2``:
``u_t = 3u - 6 beta tau`` and ``v_t = -3v + 12 tau**2`` form a linear
2x2 system for ``(alpha_t, w_t)`` with determinant ``3 alpha**2 w**2``.

Near the hinged base ``alpha -> 0`` and ``w -> inf`` while ``u -> 0`` at a
finite ``t``. There the system is integrated in ``sigma = u**(1/3)``
instead, with state ``(t, tau, v, beta)``; see :func:`sigma_derivatives`.
"""
from enum import Enum
from typing import NamedTuple

import numpy as np

from ._backend import njit

__all__ = [
    "BoundaryKind",
    "AsState",
    "CRITICAL_POINT",
    "SingularEliminationError",
    "rhs",
    "implicit_residuals",
    "event_residual",
    "initial_state",
    "as_derivatives",
    "sigma_derivatives",
    "to_sigma_state",
    "from_sigma_state",
]

SINGULAR_FLOOR = 1e-12


class BoundaryKind(str, Enum):
    CLAMPED = "clamped"
    HINGED = "hinged"


class AsState(NamedTuple):
    tau: float
    w: float
    beta: float
    alpha: float


CRITICAL_POINT = AsState(1.0, 2.0, 1.0, 1.0)


class SingularEliminationError(ArithmeticError):
    pass


@njit
def as_derivatives(tau, w, beta, alpha):
    aw = alpha * w
    d_tau = w - 2.0 * tau
    d_w = -3.0 * w + 8.0 * tau * tau / aw + 2.0 * beta * tau / (alpha * alpha)
    d_beta = 4.0 * beta - 4.0 * alpha
    d_alpha = 3.0 * alpha - 4.0 * beta * tau / aw - 4.0 * tau * tau / (w * w)
    return d_tau, d_w, d_beta, d_alpha


@njit
def sigma_derivatives(sigma, tau, v, beta):
    """d/dsigma of ``(t, tau, v, beta)``; regular at ``sigma = 0`` while ``beta tau != 0``."""
    g = 3.0 * sigma**3 - 6.0 * beta * tau  # du/dt
    c = np.cbrt(v)
    dsig_u = 3.0 * sigma * sigma / g
    d_t = dsig_u
    d_tau = (3.0 * sigma * c * c - 6.0 * sigma * sigma * tau) / g
    d_v = dsig_u * (-3.0 * v + 12.0 * tau * tau)
    d_beta = dsig_u * (4.0 * beta - 4.0 * sigma * sigma / c)
    return d_t, d_tau, d_v, d_beta


def rhs(state, floor=SINGULAR_FLOOR):
    """Return ``d/dt`` of ``(tau, w, beta, alpha)`` as an :class:`AsState`."""
    tau, w, beta, alpha = (float(x) for x in state)
    if not abs(alpha * w) > floor:
        raise SingularEliminationError(f"|alpha*w| = {abs(alpha * w):.3g} is below the floor {floor:g}")
    return AsState(*as_derivatives(tau, w, beta, alpha))


def implicit_residuals(state, deriv):
    """Residuals of the three implicit equations plus ``tau_t - (w - 2 tau)``."""
    tau, w, beta, alpha = state
    tau_t, w_t, beta_t, alpha_t = deriv
    u = alpha * alpha * w
    u_t = 2.0 * alpha * alpha_t * w + alpha * alpha * w_t
    v = alpha * w * w
    v_t = alpha_t * w * w + 2.0 * alpha * w * w_t
    return np.array(
        [
            3.0 * u - u_t - 6.0 * beta * tau,
            3.0 * v + v_t - 12.0 * tau * tau,
            4.0 * beta - beta_t - 4.0 * alpha,
            tau_t - (w - 2.0 * tau),
        ]
    )


def event_residual(state, bc):
    """``tau`` for a clamped base, the peeled torque ``alpha**2 w`` for a hinged one."""
    bc = BoundaryKind(bc)
    if bc is BoundaryKind.CLAMPED:
        return float(state[0])
    alpha, w = float(state[3]), float(state[1])
    if alpha == 0.0:
        # hinged base itself: u = alpha**2 w = sigma**3 = 0 while w is infinite
        return 0.0
    return alpha * alpha * w


def initial_state(delta, mode):
    """Offset ``delta`` from the critical point along ``mode``."""
    if delta == 0:
        raise ValueError("delta must be nonzero; the critical point is an equilibrium")
    dtau, dbeta, dalpha = (float(x) for x in mode.v)
    return AsState(
        1.0 + delta * dtau,
        2.0 + delta * (mode.q + 2.0) * dtau,
        1.0 + delta * dbeta,
        1.0 + delta * dalpha,
    )


def to_sigma_state(t, state):
    """Map ``(t, AsState)`` to ``(sigma, [t, tau, v, beta])``."""
    tau, w, beta, alpha = state
    return float(np.cbrt(alpha * alpha * w)), np.array([t, tau, alpha * w * w, beta])


def from_sigma_state(sigma, y):
    """Inverse of :func:`to_sigma_state`; gives ``alpha = 0, w = inf`` at ``sigma = 0``."""
    sigma = np.asarray(sigma, dtype=float)
    t, tau, v, beta = (np.asarray(c, dtype=float) for c in y)
    c = np.cbrt(v)
    alpha = sigma * sigma / c
    with np.errstate(divide="ignore"):
        w = np.where(sigma == 0.0, np.inf, c * c / np.where(sigma == 0.0, 1.0, sigma))
    return t, np.stack([tau, w, beta, alpha], axis=-1)
