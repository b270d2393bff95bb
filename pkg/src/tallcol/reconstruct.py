"""Physical column profiles from a shooting :class:`~tallcol.shooting.Solution`.

The base ``s = 1`` is the stopping point ``t_stop``, so arclength maps to
the solution's log-time as ``t = t_stop - ln s``. Below ``s = exp(t_stop)``
the trajectory has not been computed and the similarity solution is used.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .dynamics import BoundaryKind

__all__ = [
    "ColumnProfile",
    "MaterialSpec",
    "evaluate",
    "profile",
    "volume",
    "dimensional_design",
    "original_ode_residuals",
]


@dataclass
class ColumnProfile:
    bc: BoundaryKind
    lam: float
    s: np.ndarray
    a: np.ndarray
    b: np.ndarray
    theta: np.ndarray
    extended: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.bc = BoundaryKind(self.bc)
        self.lam = float(self.lam)
        self.s, self.a, self.b, self.theta = (np.asarray(x, dtype=float) for x in (self.s, self.a, self.b, self.theta))
        self.extended = np.asarray(self.extended, dtype=bool)
        n = self.s.size
        if any(x.shape != (n,) for x in (self.a, self.b, self.theta, self.extended)) or n < 2:
            raise ValueError("profile columns must be 1-d and of equal length >= 2")
        if not (self.s[0] > 0 and np.all(np.diff(self.s) > 0)):
            raise ValueError("s must be positive and strictly increasing")
        if abs(self.s[-1] - 1.0) > 1e-12:
            raise ValueError("the last sample must be the base s = 1")
        # a hinged optimum tapers to zero area at the base as well
        if np.any(self.a[:-1] <= 0) or self.a[-1] < 0 or np.any(self.b <= 0):
            raise ValueError("area and volume-above must be positive on (0, 1)")

    @property
    def s_min(self):
        return float(self.s[0])

    @property
    def any_extended(self):
        return bool(self.extended.any())

    def scaled(self, factor):
        """Copy with ``a`` and ``b`` multiplied by ``factor`` (``theta`` unchanged)."""
        return ColumnProfile(self.bc, self.lam, self.s, self.a * factor, self.b * factor, self.theta,
                             self.extended, dict(self.meta))


@dataclass(frozen=True)
class MaterialSpec:
    rho: float
    g: float
    E: float
    c: float
    V: float

    def __post_init__(self):
        for name in ("rho", "g", "E", "c", "V"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def evaluate(solution, s):
    """``(a, b, theta, extended)`` of the reconstructed column at arclengths ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any((s <= 0) | (s > 1.0 + 1e-12)):
        raise ValueError("s must lie in (0, 1]")
    s = np.minimum(s, 1.0)
    t = solution.t_stop - np.log(s)
    extended = t > 0.0
    peeled = np.ones((s.size, 4))
    if np.any(~extended):
        peeled[~extended] = solution.state(t[~extended])
    tau, beta, alpha = peeled[:, 0], peeled[:, 2], peeled[:, 3]
    lam = solution.lam
    return lam / 24.0 * s**3 * alpha, lam / 96.0 * s**4 * beta, tau / s**2, extended


def _hinged_base_samples(s_last, count):
    """``count`` arclengths in ``(s_last, 1)`` evenly spaced in ``(-ln s)**(1/3)``.

    At a hinged base the profile is smooth in that variable rather than in
    ``ln s`` (``alpha`` vanishes like ``(-ln s)**(2/3)``).
    """
    xi = np.linspace(0.0, np.cbrt(-np.log(s_last)), count + 2)[1:-1]
    return np.exp(-(xi**3))


def profile(solution, n_points=400, s_floor=1e-3, base_samples=None):
    """Sample the column at ``n_points`` geometrically spaced arclengths in ``[s_floor, 1]``.

    For a hinged solution ``base_samples`` extra points (default
    ``max(10, n_points // 40)``) are placed in the last geometric cell to
    resolve the tapering base; pass 0 to disable.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if not 0 < s_floor < 1:
        raise ValueError("s_floor must lie in (0, 1)")
    s = np.geomspace(s_floor, 1.0, n_points)
    s[-1] = 1.0
    if base_samples is None:
        base_samples = max(10, n_points // 40) if solution.bc is BoundaryKind.HINGED else 0
    if base_samples < 0:
        raise ValueError("base_samples must be non-negative")
    if base_samples:
        s = np.unique(np.concatenate([s, _hinged_base_samples(s[-2], base_samples)]))
    a, b, theta, extended = evaluate(solution, s)
    opts = solution.options
    meta = {
        "delta": opts.delta,
        "t_stop": solution.t_stop,
        "rel_tol": opts.rel_tol,
        "abs_tol": opts.abs_tol,
    }
    return ColumnProfile(solution.bc, solution.lam, s, a, b, theta, extended, meta)


def volume(prof):
    """``int_0^1 a ds``; below the first sample ``a`` is continued as ``c s**3``."""
    tail = prof.a[0] * prof.s[0] / 4.0
    return float(simpson(prof.a, x=prof.s) + tail)


def dimensional_design(prof, mat):
    """Height ``L`` and the physical area as a function of distance from the tip.

    Inverts ``lam = rho g L**3 / (V c E)``; lengths scale with ``L`` and
    areas with ``V / L``.
    """
    height = (prof.lam * mat.c * mat.E * mat.V / (mat.rho * mat.g)) ** (1.0 / 3.0)
    s_nodes = np.concatenate([[0.0], prof.s])
    a_nodes = np.concatenate([[0.0], prof.a])

    def area(sigma):
        return mat.V / height * np.interp(np.asarray(sigma, dtype=float) / height, s_nodes, a_nodes)

    return height, area


def original_ode_residuals(lam, a, a_s, b, b_s, theta, theta_s, theta_ss):
    """Residuals of ``(a**2 th_s)_s + lam b th``, ``2 (a th_s**2)_s + lam th**2`` and ``b_s - a``."""
    r_energy = 2.0 * a * a_s * theta_s + a * a * theta_ss + lam * b * theta
    r_max = 2.0 * (a_s * theta_s**2 + 2.0 * a * theta_s * theta_ss) + lam * theta**2
    return r_energy, r_max, b_s - a
