"""Independent checks on a column shape.

The buckling load of a given shape is recomputed from the linear
Sturm-Liouville problem

    -(a**2 theta')' = lam * b * theta,    b(s) = int_0^s a

on a grid graded toward the tip, with zero flux ``a**2 theta' = 0`` at the
first node and ``theta(1) = 0`` (clamped) or zero flux (hinged) at the
base. The discretization is the symmetric three-point scheme with ``a**2``
at half nodes and a lumped mass ``int b`` over each control volume, giving
a tridiagonal pencil ``K theta = lam M theta``.

This path shares nothing with the shooting code except the shape data.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid, trapezoid
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import kernels
from .dynamics import BoundaryKind

__all__ = [
    "DiscreteShape",
    "graded_grid",
    "assemble",
    "sturm_liouville_eigenpair",
    "sturm_liouville_lambda",
    "zero_mode_eigenvalue",
    "stationarity_check",
    "bump_direction",
    "optimality_profile",
    "optimality_residual",
    "torque_residual",
]

DEFAULT_S_FLOOR = 1e-3


def graded_grid(n, s_floor=DEFAULT_S_FLOOR):
    """``n + 1`` nodes from ``s_floor`` to 1 with constant ratio."""
    grid = np.geomspace(s_floor, 1.0, n + 1)
    grid[-1] = 1.0
    return grid


@dataclass
class DiscreteShape:
    grid: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.a_values = np.asarray(self.a_values, dtype=float)
        self.b_values = np.asarray(self.b_values, dtype=float)
        g = self.grid
        if g.ndim != 1 or self.a_values.shape != g.shape or self.b_values.shape != g.shape:
            raise ValueError("grid, a_values and b_values must be 1-d and equally long")
        if g[0] < 0 or abs(g[-1] - 1.0) > 1e-12 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must increase strictly from >= 0 to 1")
        if np.any(self.a_values < 0) or np.any(self.a_values[1:-1] == 0):
            raise ValueError("area must be positive away from the ends")
        if np.any(np.diff(self.b_values) < 0) or self.b_values[0] < 0:
            raise ValueError("b must be non-negative and non-decreasing")
        if g[0] == 0 and self.b_values[0] != 0:
            raise ValueError("b(0) must be 0")

    @property
    def n(self):
        return self.grid.size - 1

    @classmethod
    def uniform(cls, n, grid=None):
        """``a = 1``, ``b = s`` on a uniform grid over ``[0, 1]`` unless one is given."""
        grid = np.linspace(0.0, 1.0, n + 1) if grid is None else np.asarray(grid, dtype=float)
        return cls(grid, np.ones_like(grid), grid.copy())

    @classmethod
    def from_profile(cls, prof, n=2000, s_floor=DEFAULT_S_FLOOR):
        """Resample a :class:`~tallcol.reconstruct.ColumnProfile` on a graded grid.

        The smooth peeled factors ``a / (lam s**3 / 24)`` and
        ``b / (lam s**4 / 96)`` are interpolated in ``ln s``; below the
        profile's first sample they are held at their first value.
        """
        grid = graded_grid(n, s_floor)
        lam = prof.lam
        x = np.log(prof.s)
        alpha = PchipInterpolator(x, prof.a / (lam / 24.0 * prof.s**3))
        beta = PchipInterpolator(x, prof.b / (lam / 96.0 * prof.s**4))
        xg = np.clip(np.log(grid), x[0], 0.0)
        a = lam / 24.0 * grid**3 * np.maximum(alpha(xg), 0.0)
        b = lam / 96.0 * grid**4 * beta(xg)
        return cls(grid, a, np.maximum.accumulate(b))

    def cumulative(self, values):
        """``int_{grid[0]}^s values`` by the trapezoid rule."""
        return cumulative_trapezoid(values, self.grid, initial=0.0)

    def perturbed(self, direction, eps):
        d = np.asarray(direction, dtype=float)
        return DiscreteShape(self.grid, self.a_values + eps * d, self.b_values + eps * self.cumulative(d))


def assemble(shape, bc):
    """Tridiagonal ``K`` (``diag``, ``off``) and diagonal ``M`` for the given base condition."""
    bc = BoundaryKind(bc)
    s, a, b = shape.grid, shape.a_values, shape.b_values
    h = np.diff(s)
    flux = (0.5 * (a[1:] + a[:-1])) ** 2 / h
    diag = np.zeros_like(s)
    diag[:-1] += flux
    diag[1:] += flux
    off = -flux
    # int b over [s_i - h/2, s_i + h/2] with b linear on each cell
    mass = np.zeros_like(s)
    mass[:-1] += h / 8.0 * (3.0 * b[:-1] + b[1:])
    mass[1:] += h / 8.0 * (3.0 * b[1:] + b[:-1])
    if bc is BoundaryKind.CLAMPED:
        diag, off, mass = diag[:-1], off[:-1], mass[:-1]
    if np.any(mass <= 0) or np.any(off == 0):
        raise ArithmeticError("discrete pencil is singular: zero mass or a decoupled node")
    return diag, off, mass


def sturm_liouville_eigenpair(shape, bc, nonzero=True):
    """Lowest eigenvalue and nodal eigenfunction (unit M-norm).

    For a hinged base the constant angle is an eigenfunction with
    eigenvalue 0; ``nonzero=True`` returns the next one.
    """
    bc = BoundaryKind(bc)
    if shape.n < 100:
        raise ValueError("need at least 100 cells")
    diag, off, mass = assemble(shape, bc)
    hinged = bc is BoundaryKind.HINGED
    deflate = hinged and nonzero
    if hinged:
        shift = -1.0
        x0 = shape.grid - 0.5 if deflate else np.ones_like(diag)
    else:
        shift = 0.0
        x0 = 1.0 - shape.grid[:-1] + 1e-3
    lam, vec, its = kernels.lowest_eigenpair(diag, off, mass, shift=shift, deflate=deflate, x0=x0)
    if its < 0:
        raise ArithmeticError(f"inverse iteration did not converge in {-its} sweeps")
    if bc is BoundaryKind.CLAMPED:
        vec = np.append(vec, 0.0)
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return float(lam), vec


def sturm_liouville_lambda(shape, bc):
    return sturm_liouville_eigenpair(shape, bc)[0]


def zero_mode_eigenvalue(shape):
    """Lowest hinged eigenvalue without removing the constant mode (should be ~0)."""
    return sturm_liouville_eigenpair(shape, BoundaryKind.HINGED, nonzero=False)[0]


def bump_direction(s):
    """``s**3 (1 - s)(s - 2/3)``: smooth, zero mean on ``[0, 1]``, zero at both ends.

    Vanishing at ``s = 1`` keeps a hinged optimum, whose base area is 0,
    admissible under either sign of the step.
    """
    s = np.asarray(s, dtype=float)
    return s**3 * (1.0 - s) * (s - 2.0 / 3.0)


def stationarity_check(shape, bc, direction, eps):
    """Central difference of ``lam`` along a volume-preserving change of area."""
    if eps == 0:
        raise ValueError("eps must be nonzero")
    d = np.asarray(direction(shape.grid) if callable(direction) else direction, dtype=float)
    if d.shape != shape.grid.shape:
        raise ValueError("direction must be sampled on the shape grid")
    mean = trapezoid(d, shape.grid)
    if abs(mean) > 1e-3 * trapezoid(np.abs(d), shape.grid):
        raise ValueError(f"direction must have zero integral, got {mean:.3g}")
    plus, minus = shape.perturbed(d, eps), shape.perturbed(d, -eps)
    for trial in (plus, minus):
        if np.any(trial.a_values[shape.a_values > 0] <= 0):
            raise ValueError("perturbed area is not positive; reduce eps")
    return (sturm_liouville_lambda(plus, bc) - sturm_liouville_lambda(minus, bc)) / (2.0 * eps)


def _theta_s(prof):
    """``theta_s`` from a cubic spline of the peeled angle ``tau = theta s**2``.

    ``tau`` is smooth in ``x = ln s`` at the tip and at a clamped base. At a
    hinged base it behaves like ``(-x)**(2/3)``, so there the spline is taken
    in ``xi = (-x)**(1/3)``, which is regular at both ends, with the base
    slope ``tau_xi = 0`` imposed. The base value is then infinite.
    """
    s = prof.s
    x = np.log(s)
    tau = prof.theta * s * s
    if prof.bc is BoundaryKind.CLAMPED:
        tau_x = CubicSpline(x, tau)(x, 1)
    else:
        xi = np.cbrt(-x)
        # tau_t ~ 1/xi and t_xi ~ xi**2, so tau_xi = 0 at the base
        tau_xi = CubicSpline(xi[::-1], tau[::-1], bc_type=((1, 0.0), "not-a-knot"))(xi, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            tau_x = np.where(xi > 0, tau_xi / (-3.0 * xi * xi), -np.inf)
    return (tau_x - 2.0 * tau) / s**3


def _running_integral(values, s):
    """``int_{s[0]}^s values`` by Simpson's rule in ``x = ln s``.

    Profile samples are evenly spaced in ``ln s``, where the power-law
    integrands near the tip are smooth and well resolved.
    """
    return cumulative_simpson(values * s, x=np.log(s), initial=0.0)


def _integral_to_base(values, s):
    """``int_s^1 values``, accumulated from the base so the tip values do not enter."""
    x = -np.log(s[::-1])
    return cumulative_simpson((values * s)[::-1], x=x, initial=0.0)[::-1]


def optimality_profile(prof):
    """``F(s) = 2 a theta_s**2 - lam int_s^1 theta**2`` and the constant it should equal."""
    s, th = prof.s, prof.theta
    upper = _integral_to_base(th**2, s)
    f = 2.0 * prof.a * _theta_s(prof) ** 2 - prof.lam * upper
    # theta**2 b tends to a constant at the tip
    weight = _running_integral(th**2 * prof.b, s)[-1] + (th[0] ** 2 * prof.b[0]) * s[0]
    return f, prof.lam * weight


def optimality_residual(prof, s_range=(0.2, 1.0)):
    """``max |F(s) - C| / |C|`` over ``s_range``."""
    f, c = optimality_profile(prof)
    # a theta_s**2 is 0 * inf at a hinged base; its finite limit is not sampled
    mask = (prof.s >= s_range[0]) & (prof.s <= s_range[1]) & np.isfinite(f)
    return float(np.max(np.abs(f[mask] - c)) / abs(c))


def torque_residual(prof, s_range=(0.05, 1.0)):
    """Mismatch between ``a**2 theta_s`` and ``-lam int_0^s theta b``, relative to the larger side.

    Integrating ``(a**2 theta_s)_s + lam b theta = 0`` from the free tip.
    """
    s = prof.s
    tb = prof.theta * prof.b
    load = _running_integral(tb, s) + tb[0] * s[0] / 3.0
    with np.errstate(invalid="ignore"):
        lhs = prof.a**2 * _theta_s(prof)
    # at a hinged base a**2 theta_s vanishes: the zero-torque condition
    if prof.bc is BoundaryKind.HINGED and not np.isfinite(lhs[-1]):
        lhs[-1] = 0.0
    rhs = -prof.lam * load
    mask = (s >= s_range[0]) & (s <= s_range[1])
    scale = max(np.max(np.abs(lhs[mask])), np.max(np.abs(rhs[mask])))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(lhs[mask] - rhs[mask])) / scale)
