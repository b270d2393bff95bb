"""Linearization of the peeled system about its critical point (1, 1, 1).

Perturbations ``(dtau, dbeta, dalpha) * exp(q t)`` solve the quadratic
eigenvalue problem ``M(q) v = 0`` with ``M`` from :func:`stability_matrix`.
Its determinant factors by hand as ``-3 q (q - 1)(q**2 - q - 36)``.
"""
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EXPONENT_VECTOR",
    "Eigenmode",
    "stability_matrix",
    "characteristic_polynomial",
    "characteristic_roots",
    "eigenmode",
    "stable_mode",
]

# similarity powers of (theta, b, a), ordered like (dtau, dbeta, dalpha)
EXPONENT_VECTOR = np.array([-2.0, 4.0, 3.0])

_NULL_TOL = 1e-10


@dataclass(frozen=True)
class Eigenmode:
    q: float
    v: np.ndarray  # (dtau0, dbeta0, dalpha0)

    @property
    def residual(self):
        return float(np.max(np.abs(stability_matrix(self.q) @ self.v)))


def stability_matrix(q):
    return np.array(
        [
            [q * (q + 5.0), 0.0, q + 3.0],
            [q * (q - 1.0), 6.0, 4.0 * (q - 3.0)],
            [0.0, q - 4.0, 4.0],
        ]
    )


def characteristic_polynomial(q):
    return -3.0 * q * (q - 1.0) * (q * q - q - 36.0)


def characteristic_roots():
    """The four roots of ``det M(q)``, ascending: ``(1-sqrt145)/2, 0, 1, (1+sqrt145)/2``."""
    r = math.sqrt(145.0)
    roots = [(1.0 - r) / 2.0, 0.0, 1.0, (1.0 + r) / 2.0]
    for q in roots:
        m = stability_matrix(q)
        scale = np.max(np.abs(m)) ** 3
        if abs(np.linalg.det(m)) > 1e-12 * scale:
            raise ArithmeticError(f"claimed root q={q} does not annihilate det M(q)")
    return roots


def eigenmode(q):
    """Null vector of ``M(q)``, scaled so ``dalpha0 = 1`` (or ``dtau0 = 1`` if ``dalpha0 = 0``).

    Raises ValueError when ``M(q)`` is nonsingular.
    """
    q = float(q)
    m = stability_matrix(q)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] > _NULL_TOL * sv[0]:
        raise ValueError(f"M({q}) has full rank; q is not a characteristic root")

    if q * (q + 5.0) != 0.0 and q != 4.0:
        # rows 1 and 3 with dalpha0 = 1
        v = np.array([-(q + 3.0) / (q * (q + 5.0)), -4.0 / (q - 4.0), 1.0])
    else:
        v = np.linalg.svd(m)[2][-1]
        pivot = 2 if abs(v[2]) > _NULL_TOL else 0
        v = v / v[pivot]

    mode = Eigenmode(q=q, v=v)
    if mode.residual > _NULL_TOL:
        raise ValueError(f"q={q} is not a characteristic root (residual {mode.residual:.3g})")
    return mode


def stable_mode():
    negative = [q for q in characteristic_roots() if q < 0]
    if len(negative) != 1:
        raise RuntimeError("expected a one-dimensional stable manifold")
    return eigenmode(negative[0])
