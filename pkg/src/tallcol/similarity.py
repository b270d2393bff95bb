"""Power-law tip solution of the column equations.

Near the tip the optimal column behaves like ``a ~ s**3``, ``b ~ s**4`` and
``theta ~ s**p``. Substituting that ansatz into the three ODEs

    (a**2 theta_s)_s + lam * b * theta = 0
    2 (a theta_s**2)_s + lam * theta**2 = 0
    b_s - a = 0

gives ``b0 = a0 / 4`` and two expressions for ``gamma = lam / (4 a0)``:
``p (p + 5) = -gamma`` and ``p**2 (2p + 1) / 2 = -gamma``.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SimilarityExponents",
    "exponent_roots",
    "gamma_of",
    "admissible_exponent",
    "similarity_profile",
    "similarity_derivatives",
]


@dataclass(frozen=True)
class SimilarityExponents:
    p: Fraction
    gamma: Fraction
    a0_over_lambda: Fraction
    b0_over_lambda: Fraction

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.b0_over_lambda * 4 != self.a0_over_lambda:
            raise ValueError("b0 must equal a0 / 4")
        if self.p * (self.p + 5) != -self.gamma or self.p**2 * (2 * self.p + 1) / 2 != -self.gamma:
            raise ValueError("p and gamma do not satisfy both balance relations")


def exponent_roots():
    """Exact roots of ``2p(p+5) = p**2 (2p+1)``, ascending.

    The cubic factors as ``p (2p**2 - p - 10) = p (p + 2)(2p - 5)``.
    """
    return (Fraction(-2), Fraction(0), Fraction(5, 2))


def gamma_of(p):
    p = Fraction(p)
    return -p * (p + 5)


def admissible_exponent():
    """The only root with ``gamma > 0``: p = -2, gamma = 6, a0 = lam/24."""
    candidates = [p for p in exponent_roots() if gamma_of(p) > 0]
    if len(candidates) != 1:
        raise RuntimeError(f"expected one admissible exponent, found {candidates}")
    p = candidates[0]
    gamma = gamma_of(p)
    a0 = 1 / (4 * gamma)
    return SimilarityExponents(p=p, gamma=gamma, a0_over_lambda=a0, b0_over_lambda=a0 / 4)


def _check(lam, s):
    s = np.asarray(s, dtype=float)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if np.any(~(s > 0)):
        raise ValueError("s must be strictly positive (s = 0 is the singular tip)")
    return s


def similarity_profile(lam, s):
    """Return ``(a, b, theta)`` of the similarity solution at arclength ``s``."""
    s = _check(lam, s)
    return lam / 24.0 * s**3, lam / 96.0 * s**4, s**-2.0


def similarity_derivatives(lam, s):
    """Exact first derivatives ``(a_s, b_s, theta_s)`` and ``theta_ss``."""
    s = _check(lam, s)
    return lam / 8.0 * s**2, lam / 24.0 * s**3, -2.0 * s**-3.0, 6.0 * s**-4.0
