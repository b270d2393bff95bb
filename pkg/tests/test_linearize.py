import math

import numpy as np
import pytest
import sympy as sp

from tallcol.linearize import (
    EXPONENT_VECTOR,
    characteristic_polynomial,
    characteristic_roots,
    eigenmode,
    stability_matrix,
    stable_mode,
)


def test_determinant_factorization_symbolic():
    q = sp.symbols("q")
    m = sp.Matrix([[q * (q + 5), 0, q + 3], [q * (q - 1), 6, 4 * (q - 3)], [0, q - 4, 4]])
    assert sp.expand(m.det() - (-3 * q * (q - 1) * (q**2 - q - 36))) == 0


@pytest.mark.parametrize("q", [-7.3, -1.0, 0.5, 2.0, 4.0, 9.1])
def test_polynomial_matches_numeric_det(q):
    assert characteristic_polynomial(q) == pytest.approx(np.linalg.det(stability_matrix(q)), rel=1e-10)


def test_roots():
    roots = characteristic_roots()
    np.testing.assert_allclose(roots, [-5.5208, 0.0, 1.0, 6.5208], atol=5e-5)
    assert roots[0] == pytest.approx((1 - math.sqrt(145)) / 2, abs=1e-15)


def test_stable_mode_vector():
    mode = stable_mode()
    assert mode.q == pytest.approx(-5.520797289396148, abs=1e-12)
    np.testing.assert_allclose(mode.v, [0.876733, 0.420133, 1.0], atol=1e-6)
    assert mode.residual < 1e-13


def test_unit_root_mode_is_the_exponent_vector():
    v = eigenmode(1.0).v
    cross = np.cross(v, EXPONENT_VECTOR)
    assert np.max(np.abs(cross)) / (np.linalg.norm(v) * np.linalg.norm(EXPONENT_VECTOR)) < 1e-10


def test_other_modes():
    for q in characteristic_roots():
        assert eigenmode(q).residual < 1e-10
    # q = 0: M(0) has a zero first column, so dtau is free
    v0 = eigenmode(0.0).v
    np.testing.assert_allclose(v0, [1.0, 0.0, 0.0], atol=1e-12)


def test_non_root_rejected():
    with pytest.raises(ValueError):
        eigenmode(2.0)


def test_unstable_mode_vector():
    q4 = characteristic_roots()[3]
    np.testing.assert_allclose(eigenmode(q4).v, [-0.126733, -1.5868, 1.0], atol=1e-4)
