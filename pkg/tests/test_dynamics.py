import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tallcol.dynamics import (
    CRITICAL_POINT,
    AsState,
    SingularEliminationError,
    event_residual,
    from_sigma_state,
    implicit_residuals,
    initial_state,
    rhs,
    sigma_derivatives,
    to_sigma_state,
)
from tallcol.linearize import characteristic_roots, stable_mode


def test_critical_point_is_equilibrium():
    assert np.max(np.abs(rhs(CRITICAL_POINT))) < 1e-14


def test_worked_value():
    assert rhs((1.0, 2.0, 2.0, 1.0)) == pytest.approx(AsState(0.0, 2.0, 4.0, -2.0), abs=1e-14)


def test_singular_elimination():
    with pytest.raises(SingularEliminationError):
        rhs((1.0, 2.0, 1.0, 0.0))
    with pytest.raises(SingularEliminationError):
        rhs((1.0, 1e-14, 1.0, 1.0))


finite = st.floats(0.2, 5.0)


@settings(max_examples=200, deadline=None)
@given(tau=st.floats(-3.0, 3.0), w=finite, beta=finite, alpha=finite, sign=st.sampled_from([-1.0, 1.0]))
def test_explicit_form_solves_the_implicit_equations(tau, w, beta, alpha, sign):
    state = (tau, sign * w, beta, alpha)
    r = implicit_residuals(state, rhs(state))
    scale = 1.0 + max(abs(tau), w, beta, alpha) ** 4
    assert np.max(np.abs(r)) < 1e-11 * scale


def _jacobian(state, h=1e-6):
    x = np.array(state, dtype=float)
    jac = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        jac[:, j] = (np.array(rhs(x + e)) - np.array(rhs(x - e))) / (2 * h)
    return jac


def test_jacobian_eigenvalues_match_characteristic_roots():
    eig = np.sort(np.linalg.eigvals(_jacobian(CRITICAL_POINT)).real)
    np.testing.assert_allclose(eig, characteristic_roots(), atol=1e-5)


def test_initial_state_lies_on_the_stable_direction():
    mode = stable_mode()
    y = np.array(initial_state(-1e-6, mode))
    d = y - np.array(CRITICAL_POINT)
    # to first order the flow is q * d
    np.testing.assert_allclose(np.array(rhs(y)), mode.q * d, rtol=1e-4, atol=1e-12)
    with pytest.raises(ValueError):
        initial_state(0.0, mode)


def test_event_residual():
    assert event_residual((0.3, 2.0, 1.0, 0.5), "clamped") == 0.3
    assert event_residual((0.3, 2.0, 1.0, 0.5), "hinged") == pytest.approx(0.5)
    assert event_residual((0.3, np.inf, 1.0, 0.0), "hinged") == 0.0


def test_sigma_roundtrip():
    state = (0.7, 3.0, 0.8, 0.4)
    sigma, y = to_sigma_state(-1.2, state)
    t, back = from_sigma_state(sigma, y)
    assert t == -1.2
    np.testing.assert_allclose(back, state, rtol=1e-14)
    t, base = from_sigma_state(np.array([0.0]), y[:, None])
    assert np.isinf(base[0, 1]) and base[0, 3] == 0.0


def test_sigma_system_matches_chain_rule():
    state = (0.6, 3.0, 0.9, 0.5)
    sigma, (t, tau, v, beta) = to_sigma_state(0.0, state)
    d = rhs(state)
    dt_dsigma, dtau, dv, dbeta = sigma_derivatives(sigma, tau, v, beta)
    # d/dsigma = (dt/dsigma) d/dt
    assert dtau == pytest.approx(dt_dsigma * d.tau, rel=1e-12)
    assert dbeta == pytest.approx(dt_dsigma * d.beta, rel=1e-12)
    tau_, w, beta_, alpha = state
    v_t = d.alpha * w * w + 2 * alpha * w * d.w
    assert dv == pytest.approx(dt_dsigma * v_t, rel=1e-12)
    u_t = 2 * alpha * d.alpha * w + alpha * alpha * d.w
    assert dt_dsigma == pytest.approx(3 * sigma**2 / u_t, rel=1e-12)
