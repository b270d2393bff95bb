import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tallcol import kernels
from tallcol.dynamics import as_derivatives, initial_state
from tallcol.linearize import stable_mode
from tallcol.shooting import (
    NoCrossing,
    ShootingOptions,
    integrate_backward,
    lambda_sensitivity,
    richardson_extrapolate,
)

# frozen from the default run (delta = -1e-4, rtol 1e-8, atol 1e-10)
CLAMPED_LAMBDA = 134.19350915811583
CLAMPED_T_STOP = -1.71143226355816
HINGED_LAMBDA = 222.73619698978345
HINGED_T_STOP = -1.9470371322409465


def test_clamped_values(clamped):
    assert clamped.lam == pytest.approx(CLAMPED_LAMBDA, rel=1e-9)
    assert clamped.t_stop == pytest.approx(CLAMPED_T_STOP, abs=1e-8)
    assert clamped.lam == pytest.approx(134.1944, abs=0.2)
    assert clamped.t_stop == pytest.approx(-1.7114, abs=0.01)
    assert abs(clamped.base_state.tau) < 1e-12


def test_hinged_values(hinged):
    assert hinged.lam == pytest.approx(HINGED_LAMBDA, rel=1e-9)
    assert hinged.t_stop == pytest.approx(HINGED_T_STOP, abs=1e-8)
    assert hinged.lam == pytest.approx(222.7366, abs=0.4)
    base = hinged.base_state
    assert base.alpha == 0.0 and np.isinf(base.w)


def test_independent_reference_clamped():
    """scipy's DOP853 with a terminal event on tau gives the same base."""
    y0 = initial_state(-1e-4, stable_mode())

    def hit(t, y):
        return y[0]

    hit.terminal = True
    ref = solve_ivp(lambda t, y: as_derivatives(*y), (0.0, -10.0), y0, method="DOP853",
                    rtol=1e-12, atol=1e-14, events=hit)
    t_ref = ref.t_events[0][0]
    lam_ref = 96.0 / ref.y_events[0][0][2]
    assert lam_ref == pytest.approx(CLAMPED_LAMBDA, rel=1e-8)
    # at default tolerances t_stop carries ~2e-6 of integration error
    assert t_ref == pytest.approx(CLAMPED_T_STOP, abs=1e-5)
    tight = integrate_backward("clamped", ShootingOptions(rel_tol=1e-12, abs_tol=1e-14))
    assert tight.lam == pytest.approx(lam_ref, rel=1e-11)
    assert tight.t_stop == pytest.approx(t_ref, abs=1e-9)


def test_trajectory_layout(clamped, hinged):
    for sol in (clamped, hinged):
        assert sol.t[0] == sol.t_stop and sol.t[-1] == 0.0
        assert np.all(np.diff(sol.t) > 0)
        assert sol.states.shape == (sol.t.size, 4)
        assert len(sol.trajectory) == sol.t.size
    np.testing.assert_allclose(clamped.state(np.array([0.0]))[0], clamped.states[-1], rtol=1e-12)


def test_hinged_torque_decays_to_zero(hinged):
    s = hinged.states
    u = np.zeros(s.shape[0])
    live = s[:, 3] > 0
    u[live] = s[live, 3] ** 2 * s[live, 1]
    assert u[-1] == pytest.approx(2.0, rel=1e-3)
    assert u[0] == 0.0
    # alpha**2 w shrinks steadily over the last part of the run toward the base
    tail = u[hinged.t < hinged.t_stop + 0.3]
    assert np.all(np.diff(tail) >= 0)


def test_hinged_result_independent_of_switch_point(hinged, monkeypatch):
    import tallcol.shooting as shooting

    monkeypatch.setattr(shooting, "HINGE_SWITCH_ALPHA", 0.4)
    other = integrate_backward("hinged")
    assert other.lam == pytest.approx(hinged.lam, rel=1e-8)
    assert other.t_stop == pytest.approx(hinged.t_stop, abs=1e-8)


def test_state_between_phases_is_continuous(hinged):
    t_sw = hinged._t_switch
    below, above = hinged.state(np.array([t_sw - 1e-10, t_sw + 1e-10]))
    np.testing.assert_allclose(below, above, rtol=1e-7)
    assert above[3] == pytest.approx(0.25, abs=1e-8)


@pytest.mark.parametrize("bc", ["clamped", "hinged"])
def test_wrong_branch(bc):
    with pytest.raises(NoCrossing) as info:
        integrate_backward(bc, ShootingOptions(delta=1e-4))
    assert "negating delta" in str(info.value)
    assert info.value.t_last < 0


def test_options_validation():
    with pytest.raises(ValueError):
        ShootingOptions(delta=0.0)
    with pytest.raises(ValueError):
        ShootingOptions(rel_tol=-1.0)
    with pytest.raises(ValueError):
        ShootingOptions(max_steps=0)


def test_sensitivity_converges():
    deltas = [-1e-3, -1e-4, -1e-5, -1e-6]
    out = lambda_sensitivity("clamped", deltas)
    lams = np.array([lam for _, lam in out])
    steps = np.abs(np.diff(lams))
    assert np.all(steps[1:] < steps[:-1])
    limit, order = richardson_extrapolate(deltas, lams)
    assert limit == pytest.approx(134.1935089, abs=1e-6)
    assert order is not None


def test_sensitivity_input_checks():
    with pytest.raises(ValueError):
        lambda_sensitivity("clamped", [-1e-4, 1e-4])
    with pytest.raises(ValueError):
        lambda_sensitivity("clamped", [0.0])
    out = lambda_sensitivity("clamped", [1e-4])
    assert isinstance(out[0][1], NoCrossing)


def test_richardson_on_a_known_power_law():
    d = np.array([1e-1, 1e-2, 1e-3])
    limit, order = richardson_extrapolate(d, 5.0 + 3.0 * d**2)
    assert limit == pytest.approx(5.0, abs=1e-12)
    assert order == pytest.approx(2.0, rel=1e-8)
    assert richardson_extrapolate([1e-2, 1e-3], [1.0, 1.5]) == (1.5, None)


@pytest.mark.parametrize("bc", ["clamped", "hinged"])
def test_backends_agree(bc):
    if len(kernels.available()) < 2:
        pytest.skip("numba not available")
    lams = {}
    for b in kernels.available():
        with kernels.use(b):
            lams[b] = integrate_backward(bc).lam
    assert lams["numba"] == pytest.approx(lams["numpy"], rel=1e-12)
