import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from tallcol.dynamics import rhs
from tallcol.reconstruct import (
    ColumnProfile,
    MaterialSpec,
    dimensional_design,
    evaluate,
    original_ode_residuals,
    profile,
    volume,
)
from tallcol.similarity import similarity_profile


@pytest.mark.parametrize("name", ["clamped_profile", "hinged_profile"])
def test_volume_and_normalization(name, request):
    prof = request.getfixturevalue(name)
    assert volume(prof) == pytest.approx(1.0, abs=1e-3)
    assert prof.b[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(prof.b) > 0)
    assert volume(prof.scaled(2.0)) == pytest.approx(2 * volume(prof), rel=1e-14)


def test_pure_similarity_volume():
    s = np.geomspace(1e-3, 1.0, 300)
    a, b, th = similarity_profile(96.0, s)
    prof = ColumnProfile("clamped", 96.0, s, a, b, th, np.ones(s.size, bool))
    # int 4 s**3 ds = 1; Simpson on the geometric grid is good to ~4e-7
    assert volume(prof) == pytest.approx(1.0, rel=1e-6)


def test_clamped_base(clamped, clamped_profile):
    assert abs(clamped_profile.theta[-1]) < 1e-12
    assert clamped_profile.a[-1] == pytest.approx(clamped.lam / 24 * clamped.base_state.alpha, rel=1e-14)


def test_hinged_base(hinged_profile):
    # the hinged optimum tapers to zero area at its base
    assert hinged_profile.a[-1] < 1e-30
    assert hinged_profile.s.size > 400


def test_extension_is_the_similarity_solution(clamped):
    prof = profile(clamped, 200, 1e-2)
    ext = prof.extended
    assert ext.any() and not ext[-1]
    assert prof.s[ext].max() < np.exp(clamped.t_stop)
    np.testing.assert_allclose(prof.a[ext] / prof.s[ext] ** 3, clamped.lam / 24, rtol=1e-15)
    np.testing.assert_allclose(prof.theta[ext] * prof.s[ext] ** 2, 1.0, rtol=1e-15)


def test_theta_monotone_clamped(clamped_profile):
    th = clamped_profile.theta[~clamped_profile.extended]
    assert np.all(np.diff(th) < 0)


def test_hinged_load_integral_vanishes(hinged_profile):
    # zero torque at both ends forces int theta b = 0
    p = hinged_profile
    total = trapezoid(p.theta * p.b, p.s)
    scale = trapezoid(np.abs(p.theta * p.b), p.s)
    assert abs(total) / scale < 1e-3


@pytest.mark.parametrize("name", ["clamped", "hinged"])
def test_peeled_state_solves_the_original_odes(name, request):
    """Map states and their exact t-derivatives back to (a, b, theta) derivatives."""
    sol = request.getfixturevalue(name)
    lam = sol.lam
    ts = np.linspace(sol.t_stop, 0.0, 301)[1:]
    s = np.exp(sol.t_stop - ts)
    for si, y in zip(s, sol.state(ts)):
        tau, w, beta, alpha = y
        d = rhs(y)
        a = lam / 24 * si**3 * alpha
        a_s = lam / 24 * si**2 * (3 * alpha - d.alpha)
        b = lam / 96 * si**4 * beta
        b_s = lam / 96 * si**3 * (4 * beta - d.beta)
        th = tau / si**2
        th_s = -w / si**3
        th_ss = (3 * w + d.w) / si**4
        r = original_ode_residuals(lam, a, a_s, b, b_s, th, th_s, th_ss)
        scales = (abs(a * a * th_ss) + abs(lam * b * th), abs(4 * a * th_s * th_ss) + abs(lam * th**2), abs(a))
        for ri, sc in zip(r, scales):
            assert abs(ri) <= 1e-10 * sc


def test_profile_differences(clamped):
    """Spline derivatives on the emitted samples: b_s = a and the energy equation.

    The similarity extension joins the computed part with a jump of order
    ``|delta|`` in the peeled factors, so the derivatives are taken over the
    computed samples only. The second derivative in the energy equation
    converges like h**2 (8e-4 at 400 samples), hence the finer sampling.
    """
    p = profile(clamped, 2000)
    comp = ~p.extended
    s, a, b, theta = p.s[comp], p.a[comp], p.b[comp], p.theta[comp]
    x = np.log(s)
    # interior samples only: the spline's end derivatives are one-sided
    mask = (s >= 0.05) & (s > s[0]) & (s < 1.0)
    b_s = CubicSpline(x, b)(x, 1) / s
    assert np.max(np.abs(b_s - a)[mask] / a[mask]) < 1e-4
    tau = theta * s**2
    th_s = (CubicSpline(x, tau)(x, 1) - 2 * tau) / s**3
    flux = a**2 * th_s
    flux_s = CubicSpline(x, flux)(x, 1) / s
    r = flux_s + p.lam * b * theta
    assert np.max(np.abs(r[mask])) / np.max(np.abs(flux_s[mask])) < 1e-4
    # size of the junction
    top = clamped.states[-1]
    assert np.max(np.abs(top[[0, 2, 3]] - 1.0)) <= 2 * abs(clamped.delta)


def test_profile_argument_checks(clamped):
    with pytest.raises(ValueError):
        profile(clamped, 1)
    with pytest.raises(ValueError):
        profile(clamped, 100, 1.0)
    with pytest.raises(ValueError):
        evaluate(clamped, [0.0, 0.5])


def test_profile_invariants():
    s = np.array([0.5, 1.0])
    with pytest.raises(ValueError):
        ColumnProfile("clamped", 1.0, s[::-1], [1, 1], [1, 1], [0, 0], [0, 0])
    with pytest.raises(ValueError):
        ColumnProfile("clamped", 1.0, [0.5, 0.9], [1, 1], [1, 1], [0, 0], [0, 0])
    with pytest.raises(ValueError):
        ColumnProfile("clamped", 1.0, s, [0, 1], [1, 1], [0, 0], [0, 0])


def test_dimensional_design(clamped_profile):
    unit = MaterialSpec(rho=1.0, g=1.0, E=1.0, c=1.0, V=1.0)
    lam_one = clamped_profile.scaled(1.0)
    lam_one.lam = 1.0
    height, area = dimensional_design(lam_one, unit)
    assert height == pytest.approx(1.0)
    h1, _ = dimensional_design(clamped_profile, unit)
    h2, area2 = dimensional_design(clamped_profile, MaterialSpec(1.0, 1.0, 1.0, 1.0, 2.0))
    assert h2 / h1 == pytest.approx(2 ** (1 / 3))
    assert h1 == pytest.approx(clamped_profile.lam ** (1 / 3))
    # physical area at the base: (V / L) a(1)
    assert area2(h2) == pytest.approx(2.0 / h2 * clamped_profile.a[-1])
    with pytest.raises(ValueError):
        MaterialSpec(rho=0.0, g=1.0, E=1.0, c=1.0, V=1.0)


def test_height_gain_over_uniform(clamped_profile):
    from tallcol.oracle import DiscreteShape, sturm_liouville_lambda

    lam_uniform = sturm_liouville_lambda(DiscreteShape.uniform(2000), "clamped")
    unit = MaterialSpec(1.0, 1.0, 1.0, 1.0, 1.0)
    ratio = dimensional_design(clamped_profile, unit)[0] / (lam_uniform ** (1 / 3))
    assert ratio == pytest.approx((clamped_profile.lam / lam_uniform) ** (1 / 3), rel=1e-12)
    assert ratio == pytest.approx(2.58, abs=0.01)
