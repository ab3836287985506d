import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semiwig.bounds import kinetic_bound
from semiwig.dynamics import (
    NLSParams,
    center_of_mass,
    energy,
    first_moment,
    free_propagate,
    galilean_transform,
    moment_growth_check,
    nonlinear_phase_step,
    solve,
)
from semiwig.errors import MarginError, SolverError
from semiwig.grid import SampledField, forward_transform, gradient_norm, make_grid
from semiwig.initial_data import WavepacketSpec, gaussian_envelope, select_grid, synthesize


def coherent(eps, K0=0.0, X0=0.0, width=1.0, t_end=1.0):
    spec = WavepacketSpec("coherent-state", 1, position=(X0,), wavenumber=(K0,), envelope=gaussian_envelope(1, width))
    return synthesize(spec, eps, select_grid(spec, eps, t_end=t_end))


def test_params_validation_and_schedule():
    p = NLSParams.from_schedule(0.1, 1.0, 2.0, 1.5, focusing=True)
    assert p.b == pytest.approx(-2.0 * 0.1**1.5) and p.focusing
    assert p.b_schedule == (2.0, 1.5)
    with pytest.raises(ValueError):
        NLSParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        NLSParams(0.1, 0.0, 1.0)
    with pytest.warns(UserWarning):
        NLSParams(0.1, 2.5, -1.0)


def test_free_group_law_and_reversal():
    f = coherent(0.1, K0=0.5)
    a = free_propagate(free_propagate(f, 0.3), 0.45)
    b = free_propagate(f, 0.75)
    assert np.max(np.abs(a.values - b.values)) < 1e-12
    back = free_propagate(b, -0.75)
    assert np.max(np.abs(back.values - f.values)) < 1e-12


def test_free_flow_keeps_spectral_modulus():
    f = coherent(0.1, K0=0.5)
    before = np.abs(forward_transform(f).values)
    after = np.abs(forward_transform(free_propagate(f, 0.8)).values)
    assert np.max(np.abs(before - after)) < 1e-13


def test_free_gaussian_against_closed_form():
    # psi0 = exp(-pi x^2 / lam) spreads as sqrt(lam / m) exp(-pi x^2 / m), m = lam + 4 pi i eps t
    eps, t, lam = 0.5, 1.0, 1.0
    g = make_grid(1, 512, 32)
    f = SampledField(g, np.exp(-np.pi * g.x**2 / lam) + 0j, eps)
    m = lam + 4j * np.pi * eps * t
    ref = np.sqrt(lam / m) * np.exp(-np.pi * g.x**2 / m)
    err = np.sqrt(np.sum(np.abs(free_propagate(f, t).values - ref) ** 2) * g.dx)
    assert err < 1e-9


def test_nonlinear_step_properties():
    g = make_grid(1, 64, 4)
    c = 0.7 * np.exp(0.3j)
    f = SampledField(g, np.full(64, c), 0.1)
    assert nonlinear_phase_step(f, NLSParams(0.1, 1.0, 0.0), 0.2) is f
    p = NLSParams(0.1, 1.0, 0.5)
    out = nonlinear_phase_step(f, p, 0.2)
    assert np.allclose(out.values, c * np.exp(-1j * (0.5 / 0.1) * abs(c) ** 2 * 0.2), atol=1e-15)
    rand = SampledField(g, np.random.default_rng(1).standard_normal(64) + 1j, 0.1)
    assert np.array_equal(np.abs(nonlinear_phase_step(rand, p, 0.3).values), np.abs(rand.values)) or np.allclose(
        np.abs(nonlinear_phase_step(rand, p, 0.3).values), np.abs(rand.values), rtol=1e-15, atol=0
    )


def test_zero_coupling_solve_matches_free_flow():
    f = coherent(0.1, K0=0.4)
    traj = solve(NLSParams(0.1, 1.0, 0.0), f, 1.0)
    assert np.max(np.abs(traj.final.values - free_propagate(f, 1.0).values)) < 1e-10
    e, kin, pot = energy(traj.params, f)
    assert pot == 0 and e == kin


def test_soliton_modulus_is_stationary():
    # i psi_t + psi_xx + |psi|^2 psi = 0 has psi = sqrt(2) eta sech(eta x) exp(i eta^2 t)
    eta = 0.25
    g = make_grid(1, 1024, 128)
    prof = np.sqrt(2) * eta / np.cosh(eta * g.x)
    f = SampledField(g, prof + 0j, 1.0)
    traj = solve(NLSParams(1.0, 1.0, -1.0), f, 1.0, dt=0.01)
    assert np.max(np.abs(np.abs(traj.final.values) - prof)) < 1e-6
    exact = prof * np.exp(1j * eta**2)
    assert np.max(np.abs(traj.final.values - exact)) < 1e-6


def test_strang_is_second_order():
    eps = 0.1
    f = coherent(eps, K0=0.3)
    p = NLSParams(eps, 1.0, 0.5 * eps)
    kw = dict(energy_tol=None, mass_tol=1.0, max_halvings=0)
    ref = solve(p, f, 0.5, dt=0.5 / 1024, **kw).final.values
    errs = [np.max(np.abs(solve(p, f, 0.5, dt=0.5 / m, **kw).final.values - ref)) for m in (32, 64)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)


def test_forward_then_backward_returns_initial_data():
    eps = 0.1
    f = coherent(eps, K0=0.3)
    p = NLSParams(eps, 1.0, eps)
    fwd = solve(p, f, 0.5)
    back = solve(p, fwd.final, -0.5, dt=fwd.dt)
    assert np.max(np.abs(back.final.values - f.values)) < 1e-6


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_conservation_gates(sign):
    eps = 0.05
    f = coherent(eps, K0=0.5)
    traj = solve(NLSParams(eps, 1.0, sign * eps**2), f, 1.0)
    assert traj.mass_drift < 1e-8
    assert traj.energy_drift < 1e-6
    assert np.all(np.abs(traj.conserved_log[:, 1] - 1) < 1e-8)


def test_energy_coefficient_alternative_drifts():
    eps = 0.1
    f = coherent(eps)
    p = NLSParams(eps, 1.0, -0.5 * eps)
    good = solve(p, f, 1.0).energy_drift
    alt = solve(p, f, 1.0, energy_tol=None, energy_coefficient=1 / 3).energy_drift
    assert alt > 100 * good


def test_conservation_failure_raises():
    f = coherent(0.1)
    with pytest.raises(SolverError):
        solve(NLSParams(0.1, 1.0, 5.0), f, 1.0, dt=0.2, max_halvings=0, energy_tol=1e-12, margin_tol=None)


def test_galilean_identity_and_composition():
    eps, T = 0.1, 0.4
    f = coherent(eps, K0=0.0)
    assert np.max(np.abs(galilean_transform(f, 0.0, 0.0, T).values - f.values)) < 1e-15
    v, x0 = 0.3, 0.2
    once = galilean_transform(f, x0, v, T)
    twice = galilean_transform(once, -x0, -v, T)
    # the second boost undoes the first up to a constant phase
    phase = np.vdot(f.values, twice.values)
    phase /= abs(phase)
    assert np.max(np.abs(twice.values - phase * f.values)) < 1e-8


def test_boosted_initial_data_matches_transformed_solution():
    eps, T = 0.1, 0.5
    spec = WavepacketSpec("coherent-state", 1)
    g = select_grid(spec, eps, t_end=1.0)
    g = make_grid(1, 2 * g.points, 2 * g.half_width)
    f = synthesize(spec, eps, g)
    p = NLSParams(eps, 1.0, eps**2)
    v = 2 * np.pi * eps * 5 * g.dk  # on the momentum lattice
    traj = solve(p, f, T, dt=1e-3)
    boosted = solve(p, galilean_transform(f, -0.3, v, 0.0), T, dt=1e-3)
    target = galilean_transform(traj.final, -0.3, v, T)
    err = np.sqrt(np.sum(np.abs(boosted.final.values - target.values) ** 2) * g.dx)
    assert err < 1e-6


def test_galilean_margin_violation():
    f = coherent(0.1)
    with pytest.raises(MarginError):
        galilean_transform(f, 0.9 * f.grid.half_width, 0.0, 0.0)


def test_moments_of_even_field_vanish():
    f = coherent(0.1)
    assert abs(center_of_mass(f)[0]) < 1e-10


def test_free_gaussian_second_moment():
    eps, w = 0.1, 1.0
    f = coherent(eps, width=w, t_end=2.0)
    for t in (0.5, 1.0, 2.0):
        m = first_moment(free_propagate(f, t))[0] ** 2
        assert m == pytest.approx(w**2 * eps / (4 * np.pi) + 4 * np.pi * eps * t**2 / w**2, rel=1e-8)


def test_center_moves_at_twice_the_wavenumber():
    eps, K0, T = 0.05, 0.5, 1.0
    f = coherent(eps, K0=K0, t_end=T)
    traj = solve(NLSParams(eps, 1.0, -eps**1.5), f, T)
    c = np.array([center_of_mass(fr)[0] for fr in traj.frames])
    vel = np.polyfit(traj.times, c, 1)[0]
    assert vel == pytest.approx(2 * K0, rel=0.02)


def test_moment_report_and_margin_guard():
    eps = 0.1
    f = coherent(eps, K0=0.5)
    rep = moment_growth_check(solve(NLSParams(eps, 1.0, eps**2), f, 1.0))
    assert np.isfinite(rep.ratio) and rep.ratio > 0
    g = make_grid(1, 64, 1)
    wide = SampledField(g, np.ones(64, complex), eps)
    with pytest.raises(MarginError):
        first_moment(wide)


@given(sign=st.sampled_from([1.0, -1.0]), gamma=st.sampled_from([1.0, 1.5, 2.0]))
def test_kinetic_bound_holds_along_trajectory(sign, gamma):
    eps = 0.1
    f = coherent(eps, K0=0.3)
    g = f.grid
    # a wider box absorbs the faster spreading under strong defocusing
    f = synthesize(WavepacketSpec("coherent-state", 1, wavenumber=(0.3,)), eps, make_grid(1, 2 * g.points, 2 * g.half_width))
    p = NLSParams(eps, 1.0, sign * eps**gamma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        kb = kinetic_bound(p, f)
    traj = solve(p, f, 1.0)
    worst = max(eps * gradient_norm(fr) for fr in traj.frames)
    assert worst <= 1.05 * kb.value
