import numpy as np
import pytest
from hypothesis import given, strategies as st

from semiwig.dynamics import NLSParams, free_propagate, solve
from semiwig.errors import GridError
from semiwig.grid import Axis, SampledField, forward_transform, make_grid
from semiwig.initial_data import WavepacketSpec, select_grid, synthesize
from semiwig.norms import fl_inf_norm
from semiwig.phase_space import (
    FourierWigner,
    delta_distance,
    fourier_free_transport,
    fourier_wigner,
    fourier_wigner_derivatives,
    free_transport,
    phase_space_fourier,
    phase_space_inverse,
    transport_mismatch,
    transport_weight_ratio,
    wigner_equation_residual,
    wigner_transform,
)


def unit_gaussian(eps=1.0, n=256, L=8.0):
    g = make_grid(1, n, L)
    return SampledField(g, 2**0.25 * np.exp(-np.pi * g.x**2) + 0j, eps)


def coherent(eps, X0=0.0, K0=0.0, t_end=0.0):
    spec = WavepacketSpec("coherent-state", 1, position=(X0,), wavenumber=(K0,))
    return synthesize(spec, eps, select_grid(spec, eps, t_end=t_end))


def test_gaussian_wigner_closed_form():
    W = wigner_transform(unit_gaussian())
    ref = 2 * np.exp(-2 * np.pi * (W.x[:, None] ** 2 + W.k[None, :] ** 2))
    assert np.max(np.abs(W.values - ref)) < 1e-8
    assert W.imag_residue < 1e-10


def test_coherent_wigner_closed_form():
    eps, X0, K0 = 0.1, 0.3, 0.8
    W = wigner_transform(coherent(eps, X0, K0))
    x, k = W.x[:, None], W.k[None, :]
    ref = (2 / eps) * np.exp(-2 * np.pi * ((x - X0) ** 2 + (k - K0 / (2 * np.pi)) ** 2) / eps)
    assert np.max(np.abs(W.values - ref)) < 1e-8 * ref.max()


def test_marginals_and_total_mass():
    f = coherent(0.1, 0.2, 0.5)
    W = wigner_transform(f)
    assert np.max(np.abs(W.values.sum(axis=1) * W.k_axis.step - np.abs(f.values) ** 2)) < 1e-8
    # x-marginal is the eps-scaled momentum density
    spec = np.abs(forward_transform(f).values) ** 2
    assert np.max(np.abs(W.values.sum(axis=0) * W.x_axis.step - spec / f.epsilon)) < 1e-8 * spec.max() / f.epsilon
    assert W.values.sum() * W.cell == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("shift", [0.3, 0.6, 0.9])
def test_fourier_wigner_consistency_and_symmetry(shift):
    # two separated packets give an oscillating interference term
    eps = 0.1
    a = coherent(eps, -shift, 0.5)
    b = coherent(eps, shift, -0.4)
    g = make_grid(1, 2 * max(a.grid.points, b.grid.points), 2 * max(a.grid.half_width, b.grid.half_width))
    prof = [synthesize(WavepacketSpec("coherent-state", 1, position=(x,), wavenumber=(k,)), eps, g) for x, k in ((-shift, 0.5), (shift, -0.4))]
    f = prof[0].with_values(prof[0].values + 1j * prof[1].values).normalized()
    wh = fourier_wigner(f)
    via = phase_space_fourier(wigner_transform(f))
    assert np.max(np.abs(wh.values - via.values)) < 1e-8
    n = wh.values.shape
    flipped = wh.values[(-np.arange(n[0])) % n[0]][:, (-np.arange(n[1])) % n[1]]
    assert np.max(np.abs(flipped - np.conj(wh.values))) < 1e-12


def test_fourier_wigner_origin_and_sup():
    wh = fourier_wigner(coherent(0.05, 0.1, 0.4))
    i0, j0 = np.argmin(np.abs(wh.X)), np.argmin(np.abs(wh.K))
    assert wh.values[i0, j0] == pytest.approx(1.0, abs=1e-10)
    assert np.abs(wh.values).max() == pytest.approx(1.0, abs=1e-10)
    assert fl_inf_norm(wh) == pytest.approx(1.0, abs=1e-10)


def test_derivative_bounds():
    f = coherent(0.1, 0.3, 0.5)
    d = fourier_wigner_derivatives(fourier_wigner(f), f)
    assert d["max_dK"] <= d["bound_dK"] * 1.01
    assert d["max_dX"] <= d["bound_dX"] * 1.01


def test_round_trip_between_sides():
    W = wigner_transform(coherent(0.1))
    back = phase_space_inverse(phase_space_fourier(W), W.x_axis, W.k_axis)
    assert np.max(np.abs(back.values - W.values)) < 1e-12 * np.abs(W.values).max()
    with pytest.raises(GridError):
        phase_space_inverse(phase_space_fourier(W), W.k_axis, W.k_axis)


def test_two_dimensional_field_rejected():
    g = make_grid(2, 64, 4)
    with pytest.raises(GridError):
        wigner_transform(SampledField(g, np.exp(-np.pi * g.radius_squared()) + 0j))


def test_free_transport_is_the_free_flow_image():
    eps, t = 0.1, 0.3
    f = coherent(eps, K0=0.4, t_end=t)
    W = wigner_transform(f)
    assert free_transport(W, 0.0) is W
    moved = free_transport(W, t)
    exact = wigner_transform(free_propagate(f, t))
    assert np.max(np.abs(moved.values - exact.values)) < 1e-8 * np.abs(W.values).max()


def test_free_transport_group_law_and_isometry():
    f = coherent(0.1, K0=0.2, t_end=0.5)
    W = wigner_transform(f)
    a = free_transport(free_transport(W, 0.2), 0.3)
    b = free_transport(W, 0.5)
    assert np.max(np.abs(a.values - b.values)) < 1e-10 * np.abs(W.values).max()
    assert fl_inf_norm(b) == pytest.approx(fl_inf_norm(W), rel=1e-10)


def test_fourier_side_transport_matches():
    eps, t = 0.1, 0.1
    f = coherent(eps, t_end=t)
    wh = fourier_wigner(f)
    assert fourier_free_transport(wh, 0.0) is wh
    shear = fourier_free_transport(wh, t, check=False)
    exact = fourier_wigner(free_propagate(f, t))
    # compare where the sheared K stays inside the window
    inside = np.abs(wh.K[None, :] + 4 * np.pi * wh.X[:, None] * t) < 0.4 * wh.K_axis.extent
    assert np.max(np.abs(shear.values - exact.values)[inside]) < 1e-8


def test_shear_beyond_window_rejected():
    wh = fourier_wigner(coherent(0.1))
    with pytest.raises(GridError):
        fourier_free_transport(wh, 50.0)


@given(
    x=st.floats(-50, 50),
    k=st.floats(-50, 50),
    t=st.floats(-2, 2),
)
def test_transport_weight_ratio_bounds(x, k, t):
    c = 2 + (4 * np.pi * t) ** 2
    r = transport_weight_ratio(x, k, t)
    assert 1 / c * (1 - 1e-12) <= r <= c * (1 + 1e-12)


def test_delta_distance_trivial_cases():
    ax = Axis(-8, 1 / 16, 256)
    one = FourierWigner(ax, ax, np.ones((256, 256), complex))
    assert delta_distance(one, 0.0, 0.0, s=1) == 0.0
    assert delta_distance(one, 0.0, 0.0, s=0) == 0.0


def test_delta_distance_locates_the_packet():
    eps, X0, K0 = 0.05, 0.5, 1.0
    wh = fourier_wigner(coherent(eps, X0, K0))
    cands = {(X0 + dx, K0 + dk): delta_distance(wh, X0 + dx, K0 + dk, 1.0) for dx in (-0.3, 0, 0.3) for dk in (-0.6, 0, 0.6)}
    assert min(cands, key=cands.get) == (X0, K0)


def test_delta_distance_decays_for_coherent_states():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    d = [delta_distance(fourier_wigner(coherent(e)), 0.0, 0.0, 1.0) for e in eps]
    assert np.all(np.diff(d) < 0)
    slope = np.polyfit(np.log(eps), np.log(d), 1)[0]
    assert slope > 0.3


def test_transport_mismatch_zero_for_free_flow():
    eps, t = 0.1, 0.5
    f = coherent(eps, K0=0.3, t_end=t)
    traj = solve(NLSParams(eps, 1.0, 0.0), f, t)
    assert transport_mismatch(traj.final, f, t, 0) < 1e-8
    assert transport_mismatch(traj.final, f, t, 1) < 1e-8
    with pytest.raises(GridError):
        transport_mismatch(traj.final, unit_gaussian(eps), t)


def _residual_run(b, dt, eps=0.2):
    spec = WavepacketSpec("coherent-state", 1, wavenumber=(0.3,))
    f = synthesize(spec, eps, select_grid(spec, eps, t_end=0.05))
    return solve(NLSParams(eps, 1.0, b), f, 0.05, dt=dt, frame_stride=1, frames=0)


def test_residual_of_free_trajectory():
    traj = _residual_run(0.0, 0.05 / 128)
    assert wigner_equation_residual(traj, 1, "eq3") < 1e-4


def test_residual_converges_under_step_refinement():
    eps = 0.2
    coarse = wigner_equation_residual(_residual_run(eps**2, 0.05 / 8), 1, "eq3")
    fine = wigner_equation_residual(_residual_run(eps**2, 0.05 / 32), 1, "eq3")
    assert fine < 1e-3
    assert coarse / fine > 8  # second-order differencing


def test_residual_forms_agree_and_fix_the_potential_sign():
    eps = 0.2
    traj = _residual_run(eps**2, 0.05 / 32)
    r1 = wigner_equation_residual(traj, 1, "eq1")
    r3 = wigner_equation_residual(traj, 1, "eq3")
    assert r1 == pytest.approx(r3, rel=0.1)
    # the opposite sign of the potential term leaves an order-of-magnitude larger residual
    assert wigner_equation_residual(traj, 1, "eq3", potential_sign=-1.0) > 50 * r3
    with pytest.raises(ValueError):
        wigner_equation_residual(traj, 1, "eq2")
