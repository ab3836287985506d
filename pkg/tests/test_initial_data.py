import numpy as np
import pytest
from scipy import integrate

from semiwig.errors import ResolutionError
from semiwig.grid import forward_transform, gradient_norm, make_grid, sobolev_norm
from semiwig.initial_data import (
    WavepacketSpec,
    classify,
    closed_form_fourier,
    gaussian_envelope,
    sech_envelope,
    select_grid,
    synthesize,
    wavepacket_verdict,
)

EPS = (0.2, 0.1, 0.05, 0.025)


def field_for(spec, eps):
    return synthesize(spec, eps, select_grid(spec, eps))


def sweep_verdict(spec, X0=0.0, K0=0.0, eps=EPS):
    diags = [classify(field_for(spec, e), X0, K0) for e in eps]
    return wavepacket_verdict(eps, diags)


def test_beta_zero_wavepacket_is_the_envelope():
    spec = WavepacketSpec("envelope-wavepacket", 1, beta=0.0)
    g = make_grid(1, 256, 8)
    f = synthesize(spec, 0.3, g)
    ref = 2**0.25 * np.exp(-np.pi * g.x**2)
    assert np.max(np.abs(f.values - ref)) < 1e-12


@pytest.mark.parametrize(
    "spec",
    [
        WavepacketSpec("envelope-wavepacket", 1, beta=0.25, position=(0.3,), wavenumber=(0.4,)),
        WavepacketSpec("coherent-state", 1, position=(-0.2,), wavenumber=(0.7,)),
        WavepacketSpec("envelope-wavepacket", 1, beta=0.5, envelope=sech_envelope()),
        WavepacketSpec("radial-chirp", 1, beta=0.5, chirp_amplitude=1.3, chirp_rate=-0.8, wavenumber=(0.2,)),
        WavepacketSpec("mono-chirp", 2, beta=0.25, chirp_rate=1.0),
    ],
    ids=["wavepacket", "coherent", "sech", "radial", "mono2d"],
)
@pytest.mark.parametrize("eps", [0.2, 0.1, 0.05])
def test_synthesized_spectrum_matches_closed_form(spec, eps):
    f, factor = synthesize(spec, eps, select_grid(spec, eps), return_factor=True)
    g = f.grid
    ref = closed_form_fourier(spec, eps, g.k_mesh() if g.dim == 2 else g.k)
    assert np.max(np.abs(forward_transform(f).values - ref)) < 1e-6
    assert abs(factor - 1) < 1e-6
    assert f.mass == pytest.approx(1.0, abs=1e-12)


def test_radial_chirp_origin_value_against_quadrature():
    A, z, beta, eps = 1.0, 1.0, 0.5, 0.25
    spec = WavepacketSpec("radial-chirp", 1, beta=beta, chirp_amplitude=A, chirp_rate=z)
    c = A / eps ** (2 * beta) + 1j * z / eps
    pref = A**-0.25 * (A / eps**beta) ** 0.5
    re = integrate.quad(lambda x: np.exp(-0.5 * np.pi * c.real * x * x) * np.cos(0.5 * np.pi * c.imag * x * x), -np.inf, np.inf, epsabs=1e-14, limit=400)[0]
    im = integrate.quad(lambda x: -np.exp(-0.5 * np.pi * c.real * x * x) * np.sin(0.5 * np.pi * c.imag * x * x), -np.inf, np.inf, epsabs=1e-14, limit=400)[0]
    value = closed_form_fourier(spec, eps, np.array([0.0]))[0]
    assert abs(value - pref * (re + 1j * im)) < 1e-10


def test_gaussian_wavepacket_with_beta_zero_has_gaussian_transform():
    spec = WavepacketSpec("envelope-wavepacket", 1, beta=0.0)
    k = np.linspace(-3, 3, 13)
    assert np.allclose(closed_form_fourier(spec, 0.1, k), 2**0.25 * np.exp(-np.pi * k**2), atol=1e-15)


def test_mono_chirp_transform_factorizes():
    spec = WavepacketSpec("mono-chirp", 2, beta=0.3, chirp_amplitude=1.2, chirp_rate=0.7)
    eps = 0.1
    k1, k2 = np.meshgrid(np.linspace(-4, 4, 9), np.linspace(-4, 4, 9), indexing="ij")
    full = closed_form_fourier(spec, eps, (k1, k2))
    s = eps**0.3
    c = 1.2 + 0.7j * eps ** (2 * 0.3 - 1)
    chirped = np.exp(-2 * np.pi * (k1 * s) ** 2 / c)
    plain = np.exp(-2 * np.pi * (k2 * s) ** 2 / 1.2)
    ratio = full / (chirped * plain)
    assert np.allclose(ratio, ratio[0, 0], rtol=1e-12)


def test_custom_family_has_no_closed_form():
    spec = WavepacketSpec("custom", 1, amplitude=lambda x: np.exp(-np.pi * x**2))
    with pytest.raises(NotImplementedError):
        closed_form_fourier(spec, 0.1, np.zeros(3))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "radial-chirp", "beta": 1.0},
        {"family": "radial-chirp", "beta": -0.1},
        {"family": "radial-chirp", "chirp_amplitude": 0.0},
        {"family": "mono-chirp", "chirp_rate": 0.0},
        {"family": "plane-wave"},
        {"family": "custom"},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        WavepacketSpec(**kwargs)


def test_coarse_grid_raises_resolution_error():
    spec = WavepacketSpec("coherent-state", 1, wavenumber=(1.0,))
    with pytest.raises(ResolutionError) as err:
        synthesize(spec, 0.02, make_grid(1, 64, 4))
    assert err.value.required_points is not None


def test_coherent_state_h1_scaling():
    eps = 0.04
    f = field_for(WavepacketSpec("coherent-state", 1), eps)
    # ||a'||^2 = pi for the unit Gaussian envelope, so ||grad u|| = sqrt(pi/eps)
    assert sobolev_norm(f, 1) == pytest.approx(np.sqrt(1 + np.pi / eps), rel=0.05)
    assert gradient_norm(f) == pytest.approx(np.sqrt(np.pi / eps), rel=1e-8)


def test_gradient_exponent_of_half_beta_wavepacket():
    spec = WavepacketSpec("envelope-wavepacket", 1, beta=0.5)
    eps = np.array([0.1, 0.05, 0.025])
    grads = [gradient_norm(field_for(spec, e)) for e in eps]
    slope = np.polyfit(np.log(eps), np.log(grads), 1)[0]
    assert slope == pytest.approx(-0.5, rel=0.1)


def test_classify_is_refinement_invariant():
    spec = WavepacketSpec("radial-chirp", 1, beta=0.5, position=(0.25,), wavenumber=(0.5,))
    eps = 0.05
    g = select_grid(spec, eps)
    fine = make_grid(1, 2 * g.points, g.half_width)
    a = classify(synthesize(spec, eps, g), 0.25, 0.5).as_dict()
    b = classify(synthesize(spec, eps, fine), 0.25, 0.5).as_dict()
    for key in a:
        assert abs(a[key] - b[key]) <= 1e-6 * abs(b[key]), key


def test_diagnostics_are_finite_and_nonnegative():
    d = classify(field_for(WavepacketSpec("coherent-state", 1, wavenumber=(0.3,)), 0.1), 0.0, 0.3)
    vals = np.array(list(d.as_dict().values()))
    assert np.all(np.isfinite(vals)) and np.all(vals >= 0)
    assert d.l2_norm == pytest.approx(1.0, abs=1e-12)


def test_coherent_state_is_a_wavepacket():
    v = sweep_verdict(WavepacketSpec("coherent-state", 1, position=(0.5,), wavenumber=(0.8,)), 0.5, 0.8)
    assert v.wavepacket and v.narrowband
    assert v.gradient_fit.slope == pytest.approx(0.5, rel=0.05)


def test_broad_modulated_gaussian_is_not_a_wavepacket():
    v = sweep_verdict(WavepacketSpec("envelope-wavepacket", 1, beta=0.0, wavenumber=(1.0,)), 0.0, 1.0)
    assert not v.wavepacket
    assert abs(v.spread_fit.slope) < 1e-6


def test_radial_chirp_half_beta_decays_in_both_diagnostics():
    v = sweep_verdict(WavepacketSpec("radial-chirp", 1, beta=0.5))
    assert v.gradient_fit.decaying and v.spread_fit.decaying and v.wavepacket


def test_mono_chirp_is_a_wavepacket():
    v = sweep_verdict(WavepacketSpec("mono-chirp", 2, beta=0.3))
    assert v.wavepacket


def test_verdict_requires_four_decreasing_points():
    d = classify(field_for(WavepacketSpec("coherent-state", 1), 0.1))
    with pytest.raises(ValueError):
        wavepacket_verdict([0.2, 0.1, 0.05], [d] * 3)
    with pytest.raises(ValueError):
        wavepacket_verdict([0.2, 0.1, 0.1, 0.05], [d] * 4)


def test_envelope_normalization():
    for env in (gaussian_envelope(1, 2.0), sech_envelope()):
        x = np.linspace(-30, 30, 200001)
        assert np.trapezoid(np.abs(env.profile(x)) ** 2, x) == pytest.approx(1.0, rel=1e-9)
