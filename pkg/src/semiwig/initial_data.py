"""Initial-data families, their closed-form Fourier transforms, and
wavepacket diagnostics.

Families (``y = x - X0``, every profile multiplied by ``exp(i K0.y / eps)``):

* ``envelope-wavepacket``: ``eps^{-n beta/2} a(y / eps^beta)``
* ``coherent-state``: the same with ``beta = 1/2``
* ``radial-chirp``: ``(A/eps^beta)^{n/2} exp(-(pi/2)(A/eps^{2 beta} + i z/eps)|y|^2)``
* ``mono-chirp``: ``(A/eps^beta)^{n/2} exp(-(pi/2)(A/eps^{2 beta})|y|^2 - i pi z y_1^2/(2 eps))``
* ``custom``: WKB data ``a(y) exp(i S(y)/eps)`` from user callables

Chirps carry an extra ``A^{-n/4}`` so that every family has unit
continuum L2 norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ResolutionError
from .fitting import DEFAULT_SLOPE_THRESHOLD, FitResult, fit_decay_exponent
from .grid import (
    MARGIN_TOL,
    TAIL_TOL,
    SampledField,
    SpatialGrid,
    check_resolved,
    forward_transform,
    gradient_norm,
    l2_norm,
    make_grid,
    next_power_of_two,
    sobolev_norm,
)

__all__ = [
    "FAMILIES",
    "Envelope",
    "gaussian_envelope",
    "sech_envelope",
    "WavepacketSpec",
    "WavepacketDiagnostics",
    "WavepacketVerdict",
    "profile",
    "synthesize",
    "closed_form_fourier",
    "classify",
    "wavepacket_verdict",
    "select_grid",
]

FAMILIES = ("envelope-wavepacket", "coherent-state", "radial-chirp", "mono-chirp", "custom")
CHIRPS = ("radial-chirp", "mono-chirp")

Profile = Callable[..., np.ndarray]


@dataclass(frozen=True)
class Envelope:
    """Unit-L2 envelope ``a`` with an optional closed-form transform ``a^``.

    Both callables take one coordinate array per dimension.
    """

    name: str
    dim: int
    profile: Profile
    fourier: Profile | None = None


def gaussian_envelope(dim: int = 1, width: float = 1.0) -> Envelope:
    """``(2/w^2)^{n/4} exp(-pi |x|^2 / w^2)``; ``w = 1`` is the standard pair."""
    w2 = width**2
    c = (2.0 / w2) ** (dim / 4.0)
    ch = (2.0 * w2) ** (dim / 4.0)
    return Envelope(
        "gaussian" if width == 1.0 else f"gaussian(w={width:g})",
        dim,
        lambda *x: c * np.exp(-np.pi * sum(xi**2 for xi in x) / w2),
        lambda *k: ch * np.exp(-np.pi * w2 * sum(ki**2 for ki in k)) + 0j,
    )


def sech_envelope() -> Envelope:
    """``sqrt(pi/2) sech(pi x)``, which is its own Fourier transform."""
    c = np.sqrt(np.pi / 2.0)
    return Envelope("sech", 1, lambda x: c / np.cosh(np.pi * x), lambda k: c / np.cosh(np.pi * k) + 0j)


ENVELOPES = {"gaussian": gaussian_envelope, "sech": lambda dim=1, width=1.0: sech_envelope()}


@dataclass(frozen=True)
class WavepacketSpec:
    family: str
    dim: int = 1
    beta: float = 0.5
    chirp_amplitude: float = 1.0
    chirp_rate: float = 1.0
    position: tuple[float, ...] = (0.0,)
    wavenumber: tuple[float, ...] = (0.0,)
    envelope: Envelope | None = None
    amplitude: Profile | None = None  # custom family only
    phase: Profile | None = None  # custom family only

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        pos = tuple(float(p) for p in np.atleast_1d(self.position))
        wav = tuple(float(v) for v in np.atleast_1d(self.wavenumber))
        if len(pos) == 1 and self.dim == 2:
            pos = pos * 2
        if len(wav) == 1 and self.dim == 2:
            wav = wav * 2
        if len(pos) != self.dim or len(wav) != self.dim:
            raise ValueError("position and wavenumber need one entry per dimension")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "wavenumber", wav)
        if self.family == "coherent-state":
            object.__setattr__(self, "beta", 0.5)
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if not self.chirp_amplitude > 0:
            raise ValueError("chirp amplitude A must be positive")
        if self.family in CHIRPS and self.chirp_rate == 0:
            raise ValueError("chirp rate z must be nonzero")
        if self.family in ("envelope-wavepacket", "coherent-state"):
            env = self.envelope or gaussian_envelope(self.dim)
            if env.dim != self.dim:
                raise ValueError("envelope dimension does not match spec")
            object.__setattr__(self, "envelope", env)
        if self.family == "custom" and self.amplitude is None:
            raise ValueError("custom family needs an amplitude callable")


def _chirp_denominator(spec: WavepacketSpec, eps: float) -> complex:
    return spec.chirp_amplitude + 1j * spec.chirp_rate * eps ** (2 * spec.beta - 1)


def _centered_profile(spec: WavepacketSpec, eps: float, y: Sequence[np.ndarray]) -> np.ndarray:
    n, beta, A, z = spec.dim, spec.beta, spec.chirp_amplitude, spec.chirp_rate
    r2 = sum(c**2 for c in y)
    if spec.family in ("envelope-wavepacket", "coherent-state"):
        s = eps**beta
        return s ** (-n / 2) * spec.envelope.profile(*[c / s for c in y]) + 0j
    if spec.family == "radial-chirp":
        pref = A ** (-n / 4) * (A / eps**beta) ** (n / 2)
        return pref * np.exp(-0.5 * np.pi * (A / eps ** (2 * beta) + 1j * z / eps) * r2)
    if spec.family == "mono-chirp":
        pref = A ** (-n / 4) * (A / eps**beta) ** (n / 2)
        return pref * np.exp(-0.5 * np.pi * (A / eps ** (2 * beta)) * r2 - 0.5j * np.pi * z * y[0] ** 2 / eps)
    amp = spec.amplitude(*y)
    ph = spec.phase(*y) if spec.phase is not None else 0.0
    return amp * np.exp(1j * ph / eps)


def profile(spec: WavepacketSpec, eps: float, coords: Sequence[np.ndarray]) -> np.ndarray:
    """Continuum initial datum evaluated at the given coordinates."""
    y = [c - x0 for c, x0 in zip(coords, spec.position)]
    carrier = sum(k0 * c for k0, c in zip(spec.wavenumber, y))
    return _centered_profile(spec, eps, y) * np.exp(1j * carrier / eps)


def synthesize(
    spec: WavepacketSpec,
    epsilon: float,
    grid: SpatialGrid,
    check: bool = True,
    return_factor: bool = False,
):
    """Sample the family on ``grid`` and renormalize to unit discrete mass.

    With ``check`` the grid must keep the mass inside ``[-L/2, L/2)`` and
    the spectrum inside the inner half band; otherwise a
    :class:`ResolutionError` names the required point count.
    """
    if grid.dim != spec.dim:
        raise ValueError("grid and spec dimensions differ")
    raw = SampledField(grid, profile(spec, epsilon, grid.mesh()), epsilon)
    if check:
        check_resolved(raw)
    factor = 1.0 / np.sqrt(raw.mass)
    out = raw.with_values(raw.values * factor)
    return (out, factor) if return_factor else out


def closed_form_fourier(spec: WavepacketSpec, epsilon: float, k) -> np.ndarray:
    """Exact ``psi^(k)`` including normalization, shift and carrier phases.

    ``k`` is one array per dimension (or a scalar / 1D array when n = 1).
    """
    if spec.family == "custom":
        raise NotImplementedError("custom (WKB) data has no closed-form transform")
    n, beta, A = spec.dim, spec.beta, spec.chirp_amplitude
    kk = [np.asarray(k, dtype=float)] if n == 1 and not isinstance(k, (tuple, list)) else [np.asarray(c, float) for c in k]
    shifted = [kc - k0 / (2 * np.pi * epsilon) for kc, k0 in zip(kk, spec.wavenumber)]
    s = epsilon**beta
    if spec.family in ("envelope-wavepacket", "coherent-state"):
        if spec.envelope.fourier is None:
            raise NotImplementedError(f"envelope {spec.envelope.name!r} has no closed-form transform")
        core = s ** (n / 2) * spec.envelope.fourier(*[c * s for c in shifted])
    else:
        c = _chirp_denominator(spec, epsilon)
        if spec.family == "radial-chirp":
            r2 = sum(q**2 for q in shifted)
            core = A ** (-n / 4) * np.sqrt(2 * A * s / c) ** n * np.exp(-2 * np.pi * s**2 * r2 / c)
        else:
            rest = sum(q**2 for q in shifted[1:]) if n > 1 else 0.0
            core = (
                A ** (-n / 4)
                * s ** (n / 2)
                * np.sqrt(A)
                * 2 ** (n / 2)
                / np.sqrt(c)
                * np.exp(-2 * np.pi * (s**2 * shifted[0] ** 2 / c + s**2 * rest / A))
            )
    phase = sum(kc * x0 for kc, x0 in zip(kk, spec.position))
    return np.exp(-2j * np.pi * phase) * core


@dataclass(frozen=True)
class WavepacketDiagnostics:
    l2_norm: float
    h1_norm: float
    fourier_h1_norm: float
    centered_gradient: float
    centered_spread: float
    a0_norm: float
    centered_gradient_a0: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def classify(field: SampledField, X0=0.0, K0=0.0) -> WavepacketDiagnostics:
    """Definition-level diagnostics of a single field.

    Translation and demodulation do not change the norms below, so the
    centered quantities are evaluated through the equivalent spectral
    weights ``2 pi |k - K0/(2 pi eps)|`` and spatial weights ``|x - X0|``
    (no wraparound from shifting the samples).
    """
    g, eps = field.grid, field.epsilon
    x0 = np.broadcast_to(np.atleast_1d(np.asarray(X0, float)), (g.dim,))
    k0 = np.broadcast_to(np.atleast_1d(np.asarray(K0, float)), (g.dim,))
    carrier = k0 / (2 * np.pi * eps)
    dens = np.abs(field.values) ** 2
    r2 = g.radius_squared()
    spread = np.sqrt(np.sum(sum((c - a) ** 2 for c, a in zip(g.mesh(), x0)) * dens) * g.cell)
    spec = np.abs(forward_transform(field).values)
    kdist = np.sqrt(sum((kc - c) ** 2 for kc, c in zip(g.k_mesh(), carrier)))
    l2 = l2_norm(field)
    return WavepacketDiagnostics(
        l2_norm=l2,
        h1_norm=sobolev_norm(field, 1.0),
        fourier_h1_norm=float(np.sqrt(l2**2 + 4 * np.pi**2 * np.sum(r2 * dens) * g.cell)),
        centered_gradient=gradient_norm(field, carrier),
        centered_spread=float(spread),
        a0_norm=float(spec.sum() * g.spectral_cell),
        centered_gradient_a0=float(2 * np.pi * np.sum(kdist * spec) * g.spectral_cell),
    )


@dataclass(frozen=True)
class WavepacketVerdict:
    gradient_fit: FitResult
    spread_fit: FitResult
    narrowband: bool
    wavepacket: bool

    def summary(self) -> str:
        label = "generalized wavepacket" if self.wavepacket else "not a generalized wavepacket"
        return (
            f"{label}: eps*gradient slope {self.gradient_fit.slope:.3f}, "
            f"spread slope {self.spread_fit.slope:.3f} (threshold {self.gradient_fit.threshold})"
        )


def wavepacket_verdict(
    epsilons: Sequence[float],
    diagnostics: Sequence[WavepacketDiagnostics],
    threshold: float = DEFAULT_SLOPE_THRESHOLD,
) -> WavepacketVerdict:
    """Both eps*||grad|| and the spread must decay for a positive verdict."""
    eps = np.asarray(epsilons, float)
    if eps.size < 4:
        raise ValueError("wavepacket verdict needs at least 4 epsilon values")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("epsilon values must be strictly decreasing")
    grad = eps * np.array([d.centered_gradient for d in diagnostics])
    spread = np.array([d.centered_spread for d in diagnostics])
    gf = fit_decay_exponent(eps, grad, threshold)
    sf = fit_decay_exponent(eps, spread, threshold)
    return WavepacketVerdict(gf, sf, gf.decaying, gf.decaying and sf.decaying)


def _support(marginal: np.ndarray, axis: np.ndarray, tol: float) -> tuple[float, float]:
    c = np.cumsum(marginal)
    c /= c[-1]
    lo = axis[min(np.searchsorted(c, tol), axis.size - 1)]
    hi = axis[min(np.searchsorted(c, 1 - tol), axis.size - 1)]
    return float(lo), float(hi)


def select_grid(
    spec: WavepacketSpec,
    epsilon: float,
    t_end: float = 0.0,
    safety: float = 1.1,
    spectral_safety: float = 1.25,
    max_points: int | None = None,
    min_half_width: float = 1.0,
) -> SpatialGrid:
    """Pick ``(L, N)`` so the data stays resolved under free flow up to ``t_end``.

    The phase-space box containing the datum is sheared by the free flow
    ``x -> x + 4 pi eps p t`` (p in cycles per unit length); L covers the
    union over [0, t_end] with margin and N keeps the spectrum inside the
    inner half band.
    """
    n = spec.dim
    cap = max_points or (2**14 if n == 1 else 2**10)
    half_width, points = 4.0, 256
    for _ in range(40):
        g = make_grid(n, points, half_width)
        raw = SampledField(g, profile(spec, epsilon, g.mesh()), epsilon)
        try:
            check_resolved(raw)
            break
        except ResolutionError as err:
            if err.required_half_width is not None:
                half_width *= 2
                points *= 2
            else:
                points = err.required_points
            if points > cap:
                raise ResolutionError(
                    f"initial datum needs more than {cap} points per axis at eps={epsilon}",
                    required_points=points,
                ) from None
    else:  # pragma: no cover - loop always exits via break or raise
        raise ResolutionError("grid search did not converge")
    dens = np.abs(raw.values) ** 2
    spec_p = np.abs(forward_transform(raw).values) ** 2
    reach, pmax = 0.0, 0.0
    for ax in range(n):
        other = tuple(i for i in range(n) if i != ax)
        xlo, xhi = _support(dens.sum(axis=other) if other else dens, g.x, MARGIN_TOL * 1e-3)
        marg = spec_p.sum(axis=other) if other else spec_p
        plo, phi = _support(marg, g.k, TAIL_TOL)
        # the shear only needs the bulk of the spectrum, not its far tail
        qlo, qhi = _support(marg, g.k, MARGIN_TOL * 1e-3)
        drift = 4 * np.pi * epsilon * t_end
        reach = max(reach, abs(xlo), abs(xhi), abs(xlo + drift * qlo), abs(xhi + drift * qhi))
        pmax = max(pmax, abs(plo), abs(phi))
    L = max(min_half_width, np.ceil(4 * reach * safety) / 2)
    N = max(64, next_power_of_two(8 * L * pmax * spectral_safety))
    if N > cap:
        raise ResolutionError(f"eps={epsilon}: required N={N} exceeds cap {cap}", required_points=N)
    return make_grid(n, N, L)
