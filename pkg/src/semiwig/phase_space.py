"""Wigner transform on a 1D grid, its phase-space Fourier transform, free
transport, and residuals of the Wigner equations.

Discretization
--------------
For a field on ``x_j = -L + j dx`` we sample the correlation

    C(x, y) = psi(x + eps y/2) conj(psi(x - eps y/2))

on ``y = (j - N/2) dx/eps``, so the half offsets ``eps y/2`` are
multiples of ``dx/2``.  Even multiples are index rolls; odd multiples
use one band-limited half-cell shift of the field.  Then

* ``W(x, k)  = F_{y->k} C``      (k spacing ``eps/(2L)``)
* ``W^(X, K) = F_{x->X} C(x, -K)`` (X the spatial wavenumber grid,
  K spacing ``dx/eps``)

Both are exact samples of the continuum objects when psi vanishes
outside ``[-L/2, L/2)`` and its spectrum sits in the inner half band.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import GridError
from .grid import Axis, SampledField, axis_transform, check_resolved, gradient_norm, spectral_shift, TAIL_TOL

__all__ = [
    "WignerField",
    "FourierWigner",
    "correlation",
    "wigner_transform",
    "fourier_wigner",
    "phase_space_fourier",
    "phase_space_inverse",
    "free_transport",
    "fourier_free_transport",
    "delta_distance",
    "transport_mismatch",
    "wigner_equation_residual",
    "transport_weight_ratio",
    "fourier_wigner_derivatives",
    "write_raster_csv",
]


@dataclass(frozen=True, eq=False)
class WignerField:
    """Phase-space function sampled on ``x_axis x k_axis`` (index order [x, k])."""

    x_axis: Axis
    k_axis: Axis
    values: np.ndarray = dc_field(repr=False)
    epsilon: float = 1.0
    imag_residue: float = 0.0

    @property
    def x(self) -> np.ndarray:
        return self.x_axis.values

    @property
    def k(self) -> np.ndarray:
        return self.k_axis.values

    @property
    def cell(self) -> float:
        return self.x_axis.step * self.k_axis.step

    def with_values(self, values) -> "WignerField":
        return WignerField(self.x_axis, self.k_axis, values, self.epsilon)


@dataclass(frozen=True, eq=False)
class FourierWigner:
    """``W^(X, K)`` on the dual axes (index order [X, K])."""

    X_axis: Axis
    K_axis: Axis
    values: np.ndarray = dc_field(repr=False)
    epsilon: float = 1.0

    @property
    def X(self) -> np.ndarray:
        return self.X_axis.values

    @property
    def K(self) -> np.ndarray:
        return self.K_axis.values

    @property
    def cell(self) -> float:
        return self.X_axis.step * self.K_axis.step

    def weight(self, s: float) -> np.ndarray:
        return (1.0 + np.abs(self.X)[:, None] + np.abs(self.K)[None, :]) ** s

    def with_values(self, values) -> "FourierWigner":
        return FourierWigner(self.X_axis, self.K_axis, values, self.epsilon)


def _require_1d(field: SampledField):
    if field.grid.dim != 1:
        raise GridError("phase-space tools support n = 1 only")


def _shifted_pair(field: SampledField) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``psi(x_i + s_j)`` and ``psi(x_i - s_j)`` with ``s_j = (j - N/2) dx/2``."""
    g = field.grid
    n = g.points
    psi = np.asarray(field.values)
    half = np.asarray(spectral_shift(field, -0.5 * g.dx).values)  # psi(x + dx/2)
    m = np.arange(n) - n // 2
    q = np.floor_divide(m, 2)
    odd = (m % 2).astype(bool)
    i = np.arange(n)[:, None]
    plus = (i + q[None, :]) % n
    minus = (i - q[None, :] - odd[None, :]) % n
    a = np.where(odd[None, :], half[plus], psi[plus])
    b = np.where(odd[None, :], half[minus], psi[minus])
    return a, b


def _y_axis(field: SampledField) -> Axis:
    g = field.grid
    dy = g.dx / field.epsilon
    return Axis(-(g.points // 2) * dy, dy, g.points)


def correlation(field: SampledField) -> tuple[np.ndarray, Axis]:
    """``C[x_i, y_j]`` and the y axis."""
    _require_1d(field)
    a, b = _shifted_pair(field)
    return a * np.conj(b), _y_axis(field)


def wigner_transform(field: SampledField, check: bool = True) -> WignerField:
    if check:
        _require_1d(field)
        check_resolved(field, tail_tol=TAIL_TOL * 1e6)
    c, y_axis = correlation(field)
    w = axis_transform(c, 1, y_axis)
    return WignerField(field.grid.axis, y_axis.dual(), w.real.copy(), field.epsilon, float(np.abs(w.imag).max()))


def _k_to_minus_k(arr: np.ndarray) -> np.ndarray:
    """Reindex columns from y_j to -y_j (centered grid, j=0 wraps to itself)."""
    n = arr.shape[1]
    return arr[:, (n - np.arange(n)) % n]


def fourier_wigner(field: SampledField, check: bool = True) -> FourierWigner:
    """``W^(X, K) = int exp(-2 pi i x X) psi(x - eps K/2) conj(psi(x + eps K/2)) dx``."""
    if check:
        _require_1d(field)
        check_resolved(field, tail_tol=TAIL_TOL * 1e6)
    c, y_axis = correlation(field)
    x_axis = field.grid.axis
    vals = axis_transform(_k_to_minus_k(c), 0, x_axis)
    return FourierWigner(x_axis.dual(), y_axis, vals, field.epsilon)


def phase_space_fourier(w: WignerField) -> FourierWigner:
    """Full transform ``(x, k) -> (X, K)``."""
    v = axis_transform(axis_transform(np.asarray(w.values, complex), 0, w.x_axis), 1, w.k_axis)
    return FourierWigner(w.x_axis.dual(), w.k_axis.dual(), v, w.epsilon)


def phase_space_inverse(wh: FourierWigner, x_axis: Axis, k_axis: Axis) -> WignerField:
    if x_axis.dual() != wh.X_axis or k_axis.dual() != wh.K_axis:
        raise GridError("axes are not dual to the spectrum axes")
    v = axis_transform(axis_transform(wh.values, 0, x_axis, inverse=True), 1, k_axis, inverse=True)
    return WignerField(x_axis, k_axis, v, wh.epsilon, float(np.abs(v.imag).max()))


def _occupied(values: np.ndarray, axis: int, tol: float = 1e-12) -> np.ndarray:
    energy = np.sum(np.abs(values) ** 2, axis=axis)
    return energy > tol * energy.max() if energy.max() > 0 else np.zeros_like(energy, bool)


def free_transport(w: WignerField, t: float, check: bool = True) -> WignerField:
    """``(T(t) f)(x, k) = f(x - 4 pi k t, k)`` by per-k spectral shifts in x."""
    if t == 0:
        return w
    shift = 4 * np.pi * w.k * t
    if check:
        occ = _occupied(w.values, 0)
        if occ.any() and np.abs(shift[occ]).max() >= w.x_axis.extent / 2:
            raise GridError("free-transport shear exceeds the spatial half domain")
    X = w.x_axis.dual().values
    spec = axis_transform(np.asarray(w.values, complex), 0, w.x_axis)
    spec *= np.exp(-2j * np.pi * X[:, None] * shift[None, :])
    out = axis_transform(spec, 0, w.x_axis, inverse=True)
    real = np.isrealobj(w.values) or not np.iscomplexobj(w.values)
    return WignerField(w.x_axis, w.k_axis, out.real.copy() if real else out, w.epsilon)


def fourier_free_transport(wh: FourierWigner, t: float, check: bool = True) -> FourierWigner:
    """``W^(X, K + 4 pi X t)``, the Fourier image of :func:`free_transport`.

    Band-limited interpolation in K (multiplication by a phase on the
    dual k grid); shifts that are whole K cells reduce to exact rolls.
    """
    if t == 0:
        return wh
    shift = 4 * np.pi * wh.X * t
    if check:
        occ = _occupied(wh.values, 1)
        if occ.any() and np.abs(shift[occ]).max() >= wh.K_axis.extent / 2:
            raise GridError("Fourier-side shear exceeds the K window")
    k_axis = wh.K_axis.dual()
    k = k_axis.values
    # values over K are the transform of a function of k on k_axis
    # (the dual of the dual axis is the axis itself for centered grids)
    f = axis_transform(wh.values, 1, k_axis, inverse=True)
    f *= np.exp(-2j * np.pi * shift[:, None] * k[None, :])
    return wh.with_values(axis_transform(f, 1, k_axis))


def delta_distance(wh: FourierWigner, X0: float = 0.0, K0: float = 0.0, s: float = 1.0) -> float:
    """Weighted sup distance between ``W^`` and the transform of ``delta(X0, K0/(2 pi))``."""
    k0 = K0 / (2 * np.pi)
    target = np.exp(-2j * np.pi * (wh.X[:, None] * X0 + wh.K[None, :] * k0))
    return float(np.max(np.abs(wh.values - target) / wh.weight(s)))


def transport_mismatch(
    evolved: SampledField,
    initial: SampledField,
    t: float,
    s: float = 0.0,
    method: str = "exact",
) -> float:
    """Weighted sup distance between ``W^[psi(t)]`` and ``T^(t) W^[psi_0]``.

    ``method="exact"`` uses ``T(t) W[psi_0] = W[free_propagate(psi_0, t)]``,
    which avoids K wraparound; ``"shear"`` reindexes ``W^[psi_0]`` with
    :func:`fourier_free_transport`.
    """
    if evolved.grid != initial.grid or evolved.epsilon != initial.epsilon:
        raise GridError("evolved and initial fields must share grid and epsilon")
    a = fourier_wigner(evolved)
    if method == "exact":
        from .dynamics import free_propagate

        b = fourier_wigner(free_propagate(initial, t))
    elif method == "shear":
        b = fourier_free_transport(fourier_wigner(initial), t)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(np.max(np.abs(a.values - b.values) / a.weight(s)))


def _time_derivative(fm, f0, fp, tm, t0, tp):
    hm, hp = t0 - tm, tp - t0
    return (-hp / (hm * (hm + hp))) * fm + ((hp - hm) / (hm * hp)) * f0 + (hm / (hp * (hm + hp))) * fp


def _spectral_derivative(arr: np.ndarray, ax: int, axis: Axis) -> np.ndarray:
    dual = axis.dual().values
    shape = [1, 1]
    shape[ax] = dual.size
    spec = axis_transform(arr, ax, axis)
    return axis_transform(2j * np.pi * dual.reshape(shape) * spec, ax, axis, inverse=True)


def _fl_inf_x(arr: np.ndarray, x_axis: Axis) -> float:
    """sup |F_x arr| for arrays already on the Fourier side in the second index."""
    return float(np.abs(axis_transform(arr, 0, x_axis)).max())


def wigner_equation_residual(traj, frame_index: int, form: str = "eq3", potential_sign: float = 1.0) -> float:
    """Relative FL-infinity residual of the nonlinear Wigner equation.

    ``eq1`` (physical phase space):
        W_t + 4 pi k W_x - (i b/eps) int e^{2 pi i S x} V^(S)
              [W(x, k + eps S/2) - W(x, k - eps S/2)] dS = 0
    ``eq3`` (Fourier in k, ``W2(x, K) = F_{k->K} W``):
        W2_t + 2i d_x d_K W2 - (i b/eps) [V(x + eps K/2) - V(x - eps K/2)] W2 = 0

    with ``V = |psi|^{2 sigma}`` from the middle frame.  The time derivative is
    a three-point difference across frames.  Returns the FL-infinity norm of
    the residual divided by the largest FL-infinity norm among the terms.
    ``potential_sign=-1`` flips the potential term (useful to confirm the
    sign is pinned down by the data).
    """
    frames, times = traj.frames, traj.times
    if frame_index < 1 or frame_index + 1 >= len(frames):
        raise ValueError("need a frame with neighbours on both sides")
    f0 = frames[frame_index]
    _require_1d(f0)
    p = traj.params
    eps, b, sig = p.epsilon, p.b, p.sigma
    tm, t0, tp = times[frame_index - 1 : frame_index + 2]
    x_axis = f0.grid.axis
    if form == "eq3":
        w2 = [_k_to_minus_k(correlation(f)[0]) for f in frames[frame_index - 1 : frame_index + 2]]
        K_axis = _y_axis(f0)
        dt_term = _time_derivative(*w2, tm, t0, tp)
        mixed = 2j * _spectral_derivative(_spectral_derivative(w2[1], 1, K_axis), 0, x_axis)
        a, bb = _shifted_pair(f0)
        # after the K -> -K relabel, a = psi(x - eps K/2) and bb = psi(x + eps K/2)
        vplus = _k_to_minus_k(np.abs(bb) ** (2 * sig))
        vminus = _k_to_minus_k(np.abs(a) ** (2 * sig))
        pot = -potential_sign * (1j * b / eps) * (vplus - vminus) * w2[1]
        terms = (dt_term, mixed, pot)
        norms = [_fl_inf_x(t_, x_axis) for t_ in terms]
        return _fl_inf_x(sum(terms), x_axis) / max(norms)
    if form == "eq1":
        ws = [wigner_transform(f, check=False) for f in frames[frame_index - 1 : frame_index + 2]]
        w0 = ws[1]
        kax = w0.k_axis
        n = kax.size
        dt_term = _time_derivative(*[w.values for w in ws], tm, t0, tp)
        adv = 4 * np.pi * w0.k[None, :] * _spectral_derivative(w0.values.astype(complex), 0, x_axis).real
        pot = np.zeros_like(w0.values, dtype=complex)
        if b != 0:
            # zero-pad in k so that k +- eps S/2 never wraps
            pad_axis = Axis(kax.start - (n // 2) * kax.step, kax.step, 2 * n)
            padded = np.zeros((n, 2 * n), dtype=complex)
            padded[:, n // 2 : n // 2 + n] = w0.values
            spec_k = axis_transform(padded, 1, pad_axis)
            Kp = pad_axis.dual().values
            g = f0.grid
            V = np.abs(np.asarray(f0.values)) ** (2 * sig)
            Vh = axis_transform(V.astype(complex), 0, x_axis)
            S = g.k
            keep = np.abs(Vh) > 1e-13 * np.abs(Vh).max()
            x = g.x
            for Si, Vs in zip(S[keep], Vh[keep]):
                diff = 2j * np.sin(np.pi * eps * Si * Kp)[None, :] * spec_k
                shifted = axis_transform(diff, 1, pad_axis, inverse=True)[:, n // 2 : n // 2 + n]
                pot += np.exp(2j * np.pi * Si * x)[:, None] * Vs * g.dk * shifted
            pot *= -potential_sign * (1j * b / eps)
        terms = (dt_term, adv, pot)
        full = lambda arr: float(np.abs(phase_space_fourier(w0.with_values(arr)).values).max())
        norms = [full(t_) for t_ in terms]
        return full(sum(terms)) / max(norms)
    raise ValueError(f"unknown form {form!r}")


def transport_weight_ratio(x, k, t):
    """``(1 + x^2 + k^2) / (1 + x^2 + (k - 4 pi x t)^2)``; lies in ``[1/c, c]`` with ``c = 2 + (4 pi t)^2``."""
    x, k = np.asarray(x, float), np.asarray(k, float)
    return (1 + x**2 + k**2) / (1 + x**2 + (k - 4 * np.pi * x * t) ** 2)


def fourier_wigner_derivatives(wh: FourierWigner, field: SampledField) -> dict:
    """Grid derivatives of ``W^`` next to the bounds ``eps||grad u|| ||u||`` and ``2 pi ||u|| ||x u||``.

    Differentiating ``exp(-2 pi i x X)`` brings down ``-2 pi i x``, hence the
    ``2 pi`` in the X bound (the K derivative carries none because the
    shifts are ``eps K/2``).
    """
    dK = np.gradient(wh.values, wh.K_axis.step, axis=1)
    dX = np.gradient(wh.values, wh.X_axis.step, axis=0)
    u = np.sqrt(field.mass)
    xu = np.sqrt(np.sum(field.grid.x**2 * np.abs(field.values) ** 2) * field.grid.dx)
    return {
        "max_dK": float(np.abs(dK).max()),
        "bound_dK": field.epsilon * gradient_norm(field) * u,
        "max_dX": float(np.abs(dX).max()),
        "bound_dX": 2 * np.pi * u * xu,
    }


def write_raster_csv(obj, path) -> None:
    """Long-format raster: ``x,k,value`` (or ``X,K,re,im`` for spectra)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(obj, WignerField):
            w.writerow(["x", "k", "W"])
            for i, xi in enumerate(obj.x):
                for j, kj in enumerate(obj.k):
                    w.writerow([repr(float(xi)), repr(float(kj)), repr(float(np.real(obj.values[i, j])))])
        else:
            w.writerow(["X", "K", "re", "im"])
            for i, Xi in enumerate(obj.X):
                for j, Kj in enumerate(obj.K):
                    v = obj.values[i, j]
                    w.writerow([repr(float(Xi)), repr(float(Kj)), repr(float(v.real)), repr(float(v.imag))])
