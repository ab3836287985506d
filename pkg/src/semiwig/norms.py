"""Wiener-Sobolev norms on fields over R^n and on phase-space functions.

All norms are Fourier-side Riemann sums:

* ``A^s``:  sum (1 + |y|)^s |f^(y)| dy  (phase space: weight (1+|X|+|K|)^s)
* ``FL^inf``:  sup |f^|
* ``A^{-s}``:  sup |f^| / weight^s   (dual of A^s)
* Lions-Paul:  int_K sup_x |F_{k->K} phi(x, K)| dK
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .grid import Axis, SampledField, axis_transform, forward_transform
from .phase_space import FourierWigner, WignerField, phase_space_fourier

__all__ = [
    "NormReport",
    "a_s_norm",
    "fl_inf_norm",
    "a_minus_s_norm",
    "lions_paul_norm",
    "h1_norm",
    "l2_norm",
    "tail_fraction",
    "norm_report",
    "algebra_defect",
    "phase_space_gaussian",
    "gaussian_a1_exponent",
]


def _spectrum(f):
    """(|f^|, |y|-like weight base, cell) for any supported input."""
    if isinstance(f, SampledField):
        g = f.grid
        spec = np.abs(forward_transform(f).values)
        return spec, np.sqrt(g.k_squared()), g.spectral_cell
    if isinstance(f, WignerField):
        f = phase_space_fourier(f)
    if isinstance(f, FourierWigner):
        base = np.abs(f.X)[:, None] + np.abs(f.K)[None, :]
        return np.abs(f.values), base, f.cell
    raise TypeError(f"unsupported input {type(f).__name__}")


def a_s_norm(f, s: float) -> float:
    if s < 0:
        raise ValueError("use a_minus_s_norm for negative s")
    spec, base, cell = _spectrum(f)
    return float(np.sum((1.0 + base) ** s * spec) * cell)


def fl_inf_norm(f) -> float:
    return float(_spectrum(f)[0].max())


def a_minus_s_norm(f, s: float) -> float:
    spec, base, _ = _spectrum(f)
    return float(np.max(spec / (1.0 + base) ** s))


def lions_paul_norm(phi: WignerField) -> float:
    """``||F_{k->K} phi||_{L^1_K L^inf_x}``."""
    if not isinstance(phi, WignerField):
        raise TypeError("the Lions-Paul norm is defined on phase-space functions")
    partial = axis_transform(np.asarray(phi.values, complex), 1, phi.k_axis)
    return float(np.abs(partial).max(axis=0).sum() * phi.k_axis.dual().step)


def h1_norm(f) -> float:
    """H^1 with weight (1 + 4 pi^2 |y|^2) on the squared spectrum."""
    spec, _, cell = _spectrum(f)
    if isinstance(f, SampledField):
        y2 = f.grid.k_squared()
    else:
        fw = f if isinstance(f, FourierWigner) else phase_space_fourier(f)
        y2 = fw.X[:, None] ** 2 + fw.K[None, :] ** 2
    return float(np.sqrt(np.sum((1 + 4 * np.pi**2 * y2) * spec**2) * cell))


def l2_norm(f) -> float:
    spec, _, cell = _spectrum(f)
    return float(np.sqrt(np.sum(spec**2) * cell))


def tail_fraction(f, outer: float = 0.1) -> float:
    """Share of the spectral L1 mass in the outer ``outer`` fraction of each axis."""
    spec, _, _ = _spectrum(f)
    mask = np.zeros(spec.shape, bool)
    for ax, n in enumerate(spec.shape):
        edge = max(1, int(round(outer * n / 2)))
        idx = np.r_[0:edge, n - edge : n]
        sl = [slice(None)] * spec.ndim
        sl[ax] = idx
        mask[tuple(sl)] = True
    total = spec.sum()
    return float(spec[mask].sum() / total) if total > 0 else 0.0


@dataclass(frozen=True)
class NormReport:
    a0: float
    a1: float
    a_minus_1: float
    fl_inf: float
    lions_paul_A: float
    h1: float
    l2: float
    tail: float

    def chain_holds(self, slack: float = 1e-9) -> bool:
        lp = self.lions_paul_A if np.isfinite(self.lions_paul_A) else -np.inf
        return lp <= self.a0 * (1 + slack) + slack and self.a0 <= self.a1 * (1 + slack) + slack

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def norm_report(f) -> NormReport:
    lp = lions_paul_norm(f) if isinstance(f, WignerField) else float("nan")
    fw = phase_space_fourier(f) if isinstance(f, WignerField) else f
    return NormReport(
        a0=a_s_norm(fw, 0),
        a1=a_s_norm(fw, 1),
        a_minus_1=a_minus_s_norm(fw, 1),
        fl_inf=fl_inf_norm(fw),
        lions_paul_A=lp,
        h1=h1_norm(fw),
        l2=l2_norm(fw),
        tail=tail_fraction(fw),
    )


def _product(f, g):
    if isinstance(f, SampledField) and isinstance(g, SampledField):
        if f.grid != g.grid:
            raise GridError("fields live on different grids")
        return f.with_values(f.values * g.values)
    if isinstance(f, WignerField) and isinstance(g, WignerField):
        if f.x_axis != g.x_axis or f.k_axis != g.k_axis:
            raise GridError("phase-space functions live on different grids")
        return f.with_values(np.asarray(f.values) * np.asarray(g.values))
    raise TypeError("algebra_defect needs two fields or two phase-space functions of the same kind")


def algebra_defect(f, g, s: int = 0) -> float:
    """``||fg||_{A^s}`` minus the almost-algebra bound (s in {0, 1}).

    Non-positive up to round-off whenever the bound holds.
    """
    fg = _product(f, g)
    if s == 0:
        bound = a_s_norm(f, 0) * a_s_norm(g, 0)
    elif s == 1:
        bound = a_s_norm(f, 1) * a_s_norm(g, 0) + a_s_norm(f, 0) * a_s_norm(g, 1)
    else:
        raise NotImplementedError("the almost-algebra constant is only implemented for s in {0, 1}")
    return a_s_norm(fg, s) - bound


def phase_space_gaussian(R: float, x_axis: Axis, k_axis: Axis) -> WignerField:
    """``exp(-pi R (x^2 + k^2))``."""
    x, k = x_axis.values, k_axis.values
    return WignerField(x_axis, k_axis, np.exp(-np.pi * R * (x[:, None] ** 2 + k[None, :] ** 2)))


def gaussian_a1_exponent(radii=(1e-3, 2e-3, 4e-3, 8e-3), points: int = 512) -> dict:
    """Fit ``||phi_R||_{A^1} - 1 ~ C R^p`` for small R.

    The closed form for n = 1 is ``1 + 2 sqrt(R)/pi`` (so p = 1/2); the fit
    is reported alongside rather than asserted.
    """
    a1, a0 = [], []
    for R in radii:
        half = 8.0 / np.sqrt(R)
        ax = Axis(-half, 2 * half / points, points)
        phi = phase_space_gaussian(R, ax, ax)
        a1.append(a_s_norm(phi, 1))
        a0.append(a_s_norm(phi, 0))
    vals = np.array(a1)
    slope, intercept = np.polyfit(np.log(radii), np.log(vals - 1), 1)
    return {
        "radii": list(radii),
        "a1": vals.tolist(),
        "a0": a0,
        "fitted_exponent": float(slope),
        "constant": float(np.exp(intercept)),
        "closed_form": [1 + 2 * np.sqrt(R) / np.pi for R in radii],
    }
