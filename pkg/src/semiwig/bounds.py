"""Inequality helpers: Gronwall-type lemmas, the Gagliardo-Nirenberg
constant, the energy-based kinetic bound and the Wiener-algebra growth
check.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import SolverError

__all__ = [
    "gronwall_bound",
    "bootstrap_bound",
    "nonlinear_gronwall_bound",
    "GNEstimate",
    "gn_constant_estimate",
    "gn_ratio",
    "KineticBound",
    "kinetic_bound",
    "focusing_guard",
    "WienerGrowth",
    "wiener_growth_check",
]


def gronwall_bound(g_sup: float, h_sup: float, t: float) -> float:
    """``f <= g + int h f`` implies ``|f(t)| <= sup g (1 + t sup h e^{t sup h})``."""
    if h_sup < 0 or t < 0:
        raise ValueError("h and t must be non-negative")
    return g_sup * (1.0 + t * h_sup * np.exp(t * h_sup))


def bootstrap_bound(A: float, B: float, theta: float, m0: float | None = None) -> float | None:
    """Bootstrap for ``M <= A + B M^theta`` (theta > 1).

    Returns ``theta A / (theta - 1)`` when the smallness conditions hold
    (``A`` below the threshold and, if given, ``M(0) <= (theta B)^{1/(1-theta)}``),
    otherwise ``None``.
    """
    if theta <= 1 or A <= 0 or B <= 0:
        raise ValueError("need theta > 1 and positive A, B")
    barrier = (theta * B) ** (1.0 / (1.0 - theta))
    if A >= (theta - 1) / theta * barrier:
        return None
    if m0 is not None and m0 > barrier:
        return None
    return theta * A / (theta - 1)


def nonlinear_gronwall_bound(f0: float, B: float, theta: float, T: float) -> float | None:
    """``f <= f0 + B int f^theta`` on ``[0, T]`` gives ``f <= theta f0/(theta - 1)``
    provided ``B f0^{theta-1} <= 1/(theta T)``; ``None`` otherwise."""
    if theta <= 1 or B <= 0 or T <= 0 or f0 <= 0:
        raise ValueError("need theta > 1 and positive f0, B, T")
    if B * f0 ** (theta - 1) > 1.0 / (theta * T):
        return None
    return theta * f0 / (theta - 1)


# --- Gagliardo-Nirenberg -----------------------------------------------------


def _radial_moments(f, df, n: int, rmax: float, points: int):
    """Radial quadrature nodes plus ``||f||_2^2`` and ``||grad f||_2^2``."""
    r = np.linspace(0.0, rmax, points)
    w = r ** (n - 1)
    surface = 2.0 if n == 1 else 2 * np.pi ** (n / 2) / math.gamma(n / 2)
    fr, dfr = f(r), df(r)
    mass = surface * np.trapezoid(fr**2 * w, r)
    grad = surface * np.trapezoid(dfr**2 * w, r)
    return r, w, surface, fr, mass, grad


def gn_ratio(f, df, n: int, sigma: float, rmax: float, points: int = 4001) -> float:
    """``||f||_{2s+2}^{2s+2} / ||grad f||^{n s}`` for an L2-normalized radial profile."""
    r, w, surface, fr, mass, grad = _radial_moments(f, df, n, rmax, points)
    p = 2 * sigma + 2
    # normalize f -> f / sqrt(mass)
    lp = surface * np.trapezoid(np.abs(fr) ** p * w, r) / mass ** (p / 2)
    return float(lp / (grad / mass) ** (n * sigma / 2))


def _sech_power(p: float):
    f = lambda r: np.cosh(r) ** (-p)
    df = lambda r: -p * np.cosh(r) ** (-p) * np.tanh(r)
    return f, df


def _gaussian():
    return (lambda r: np.exp(-(r**2))), (lambda r: -2 * r * np.exp(-(r**2)))


@dataclass(frozen=True)
class GNEstimate:
    """Best Gagliardo-Nirenberg ratio over Gaussians and ``sech^p`` profiles.

    The ratio is invariant under L2-preserving dilations ``lam^{n/2} f(lam x)``
    for every sigma, so the scale ``lam`` is not an optimization variable:
    ``optimal_scale`` is reported as 1 and ``scale_defect`` records the
    measured relative change of the ratio at ``lam = 2``.
    """

    n: int
    sigma: float
    value: float
    family: str
    power: float
    optimal_scale: float
    gaussian: float
    sech: float
    scale_defect: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@functools.lru_cache(maxsize=64)
def gn_constant_estimate(n: int, sigma: float, points: int = 4001) -> GNEstimate:
    """Lower bound for ``C_* = sup ||f||_{2s+2}^{2s+2} / ||grad f||^{n s}`` (``||f||_2 = 1``).

    Evaluates Gaussians and maximizes over the power in ``sech^p(r)``.
    For n = 1 the maximizer is ``sech^{1/sigma}`` (the ground-state
    soliton); for sigma = 1 that gives ``1/sqrt(3)``.
    """
    if n not in (1, 2, 3):
        raise ValueError("n must be 1, 2 or 3")
    if not sigma > 0 or (n > 2 and sigma >= 2 / (n - 2)):
        raise ValueError("sigma outside the energy-subcritical range")
    gf, gdf = _gaussian()
    gauss = gn_ratio(gf, gdf, n, sigma, 12.0, points)

    def neg(p):
        f, df = _sech_power(p)
        return -gn_ratio(f, df, n, sigma, 60.0 / p + 10.0, points)

    res = optimize.minimize_scalar(neg, bounds=(0.05, 8.0), method="bounded", options={"xatol": 1e-6})
    if not res.success:
        raise SolverError(f"GN optimization did not converge: {res.message}")
    sech = -float(res.fun)
    best, fam = (sech, "sech-power") if sech >= gauss else (gauss, "gaussian")
    # dilation check on the Gaussian: f(2 r) has the same ratio
    lam = 2.0
    dil = gn_ratio(lambda r: gf(lam * r), lambda r: lam * gdf(lam * r), n, sigma, 12.0 / lam, points)
    return GNEstimate(n, float(sigma), best, fam, float(res.x), 1.0, gauss, sech, abs(dil / gauss - 1))


# --- energy chain ------------------------------------------------------------


@dataclass(frozen=True)
class KineticBound:
    """Upper bound for ``sup_t eps ||grad psi(t)||`` from energy conservation."""

    value: float
    regime: str
    energy: float
    kappa: float  # contraction factor in the focusing chain (0 for defocusing)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def kinetic_bound(params, field, gn_constant: float | None = None) -> KineticBound:
    """Bound on ``eps ||grad psi(t)||_{L2}`` valid for all t.

    Defocusing: the potential is non-negative, so ``eps^2 ||grad psi||^2 <= E``.
    Focusing (mass-subcritical, ``theta = n sigma/2 <= 1``): GN gives
    ``K <= E + a K^theta`` with ``a = |b| eps^{-n sigma} C_* m^{(2 sigma + 2 - n sigma)/2}/(sigma + 1)``;
    Young's inequality ``K^theta <= theta K + 1 - theta`` then yields
    ``K <= (E + a (1 - theta)) / (1 - a theta)`` whenever ``a theta < 1``.
    """
    from .dynamics import energy

    E, kin, _ = energy(params, field)
    if not params.focusing:
        return KineticBound(float(np.sqrt(max(E, 0.0))), "defocusing", E, 0.0)
    n, s, eps = field.grid.dim, params.sigma, params.epsilon
    theta = n * s / 2
    if theta > 1:
        return KineticBound(float("inf"), "focusing-supercritical", E, float("inf"))
    C = gn_constant if gn_constant is not None else gn_constant_estimate(n, s).value
    m = field.mass
    a = abs(params.b) * eps ** (-n * s) * C * m ** ((2 * s + 2 - n * s) / 2) / (s + 1)
    kappa = a * theta
    if kappa >= 1:
        return KineticBound(float("inf"), "focusing-large", E, kappa)
    K = (E + a * (1 - theta)) / (1 - kappa)
    return KineticBound(float(np.sqrt(max(K, kin))), "focusing", E, kappa)


def focusing_guard(params, field, gn_constant: float | None = None) -> bool:
    """Check the focusing smallness condition ``|b|/eps^{n sigma} < 2/((sigma+1) n sigma C_*)``.

    Warns (rather than raising) when it fails so that blow-up runs remain
    possible; returns whether it holds.
    """
    if not params.focusing:
        return True
    n, s = field.grid.dim, params.sigma
    if s > 2 / n:
        warnings.warn("focusing nonlinearity is mass-supercritical", stacklevel=2)
        return False
    C = gn_constant if gn_constant is not None else gn_constant_estimate(n, s).value
    lhs = abs(params.b) / params.epsilon ** (n * s)
    rhs = 2.0 / ((s + 1) * n * s * C)
    if lhs >= rhs:
        warnings.warn(
            f"focusing coupling |b|/eps^(n sigma) = {lhs:.3g} exceeds the GN threshold {rhs:.3g}",
            stacklevel=2,
        )
        return False
    return True


# --- Wiener algebra growth ---------------------------------------------------


@dataclass(frozen=True)
class WienerGrowth:
    condition: float  # |b| ||psi0||_{A^0}^{2 sigma}
    allowed: float  # eps / ((2 sigma + 1) T)
    applies: bool
    bound: float  # (1 + 1/(2 sigma)) ||psi0||_{A^0}
    norms: np.ndarray
    violations: int

    @property
    def max_ratio(self) -> float:
        return float(self.norms.max() / self.norms[0])

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "allowed": self.allowed,
            "applies": self.applies,
            "bound": self.bound,
            "max_ratio": self.max_ratio,
            "violations": self.violations,
        }


def wiener_growth_check(traj, T: float | None = None) -> WienerGrowth:
    """Compare ``||psi(t)||_{A^0}`` on every frame with ``(1 + 1/(2 sigma)) ||psi_0||_{A^0}``."""
    from .norms import a_s_norm

    p = traj.params
    T = float(abs(traj.times[-1])) if T is None else T
    norms = np.array([a_s_norm(f, 0) for f in traj.frames])
    cond = abs(p.b) * norms[0] ** (2 * p.sigma)
    allowed = p.epsilon / ((2 * p.sigma + 1) * T)
    bound = (1 + 1 / (2 * p.sigma)) * norms[0]
    return WienerGrowth(cond, allowed, cond <= allowed, bound, norms, int(np.sum(norms > bound)))
