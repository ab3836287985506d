"""Experiment configuration in INI form.

Example::

    [regime]
    n = 1
    sigma = 1
    coefficient = 1.0
    exponent = 1.5
    focusing = true

    [initial]
    family = coherent-state
    envelope = gaussian
    envelope_width = 3.5449077018
    position = 0.0
    wavenumber = 0.5

    [run]
    epsilons = 0.2, 0.1, 0.05, 0.025
    t_end = 1.0
    dt = auto
    frames = 20
    metrics = delta_distance_s1, transport_mismatch_s0

The ``custom`` family reads ``amplitude_width`` (a centered Gaussian
amplitude of that width) and ``phase_poly = c0, c1, c2, ...`` giving
``S(y) = sum_j sum_i c_i y_j^i``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import ConfigError
from .fitting import DEFAULT_SLOPE_THRESHOLD
from .initial_data import FAMILIES, WavepacketSpec, gaussian_envelope, sech_envelope

__all__ = ["METRICS", "RegimeConfig", "load_config", "parse_config"]

METRICS = (
    "delta_distance_s0",
    "delta_distance_s1",
    "transport_mismatch_s0",
    "transport_mismatch_s1",
    "a0_growth",
    "kinetic_bound",
    "narrowband_persistence",
    "moment_drift",
)

_SECTIONS = {
    "regime": ("n", "sigma", "coefficient", "exponent", "focusing"),
    "initial": (
        "family",
        "beta",
        "chirp_amplitude",
        "chirp_rate",
        "position",
        "wavenumber",
        "envelope",
        "envelope_width",
        "amplitude_width",
        "phase_poly",
    ),
    "run": (
        "epsilons",
        "t_end",
        "dt",
        "safety",
        "frame_stride",
        "frames",
        "metrics",
        "threshold",
        "bounded_cap",
        "max_points",
    ),
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


@dataclass(frozen=True)
class RegimeConfig:
    """One experiment: equation, coupling schedule ``b = +-c eps^gamma``, data and run policy.

    Plain data only, so configs pickle cleanly into worker processes.
    """

    n: int = 1
    sigma: float = 1.0
    coefficient: float = 1.0
    exponent: float = 1.5
    focusing: bool = False
    epsilons: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    family: str = "coherent-state"
    beta: float = 0.5
    chirp_amplitude: float = 1.0
    chirp_rate: float = 1.0
    position: tuple[float, ...] = (0.0,)
    wavenumber: tuple[float, ...] = (0.0,)
    envelope: str = "gaussian"
    envelope_width: float = 1.0
    amplitude_width: float = 1.0
    phase_poly: tuple[float, ...] = ()
    t_end: float = 1.0
    dt: float | None = None
    safety: float = 0.1
    frame_stride: int | None = None
    frames: int = 20
    metrics: tuple[str, ...] = ("delta_distance_s1",)
    threshold: float = DEFAULT_SLOPE_THRESHOLD
    bounded_cap: float | None = None
    max_points: int | None = None

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ConfigError("n must be 1, 2 or 3")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not self.coefficient > 0:
            raise ConfigError("schedule coefficient c must be positive")
        eps = tuple(float(e) for e in self.epsilons)
        if len(eps) < 4:
            raise ConfigError("epsilon list needs at least 4 values")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("epsilon list must be positive and strictly decreasing")
        object.__setattr__(self, "epsilons", eps)
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.envelope not in ("gaussian", "sech"):
            raise ConfigError("envelope must be 'gaussian' or 'sech'")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise ConfigError(f"unknown metrics {bad}; choose from {METRICS}")
        if self.t_end == 0:
            raise ConfigError("t_end must be nonzero")
        for name in ("position", "wavenumber", "phase_poly", "metrics"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def b(self, epsilon: float) -> float:
        mag = self.coefficient * epsilon**self.exponent
        return -mag if self.focusing else mag

    def wavepacket_spec(self) -> WavepacketSpec:
        if self.n not in (1, 2):
            raise ConfigError("initial data can only be synthesized for n = 1 or 2")
        try:
            env = None
            if self.family in ("envelope-wavepacket", "coherent-state"):
                if self.envelope == "sech":
                    if self.n != 1:
                        raise ConfigError("the sech envelope is one-dimensional")
                    env = sech_envelope()
                else:
                    env = gaussian_envelope(self.n, self.envelope_width)
            amp = phase = None
            if self.family == "custom":
                w = self.amplitude_width
                amp = lambda *y: (2 / w**2) ** (len(y) / 4) * np.exp(-np.pi * sum(c**2 for c in y) / w**2)
                coeffs = self.phase_poly
                phase = lambda *y: sum(sum(ci * c**i for i, ci in enumerate(coeffs)) for c in y)
            return WavepacketSpec(
                self.family,
                self.n,
                self.beta,
                self.chirp_amplitude,
                self.chirp_rate,
                self.position,
                self.wavenumber,
                env,
                amp,
                phase if self.phase_poly else None,
            )
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def with_(self, **changes) -> "RegimeConfig":
        return replace(self, **changes)

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        for sec, keys in _SECTIONS.items():
            cp[sec] = {}
            for k in keys:
                v = getattr(self, k)
                if v is None:
                    v = "auto"
                elif isinstance(v, tuple):
                    v = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
                elif isinstance(v, bool):
                    v = "true" if v else "false"
                elif isinstance(v, float):
                    v = repr(v)
                cp[sec][k] = str(v)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


_INT = {"n", "frame_stride", "frames", "max_points"}
_TUPLE = {"epsilons", "position", "wavenumber", "phase_poly"}
_OPTIONAL = {"dt", "frame_stride", "bounded_cap", "max_points"}
_STR = {"family", "envelope"}


def parse_config(text: str) -> RegimeConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from err
    known = {f.name for f in fields(RegimeConfig)}
    kw = {}
    for sec in cp.sections():
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp[sec].items():
            if key not in known or key not in _SECTIONS[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            raw = raw.strip()
            try:
                if key in _OPTIONAL and raw.lower() in ("auto", "none", ""):
                    val = None
                elif key == "focusing":
                    val = cp[sec].getboolean(key)
                elif key == "metrics":
                    val = tuple(m.strip() for m in raw.split(",") if m.strip())
                elif key in _TUPLE:
                    val = _floats(raw)
                elif key in _INT:
                    val = int(raw)
                elif key in _STR:
                    val = raw
                else:
                    val = float(raw)
            except ValueError as err:
                raise ConfigError(f"bad value for {key}: {raw!r}") from err
            kw[key] = val
    return RegimeConfig(**kw)


def load_config(path) -> RegimeConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
