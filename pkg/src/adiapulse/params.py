"""Pulse envelopes, system parameter records and the flat config format.

All frequencies and detunings are angular frequencies in inverse time
units; the time unit itself is whatever the caller uses consistently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# "t = +-infinity" is realised as t0 +- INFINITY_SIGMA * tau (envelope < 2e-10 of peak).
INFINITY_SIGMA = 5.0

CONFIG_KEYS = (
    "omega0_p",
    "omega0_s",
    "tau_p",
    "tau_s",
    "delta_p",
    "delta_s",
    "t_start",
    "t_end",
    "n_samples",
)


class ConfigError(ValueError):
    """Malformed or inconsistent parameter input."""


@dataclass(frozen=True)
class PulseEnvelope:
    """Gaussian Rabi envelope ``peak_rabi * exp(-(t - center_t0)**2 / width_tau**2)``."""

    peak_rabi: float
    width_tau: float
    center_t0: float = 0.0

    def __post_init__(self):
        if not self.peak_rabi >= 0:
            raise ConfigError(f"peak_rabi must be >= 0, got {self.peak_rabi}")
        if not self.width_tau > 0:
            raise ConfigError(f"width_tau must be > 0, got {self.width_tau}")

    def __call__(self, t):
        return envelope_at(self, t)


def envelope_at(p: PulseEnvelope, t):
    """Rabi frequency of ``p`` at time ``t`` (scalar or array)."""
    x = (np.asarray(t, dtype=float) - p.center_t0) / p.width_tau
    out = p.peak_rabi * np.exp(-x * x)
    return float(out) if out.ndim == 0 else out


def effective_duration(p: PulseEnvelope) -> float:
    """Pulse duration entering the |delta| >= 1/T adiabatic criterion.

    Identified with the Gaussian width tau.
    """
    return p.width_tau


@dataclass(frozen=True)
class TwoLevelSystem:
    pulse: PulseEnvelope
    detuning: float

    def window(self, sigma: float = INFINITY_SIGMA) -> tuple[float, float]:
        t0, tau = self.pulse.center_t0, self.pulse.width_tau
        return t0 - sigma * tau, t0 + sigma * tau

    def peak_time(self) -> float:
        return self.pulse.center_t0


@dataclass(frozen=True)
class LambdaSystem:
    """Pump couples psi1-psi2, Stokes couples psi2-psi3."""

    pump: PulseEnvelope
    stokes: PulseEnvelope
    delta_p: float
    delta_s: float

    @classmethod
    def simultaneous(cls, omega0_p, omega0_s, tau, delta_p, delta_s, t0=0.0):
        """Both pulses centred on ``t0`` with a common width, as in every figure."""
        return cls(
            PulseEnvelope(omega0_p, tau, t0),
            PulseEnvelope(omega0_s, tau, t0),
            delta_p,
            delta_s,
        )

    @property
    def tau_max(self) -> float:
        return max(self.pump.width_tau, self.stokes.width_tau)

    def window(self, sigma: float = INFINITY_SIGMA) -> tuple[float, float]:
        lo = min(p.center_t0 - sigma * p.width_tau for p in (self.pump, self.stokes))
        hi = max(p.center_t0 + sigma * p.width_tau for p in (self.pump, self.stokes))
        return lo, hi

    def peak_time(self) -> float:
        """Time of maximum Omega_P**2 + Omega_S**2."""
        if self.pump.center_t0 == self.stokes.center_t0:
            return self.pump.center_t0
        if self.stokes.peak_rabi == 0:
            return self.pump.center_t0
        if self.pump.peak_rabi == 0:
            return self.stokes.center_t0
        lo, hi = sorted((self.pump.center_t0, self.stokes.center_t0))
        ts = np.linspace(lo, hi, 4001)
        total = envelope_at(self.pump, ts) ** 2 + envelope_at(self.stokes, ts) ** 2
        return float(ts[int(np.argmax(total))])

    def rabi_scale(self) -> float:
        """Largest frequency scale in the problem (used for relative thresholds)."""
        return max(
            abs(self.delta_p),
            abs(self.delta_s),
            self.pump.peak_rabi,
            self.stokes.peak_rabi,
            1e-300,
        )


@dataclass(frozen=True)
class TimeGrid:
    """Output sampling; the integrator picks its own internal steps."""

    t_start: float
    t_end: float
    n_samples: int = 1001

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ConfigError("t_start must be < t_end")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ConfigError("n_samples must be an integer >= 2")

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.n_samples))

    @classmethod
    def around(cls, system, n_samples: int = 1001, sigma: float = INFINITY_SIGMA):
        """Symmetric window t0 +- sigma*tau; odd ``n_samples`` puts a sample on the peak."""
        lo, hi = system.window(sigma)
        return cls(lo, hi, n_samples)


# ---------------------------------------------------------------- config files


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


def _float(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing config key {key!r}")
        return default
    try:
        return float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r}: not a number: {cfg[key]!r}") from None


@dataclass(frozen=True)
class RunParameters:
    """Everything the flat config file can describe."""

    system: LambdaSystem
    grid: TimeGrid
    extra: dict = field(default_factory=dict, compare=False)

    def two_level(self) -> TwoLevelSystem:
        return TwoLevelSystem(self.system.pump, self.system.delta_p)


def params_from_config(cfg: dict) -> RunParameters:
    unknown = sorted(set(cfg) - set(CONFIG_KEYS) - {"system"})
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    tau_p = _float(cfg, "tau_p")
    tau_s = _float(cfg, "tau_s", tau_p)
    system = LambdaSystem(
        PulseEnvelope(_float(cfg, "omega0_p"), tau_p),
        PulseEnvelope(_float(cfg, "omega0_s", 0.0), tau_s),
        _float(cfg, "delta_p"),
        _float(cfg, "delta_s", 0.0),
    )
    lo, hi = system.window()
    n = _float(cfg, "n_samples", 1001.0)
    if n != int(n):
        raise ConfigError("n_samples must be an integer")
    grid = TimeGrid(_float(cfg, "t_start", lo), _float(cfg, "t_end", hi), int(n))
    extra = {"system": cfg["system"]} if "system" in cfg else {}
    return RunParameters(system, grid, extra)


def params_to_config(params: RunParameters) -> str:
    s, g = params.system, params.grid
    values = {
        "omega0_p": s.pump.peak_rabi,
        "omega0_s": s.stokes.peak_rabi,
        "tau_p": s.pump.width_tau,
        "tau_s": s.stokes.width_tau,
        "delta_p": s.delta_p,
        "delta_s": s.delta_s,
        "t_start": g.t_start,
        "t_end": g.t_end,
        "n_samples": g.n_samples,
    }
    lines = [f"{k} = {values[k]!r}" for k in CONFIG_KEYS]
    for k, v in params.extra.items():
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
