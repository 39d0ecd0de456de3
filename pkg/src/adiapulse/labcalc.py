"""Laboratory-unit calculators: Rabi frequency <-> intensity, effective
two-photon Rabi frequency, Doppler temperature bound and the RENP threshold.

Everything is SI internally (rad/s, W/m^2, C m, kg, K); the ``parse_*``
helpers accept the practical units used on the command line.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from scipy import constants as sc

from .errors import EmptyTable, ZeroDetuning, ZeroDipole

HBAR = sc.hbar
EPS0 = sc.epsilon_0
C_LIGHT = sc.c
K_B = sc.k
AMU = sc.physical_constants["atomic mass constant"][0]
DEBYE = 3.33564e-30  # C m

W_PER_CM2 = 1e4  # W/m^2 in one W/cm^2
PER_NS = 1e9  # rad/s in one ns^-1


@dataclass(frozen=True)
class TransitionSpec:
    wavelength: float  # m
    dipole_moment: float  # C m
    label: str = ""

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be > 0")
        if not self.dipole_moment >= 0:
            raise ValueError("dipole_moment must be >= 0")

    @classmethod
    def from_practical(cls, wavelength_nm: float, dipole_debye: float, label: str = ""):
        return cls(wavelength_nm * 1e-9, dipole_debye * DEBYE, label)


@dataclass(frozen=True)
class TwoPhotonRow:
    mu_1i: float  # C m
    mu_i2: float  # C m
    delta_1i: float  # rad/s

    def __post_init__(self):
        if self.delta_1i == 0:
            raise ZeroDetuning("intermediate-state detuning must be nonzero")


@dataclass(frozen=True)
class TwoPhotonTable:
    rows: tuple[TwoPhotonRow, ...] = ()
    calibration: float | None = None  # (rad/s) per (W/m^2); overrides the sum

    @property
    def coefficient(self) -> float:
        """Omega^(2) per unit intensity."""
        if self.calibration is not None:
            return self.calibration
        if not self.rows:
            raise EmptyTable("two-photon table needs rows or a calibration")
        s = sum(r.mu_1i * r.mu_i2 / r.delta_1i for r in self.rows)
        # Omega = sum / (2 hbar^2) * E^2 with E^2 = 2 I / (eps0 c)
        return s / (2.0 * HBAR**2) * 2.0 / (EPS0 * C_LIGHT)


@dataclass(frozen=True)
class GasSpec:
    particle_mass: float  # kg
    temperature: float = math.nan  # K; unused by the temperature bound

    def __post_init__(self):
        if not self.particle_mass > 0:
            raise ValueError("particle_mass must be > 0")
        if not (math.isnan(self.temperature) or self.temperature > 0):
            raise ValueError("temperature must be > 0")


def field_from_rabi(tr: TransitionSpec, rabi: float) -> float:
    if tr.dipole_moment == 0:
        raise ZeroDipole(f"transition {tr.label or '?'} has zero dipole moment")
    return HBAR * rabi / tr.dipole_moment


def intensity_from_rabi(tr: TransitionSpec, rabi: float) -> float:
    """Peak intensity (W/m^2) for peak Rabi frequency ``rabi`` (rad/s)."""
    e = field_from_rabi(tr, rabi)
    return 0.5 * EPS0 * C_LIGHT * e * e


def rabi_from_intensity(tr: TransitionSpec, intensity: float) -> float:
    if tr.dipole_moment == 0:
        raise ZeroDipole(f"transition {tr.label or '?'} has zero dipole moment")
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    e = math.sqrt(2.0 * intensity / (EPS0 * C_LIGHT))
    return tr.dipole_moment * e / HBAR


def two_photon_rabi(table: TwoPhotonTable, intensity: float) -> float:
    return table.coefficient * intensity


def intensity_for_two_photon_rabi(table: TwoPhotonTable, rabi: float) -> float:
    k = table.coefficient
    if k == 0:
        raise ZeroDipole("two-photon coupling vanishes")
    return rabi / k


def doppler_shift(wavelength: float, speed: float, angle: float = 0.0) -> float:
    """(2 pi v / lambda) cos(angle), rad/s."""
    return 2.0 * math.pi * speed / wavelength * math.cos(angle)


def rms_speed(gas: GasSpec, temperature: float | None = None) -> float:
    t = gas.temperature if temperature is None else temperature
    return math.sqrt(3.0 * K_B * t / gas.particle_mass)


def doppler_temperature_limit(tr: TransitionSpec, gas: GasSpec, detuning: float) -> float:
    """Temperature at which the rms Doppler shift equals ``detuning``."""
    if detuning == 0:
        raise ZeroDetuning("a temperature bound needs a nonzero detuning")
    v = detuning * tr.wavelength / (2.0 * math.pi)
    return gas.particle_mass * v * v / (3.0 * K_B)


def renp_threshold(e_eg: float, m_i: float, m_j: float) -> float:
    """E_eg/2 - (m_i + m_j)^2 / (2 E_eg), in the units of the inputs."""
    if not e_eg > 0:
        raise ValueError("e_eg must be > 0")
    if m_i < 0 or m_j < 0:
        raise ValueError("masses must be >= 0")
    return 0.5 * e_eg - (m_i + m_j) ** 2 / (2.0 * e_eg)


# ------------------------------------------------------------------ presets

BA_MASS_U = 137.327
XE_MASS_U = 131.293
XE_CALIBRATION = 0.1 * PER_NS / (1e6 * W_PER_CM2)  # 0.1 ns^-1 per MW/cm^2


@dataclass(frozen=True)
class Preset:
    kind: str  # "one_photon", "two_photon" or "doppler"
    transition: TransitionSpec | None = None
    table: TwoPhotonTable | None = None
    gas: GasSpec | None = None
    defaults: dict = field(default_factory=dict)


PRESETS = {
    "ba-pump": Preset(
        "one_photon", TransitionSpec.from_practical(553.7, 8.0, "Ba pump"),
        defaults={"rabi": 20.0 * PER_NS},
    ),
    "ba-stokes": Preset(
        "one_photon", TransitionSpec.from_practical(1500.4, 0.2, "Ba Stokes"),
        defaults={"rabi": 20.0 * PER_NS},
    ),
    "xe-pump": Preset(
        "two_photon", TransitionSpec(256e-9, 0.0, "Xe pump (two-photon)"),
        table=TwoPhotonTable(calibration=XE_CALIBRATION),
        defaults={"rabi": 20.0 * PER_NS},
    ),
    "xe-stokes": Preset(
        "one_photon", TransitionSpec.from_practical(908.0, 5.0, "Xe Stokes"),
        defaults={"rabi": 20.0 * PER_NS},
    ),
    "ba-doppler": Preset(
        "doppler", TransitionSpec.from_practical(553.7, 8.0, "Ba pump"),
        gas=GasSpec(BA_MASS_U * AMU),
        defaults={"detuning": 10.0 * PER_NS},
    ),
}


def evaluate_preset(name: str, **overrides) -> dict:
    """Run a preset; returns SI and practical units side by side."""
    try:
        pre = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown labcalc preset {name!r}; expected {', '.join(PRESETS)}")
    args = {**pre.defaults, **{k: v for k, v in overrides.items() if v is not None}}
    out: dict = {"preset": name, "label": pre.transition.label}
    if pre.kind == "one_photon":
        i = intensity_from_rabi(pre.transition, args["rabi"])
        out.update(
            rabi_rad_per_s=args["rabi"], rabi_per_ns=args["rabi"] / PER_NS,
            dipole_C_m=pre.transition.dipole_moment,
            dipole_debye=pre.transition.dipole_moment / DEBYE,
            intensity_W_per_m2=i, intensity_W_per_cm2=i / W_PER_CM2,
        )
    elif pre.kind == "two_photon":
        i = intensity_for_two_photon_rabi(pre.table, args["rabi"])
        out.update(
            rabi_rad_per_s=args["rabi"], rabi_per_ns=args["rabi"] / PER_NS,
            intensity_W_per_m2=i, intensity_W_per_cm2=i / W_PER_CM2,
        )
    else:
        gas = GasSpec(args.get("mass", pre.gas.particle_mass))
        t = doppler_temperature_limit(pre.transition, gas, args["detuning"])
        out.update(
            detuning_rad_per_s=args["detuning"], detuning_per_ns=args["detuning"] / PER_NS,
            mass_kg=gas.particle_mass, mass_u=gas.particle_mass / AMU,
            temperature_K=t,
        )
    out["wavelength_m"] = pre.transition.wavelength
    out["wavelength_nm"] = pre.transition.wavelength * 1e9
    return out


# ------------------------------------------------------------ unit parsing

_UNITS = {
    # frequencies -> rad/s
    "ns-1": ("frequency", PER_NS), "/ns": ("frequency", PER_NS),
    "us-1": ("frequency", 1e6), "s-1": ("frequency", 1.0), "/s": ("frequency", 1.0),
    # lengths -> m
    "nm": ("length", 1e-9), "um": ("length", 1e-6), "m": ("length", 1.0),
    # dipole -> C m
    "d": ("dipole", DEBYE), "debye": ("dipole", DEBYE), "cm": ("dipole", 1.0),
    # intensity -> W/m^2
    "w/cm2": ("intensity", W_PER_CM2), "kw/cm2": ("intensity", 1e3 * W_PER_CM2),
    "mw/cm2": ("intensity", 1e6 * W_PER_CM2), "gw/cm2": ("intensity", 1e9 * W_PER_CM2),
    "w/m2": ("intensity", 1.0),
    # temperature, mass
    "k": ("temperature", 1.0),
    "u": ("mass", AMU), "kg": ("mass", 1.0),
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/^0-9+-]*)\s*$")


def parse_quantity(text: str, kind: str | None = None) -> float:
    """'20ns-1' -> 2e10, '553.7 nm' -> 5.537e-7, '1 MW/cm^2' -> 1e10, ...

    A bare number is taken as already SI.  MW/cm2 means megawatt (there is no
    milliwatt reading).
    """
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2).lower().replace("^", "").replace("ns^-1", "ns-1")
    if not unit:
        return value
    try:
        unit_kind, factor = _UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {m.group(2)!r} in {text!r}")
    if kind is not None and unit_kind != kind:
        raise ValueError(f"{text!r} is a {unit_kind}, expected a {kind}")
    return value * factor
