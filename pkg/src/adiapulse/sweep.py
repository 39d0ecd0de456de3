"""Gridded parameter sweeps and the named figure presets.

Every grid point is an independent propagation of an immutable system, so
points fan out to a thread pool (the integrator releases the GIL) and are
gathered back in row-major order.  A point's value depends only on its own
parameters, never on the grid it belongs to or on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AdiapulseError, NumericalError
from .frame import FrameTable, frame_trajectory
from .params import INFINITY_SIGMA, LambdaSystem, PulseEnvelope, TimeGrid, TwoLevelSystem
from .propagator import Trajectory, propagate_lambda, propagate_two_level

OBSERVABLES = ("P2_plus_P3_final", "P2_at_peak", "P1_minus_P3_at_peak", "P2_at_peak_inset")
DETUNING_AXES = ("delta_p", "delta_s")
RABI_AXES = ("omega0_p", "omega0_s")
FIGURES = ("fig1", "fig4", "fig5", "fig6", "fig7", "fig8_10", "fig11_12")
THREADS_ENV = "ADIAPULSE_THREADS"

DEFAULT_MAP_POINTS = 101
DETUNING_RANGE = (-20.0, 20.0)
RABI_RANGE = (0.0, 40.0)


class UnknownFigure(AdiapulseError, ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    x_name: str
    y_name: str
    x_values: np.ndarray
    y_values: np.ndarray
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("x_values", "y_values"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim != 1 or v.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-d array")
            d = np.diff(v)
            if v.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError(f"{name} must be strictly monotone")
            object.__setattr__(self, name, v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.y_values.size, self.x_values.size

    @classmethod
    def square(cls, x_name, y_name, lo, hi, n, **fixed):
        v = np.linspace(lo, hi, n)
        return cls(x_name, y_name, v, v.copy(), fixed)


@dataclass(frozen=True)
class MapResult:
    grid: GridSpec
    values: np.ndarray  # shape (len(y), len(x)); NaN where a point failed
    observable: str

    @property
    def failed(self) -> int:
        return int(np.isnan(self.values).sum())

    def long_format(self):
        """Rows (x, y, value) in row-major order (y outer, x inner)."""
        xx, yy = np.meshgrid(self.grid.x_values, self.grid.y_values)
        return np.column_stack([xx.ravel(), yy.ravel(), self.values.ravel()])


@dataclass(frozen=True)
class FigureResult:
    """Named outputs of a preset: trajectories, maps or frame tables."""

    name: str
    kind: str  # "traces", "map" or "frame"
    items: dict
    params: dict


def worker_count(requested: int | None = None) -> int:
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, int(n))


def extract(observable: str, traj: Trajectory) -> float:
    """Scalar observable from a Lambda trajectory sampled at (start, peak, end)."""
    peak = traj.at_peak()
    if observable == "P2_plus_P3_final":
        v = traj.final()[1] + traj.final()[2]
    elif observable in ("P2_at_peak", "P2_at_peak_inset"):
        v = peak[1]
    elif observable == "P1_minus_P3_at_peak":
        v = peak[0] - peak[2]
    else:
        raise ValueError(f"unknown observable {observable!r}")
    return float(v)


def _sample_grid(sys: LambdaSystem) -> np.ndarray:
    lo, hi = sys.window(INFINITY_SIGMA)
    return np.array([lo, sys.peak_time(), hi])


def _point_system(template: LambdaSystem, names, values) -> LambdaSystem:
    sys = template
    for name, v in zip(names, values):
        if name in ("delta_p", "delta_s"):
            sys = replace(sys, **{name: float(v)})
        elif name == "omega0_p":
            sys = replace(sys, pump=replace(sys.pump, peak_rabi=float(v)))
        elif name == "omega0_s":
            sys = replace(sys, stokes=replace(sys.stokes, peak_rabi=float(v)))
        else:
            raise ValueError(f"cannot sweep {name!r}")
    return sys


def _evaluate(observables, template, grid: GridSpec, workers):
    ny, nx = grid.shape
    points = [(iy, ix) for iy in range(ny) for ix in range(nx)]
    names = (grid.x_name, grid.y_name)

    def one(pt):
        iy, ix = pt
        sys = _point_system(template, names, (grid.x_values[ix], grid.y_values[iy]))
        try:
            traj = propagate_lambda(sys, _sample_grid(sys))
        except NumericalError:
            return [math.nan] * len(observables)
        return [extract(o, traj) for o in observables]

    n = worker_count(workers)
    if n == 1:
        rows = [one(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(one, points, chunksize=1))
    vals = np.asarray(rows, dtype=float).reshape(ny, nx, len(observables))
    return [MapResult(grid, vals[:, :, k].copy(), o) for k, o in enumerate(observables)]


def detuning_map(
    observable: str, sys_template: LambdaSystem, grid: GridSpec, workers: int | None = None
) -> MapResult:
    """One propagation per (Delta_P, Delta_S) point; failed points become NaN."""
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}")
    if {grid.x_name, grid.y_name} != set(DETUNING_AXES):
        raise ValueError("detuning_map needs delta_p and delta_s axes")
    return _evaluate([observable], sys_template, grid, workers)[0]


def rabi_map(
    sys_template: LambdaSystem, grid: GridSpec, workers: int | None = None
) -> tuple[MapResult, MapResult]:
    """(P1 - P3 at peak, P2 at peak) over the pump/Stokes peak Rabi frequencies."""
    if {grid.x_name, grid.y_name} != set(RABI_AXES):
        raise ValueError("rabi_map needs omega0_p and omega0_s axes")
    diff, inset = _evaluate(
        ["P1_minus_P3_at_peak", "P2_at_peak_inset"], sys_template, grid, workers
    )
    return diff, inset


# ----------------------------------------------------------------- presets

# Absolute detunings the captions leave open (see README, "Preset choices").
FIG1_DELTA = 1.0
FIG6_DELTA_P = 5.0
FIG7_DELTA_P = 5.0
FIG8_10_DELTA_P = 4.5
FIG11_12_DELTA_P = 5.0

TRACE_SAMPLES = 1001


def fig1_system(ratio: float, delta: float = FIG1_DELTA, tau: float = 8.0) -> TwoLevelSystem:
    return TwoLevelSystem(PulseEnvelope(ratio * delta, tau), delta)


def fig4_template(tau: float = 6.5, omega0: float = 20.0) -> LambdaSystem:
    return LambdaSystem.simultaneous(omega0, omega0, tau, 0.0, 0.0)


def fig6_system(ratio: float, delta_p: float = FIG6_DELTA_P, tau: float = 6.0) -> LambdaSystem:
    om = ratio * delta_p
    return LambdaSystem.simultaneous(om, om, tau, delta_p, 2.0 * delta_p)


def fig7_template(tau: float = 6.5, delta_p: float = FIG7_DELTA_P) -> LambdaSystem:
    return LambdaSystem.simultaneous(0.0, 0.0, tau, delta_p, 2.0 * delta_p)


def fig8_10_system(delta_p: float = FIG8_10_DELTA_P, tau: float = 6.0) -> LambdaSystem:
    om = 50.0 / 9.0 * delta_p
    return LambdaSystem.simultaneous(om, om, tau, delta_p, 14.0 / 9.0 * delta_p)


def fig11_12_system(delta_p: float = FIG11_12_DELTA_P, tau: float = 6.0) -> LambdaSystem:
    om = 4.0 * delta_p
    return LambdaSystem.simultaneous(om, om, tau, delta_p, 2.0 * delta_p)


def _system_params(sys) -> dict:
    if isinstance(sys, TwoLevelSystem):
        return {"omega0": sys.pulse.peak_rabi, "tau": sys.pulse.width_tau, "delta": sys.detuning}
    return {
        "omega0_p": sys.pump.peak_rabi,
        "omega0_s": sys.stokes.peak_rabi,
        "tau_p": sys.pump.width_tau,
        "tau_s": sys.stokes.width_tau,
        "delta_p": sys.delta_p,
        "delta_s": sys.delta_s,
    }


def _map_params(template, grid):
    return {
        "template": _system_params(template),
        "x_name": grid.x_name,
        "y_name": grid.y_name,
        "x_range": [float(grid.x_values[0]), float(grid.x_values[-1])],
        "y_range": [float(grid.y_values[0]), float(grid.y_values[-1])],
        "shape": list(grid.shape),
    }


def figure_preset(
    name: str, n_points: int = DEFAULT_MAP_POINTS, workers: int | None = None
) -> FigureResult:
    """Run a named figure's parameter set.  ``n_points`` sets map resolution."""
    if name == "fig1":
        items, params = {}, {}
        for ratio in (1, 4, 10):
            sys = fig1_system(ratio)
            key = f"ratio_{ratio}"
            items[key] = propagate_two_level(sys, TimeGrid.around(sys, TRACE_SAMPLES))
            params[key] = _system_params(sys)
        return FigureResult(name, "traces", items, params)

    if name in ("fig4", "fig5"):
        obs = "P2_plus_P3_final" if name == "fig4" else "P2_at_peak"
        template = fig4_template()
        grid = GridSpec.square("delta_p", "delta_s", *DETUNING_RANGE, n_points)
        m = detuning_map(obs, template, grid, workers)
        return FigureResult(name, "map", {obs: m}, _map_params(template, grid))

    if name == "fig6":
        items, params = {}, {}
        for ratio in (2, 4, 10):
            sys = fig6_system(ratio)
            key = f"ratio_{ratio}"
            items[key] = propagate_lambda(sys, TimeGrid.around(sys, TRACE_SAMPLES))
            params[key] = _system_params(sys)
        return FigureResult(name, "traces", items, params)

    if name == "fig7":
        template = fig7_template()
        grid = GridSpec.square("omega0_p", "omega0_s", *RABI_RANGE, n_points)
        diff, inset = rabi_map(template, grid, workers)
        return FigureResult(
            name, "map", {diff.observable: diff, inset.observable: inset},
            _map_params(template, grid),
        )

    if name in ("fig8_10", "fig11_12"):
        sys = fig8_10_system() if name == "fig8_10" else fig11_12_system()
        times = TimeGrid.around(sys, TRACE_SAMPLES).times()
        table: FrameTable = frame_trajectory(sys, times)
        return FigureResult(name, "frame", {"frame": table}, {"frame": _system_params(sys)})

    raise UnknownFigure(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
