"""``adiapulse`` command line: simulate, frame, map, figure, adiabaticity, labcalc.

Exit codes: 0 success, 1 parameter/config/output error, 2 numerical failure.
Every successful run writes its data files plus ``manifest.json``; a run
can be repeated from that manifest with ``--replay``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import io as aio
from .adiabaticity import (
    classify_detunings,
    gap_report,
    limit_gaps,
    theta_extrema_check,
    two_level_adiabatic,
)
from .errors import AdiapulseError, NumericalError
from .frame import frame_trajectory
from .labcalc import PRESETS, evaluate_preset, parse_quantity
from .params import CONFIG_KEYS, ConfigError, params_from_config, read_config
from .propagator import DEFAULT_ATOL, DEFAULT_RTOL, propagate_lambda, propagate_two_level
from .sweep import (
    DETUNING_RANGE,
    FIGURES,
    OBSERVABLES,
    RABI_RANGE,
    GridSpec,
    detuning_map,
    figure_preset,
    rabi_map,
)

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 1, 2
MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which would collide with
    # the numerical-failure code
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p):
    p.add_argument("--out", default=".", help="output directory (default: cwd)")
    p.add_argument("--time-unit", default="a.u.", help="label recorded in outputs; no conversion")
    p.add_argument("--seed", type=int, default=None, help="recorded only; dynamics are deterministic")


def _add_system(p):
    p.add_argument("--config", help="flat key = value parameter file")
    for key in CONFIG_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_RTOL)
    p.add_argument("--abs-tol", type=float, default=DEFAULT_ATOL)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="adiapulse", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"adiapulse {__version__}")
    ap.add_argument("--replay", metavar="MANIFEST", help="re-run the command in a manifest")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="propagate one system and write its trajectory")
    _add_system(p)
    p.add_argument("--system", choices=("lambda", "two-level"), default=None)
    _add_common(p)

    p = sub.add_parser("frame", help="adiabatic-frame trajectory of a Lambda system")
    _add_system(p)
    _add_common(p)

    p = sub.add_parser("map", help="detuning or Rabi-frequency map")
    p.add_argument("kind", choices=("detuning", "rabi"))
    _add_system(p)
    p.add_argument("--observable", choices=OBSERVABLES, default="P2_plus_P3_final")
    p.add_argument("--n-points", type=int, default=101)
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    p.add_argument("--workers", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("figure", help="run a named figure preset")
    p.add_argument("name", choices=FIGURES)
    p.add_argument("--n-points", type=int, default=101)
    p.add_argument("--workers", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("adiabaticity", help="gap classification of a detuning pair")
    p.add_argument("--delta-p", type=float, required=True)
    p.add_argument("--delta-s", type=float, required=True)
    p.add_argument("--duration", type=float, default=None, help="T for the two-level check")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--omega0", type=float, default=None, help="also report gaps vs couplings at t=0")
    p.add_argument("--tau", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("labcalc", help="laboratory-unit calculators")
    p.add_argument("preset", choices=tuple(PRESETS))
    p.add_argument("--rabi", default=None, help="e.g. 20ns-1")
    p.add_argument("--detuning", default=None, help="e.g. 10ns-1")
    p.add_argument("--mass", default=None, help="e.g. 137.327u")
    _add_common(p)
    return ap


# ----------------------------------------------------------------- commands


def _run_parameters(args):
    cfg = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = repr(int(v)) if key == "n_samples" else repr(v)
    if getattr(args, "system", None):
        cfg["system"] = args.system
    return params_from_config(cfg)


def _system_dict(params):
    s, g = params.system, params.grid
    return {
        "omega0_p": s.pump.peak_rabi, "omega0_s": s.stokes.peak_rabi,
        "tau_p": s.pump.width_tau, "tau_s": s.stokes.width_tau,
        "delta_p": s.delta_p, "delta_s": s.delta_s,
        "t_start": g.t_start, "t_end": g.t_end, "n_samples": g.n_samples,
    }


def cmd_simulate(args, bundle):
    params = _run_parameters(args)
    kind = params.extra.get("system", "lambda")
    if kind not in ("lambda", "two-level"):
        raise ConfigError(f"unknown system {kind!r}")
    if kind == "two-level":
        traj = propagate_two_level(params.two_level(), params.grid, args.rel_tol, abs_tol=args.abs_tol)
    else:
        traj = propagate_lambda(params.system, params.grid, args.rel_tol, abs_tol=args.abs_tol)
    bundle.add("trajectory.csv", aio.trajectory_csv(traj))
    summary = {
        "system": kind,
        "parameters": _system_dict(params),
        "peak_time": traj.peak_time,
        "populations_at_peak": traj.at_peak(),
        "populations_final": traj.final(),
        "excited_final": traj.excited_final,
        "norm_error": traj.norm_error(),
    }
    bundle.add("summary.json", aio.json_text(summary))
    return {"parameters": _system_dict(params), "system": kind}


def cmd_frame(args, bundle):
    params = _run_parameters(args)
    table = frame_trajectory(params.system, params.grid.times())
    bundle.add("frame.csv", aio.frame_csv(table))
    return {"parameters": _system_dict(params)}


def cmd_map(args, bundle):
    params = _run_parameters(args)
    if args.n_points < 1:
        raise ConfigError("--n-points must be >= 1")
    if args.kind == "detuning":
        lo, hi = args.range or DETUNING_RANGE
        grid = GridSpec.square("delta_p", "delta_s", lo, hi, args.n_points)
        maps = [detuning_map(args.observable, params.system, grid, args.workers)]
    else:
        lo, hi = args.range or RABI_RANGE
        grid = GridSpec.square("omega0_p", "omega0_s", lo, hi, args.n_points)
        maps = list(rabi_map(params.system, grid, args.workers))
    meta = {"template": _system_dict(params), "kind": args.kind, "range": [lo, hi],
            "n_points": args.n_points}
    for m in maps:
        bundle.add(f"map_{m.observable}.csv", aio.map_csv(m))
    bundle.add("map_params.json", aio.json_text({**meta, "failed_points": sum(m.failed for m in maps)}))
    return meta


def cmd_figure(args, bundle):
    res = figure_preset(args.name, args.n_points, args.workers)
    for key, item in res.items.items():
        stem = f"{res.name}_{key}"
        if res.kind == "traces":
            bundle.add(stem + ".csv", aio.trajectory_csv(item))
        elif res.kind == "map":
            bundle.add(stem + ".csv", aio.map_csv(item))
        else:
            bundle.add(stem + ".csv", aio.frame_csv(item))
    bundle.add(f"{res.name}_params.json", aio.json_text({"figure": res.name, **res.params}))
    return {"figure": res.name, "n_points": args.n_points}


def cmd_adiabaticity(args, bundle):
    cls = classify_detunings(args.delta_p, args.delta_s, args.tol)
    res = theta_extrema_check(args.delta_p, args.delta_s)
    g12, g32 = limit_gaps(args.delta_p, args.delta_s)
    out = {
        "delta_p": args.delta_p,
        "delta_s": args.delta_s,
        "class": cls.kind.value,
        "lines": list(cls.lines),
        "limit_gap": cls.limit_gap,
        "limit_gap_12": g12,
        "limit_gap_32": g32,
        "theta_residuals": {
            "min_12": res.min_12, "min_32": res.min_32,
            "max_poly": res.max_poly, "max_factored": res.max_factored,
        },
    }
    if args.duration is not None:
        out["two_level_adiabatic"] = two_level_adiabatic(args.delta_p, args.duration)
    if args.omega0 is not None:
        if args.tau is None:
            raise ConfigError("--omega0 needs --tau")
        from .params import LambdaSystem

        rep = gap_report(LambdaSystem.simultaneous(args.omega0, args.omega0, args.tau,
                                                   args.delta_p, args.delta_s), 0.0)
        out["gap_report_t0"] = {
            "gap_12": rep.gap_12, "gap_32": rep.gap_32,
            "coupling_12": rep.coupling_12, "coupling_32": rep.coupling_32,
            "margin": rep.margin, "adiabatic": rep.adiabatic,
        }
    bundle.add("adiabaticity.json", aio.json_text(out))
    return {k: out[k] for k in ("delta_p", "delta_s")}


def cmd_labcalc(args, bundle):
    over = {}
    try:
        if args.rabi is not None:
            over["rabi"] = parse_quantity(args.rabi, "frequency")
        if args.detuning is not None:
            over["detuning"] = parse_quantity(args.detuning, "frequency")
        if args.mass is not None:
            over["mass"] = parse_quantity(args.mass, "mass")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = evaluate_preset(args.preset, **over)
    text = aio.json_text(out)
    bundle.add("labcalc.json", text)
    sys.stdout.write(text)
    return {"preset": args.preset, **over}


COMMANDS = {
    "simulate": cmd_simulate,
    "frame": cmd_frame,
    "map": cmd_map,
    "figure": cmd_figure,
    "adiabaticity": cmd_adiabaticity,
    "labcalc": cmd_labcalc,
}


def _replay_argv(path) -> list[str]:
    try:
        manifest = json.loads(Path(path).read_text())
        argv = manifest["argv"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot replay {path}: {exc}") from None
    if not isinstance(argv, list) or not all(isinstance(a, str) for a in argv):
        raise ConfigError(f"cannot replay {path}: malformed argv")
    return argv


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.replay:
            if args.command:
                raise UsageError("--replay takes no subcommand")
            argv = _replay_argv(args.replay)
            args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand; see --help")
        bundle = aio.OutputBundle(args.out)
        recorded = COMMANDS[args.command](args, bundle)
        manifest = {
            "command": args.command,
            "argv": [a for a in argv],
            "parameters": recorded,
            "tool_version": __version__,
            "tolerances": {"rel_tol": getattr(args, "rel_tol", None),
                           "abs_tol": getattr(args, "abs_tol", None)},
            "time_unit": args.time_unit,
            "seed": args.seed,
            "outputs": sorted(bundle.files),
            "timestamp": aio.timestamp(),
        }
        bundle.add(MANIFEST, aio.json_text(manifest))
        bundle.commit()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, AdiapulseError, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return EXIT_OK


def main(argv=None) -> int:
    return run(list(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    sys.exit(main())
