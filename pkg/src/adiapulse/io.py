"""Deterministic CSV/JSON emission with all-or-nothing commits.

Floats are written in their shortest round-trip form (``repr``), CSVs use
``,`` and LF, and data files never carry timestamps; only the run manifest
does.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .frame import FrameTable
from .propagator import Trajectory
from .sweep import MapResult


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def trajectory_header(dim: int) -> list[str]:
    cols = ["t"]
    for i in range(1, dim + 1):
        cols += [f"re_c{i}", f"im_c{i}"]
    cols += [f"P{i}" for i in range(1, dim + 1)]
    return cols + ["re_rho", "im_rho"]


def trajectory_csv(traj: Trajectory) -> str:
    c = traj.states
    parts = [traj.times[:, None]]
    for i in range(traj.dim):
        parts += [c[:, i].real[:, None], c[:, i].imag[:, None]]
    parts += [traj.populations, traj.rho.real[:, None], traj.rho.imag[:, None]]
    return csv_text(trajectory_header(traj.dim), np.hstack(parts))


def frame_csv(table: FrameTable) -> str:
    return csv_text(table.columns, table.data)


def map_csv(m: MapResult) -> str:
    return csv_text(("x", "y", "value"), m.long_format())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class OutputBundle:
    """Files staged in memory and written together.

    ``commit`` writes each file through a temporary sibling and
    ``os.replace``; if any write fails, files it created are removed so a
    failed run leaves previously absent paths absent.
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        if name in self.files:
            raise ValueError(f"duplicate output {name!r}")
        self.files[name] = text

    def commit(self) -> list[Path]:
        created_dir = not self.out_dir.exists()
        written: list[Path] = []
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            for name, text in self.files.items():
                target = self.out_dir / name
                existed = target.exists()
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out_dir)
                try:
                    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                        fh.write(text)
                    os.replace(tmp, target)
                except BaseException:
                    Path(tmp).unlink(missing_ok=True)
                    raise
                if not existed:
                    written.append(target)
        except BaseException:
            for p in written:
                p.unlink(missing_ok=True)
            if created_dir:
                try:
                    self.out_dir.rmdir()
                except OSError:
                    pass
            raise
        return [self.out_dir / n for n in self.files]
