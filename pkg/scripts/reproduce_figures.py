"""Run every figure preset and write its CSV/JSON outputs under OUT/<figure>/."""
import argparse
import sys
from pathlib import Path

from adiapulse.cli import main as cli_main
from adiapulse.sweep import FIGURES


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--n-points", type=int, default=101, help="map resolution per axis")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("figures", nargs="*", default=list(FIGURES))
    args = ap.parse_args(argv)
    for name in args.figures:
        out = Path(args.out) / name
        cmd = ["figure", name, "--out", str(out), "--n-points", str(args.n_points)]
        if args.workers:
            cmd += ["--workers", str(args.workers)]
        code = cli_main(cmd)
        print(f"{name}: {'ok' if code == 0 else f'exit {code}'} -> {out}")
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
