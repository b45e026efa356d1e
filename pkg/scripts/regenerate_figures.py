"""Write one CSV per figure preset into a directory (default: figures/).

Usage: python scripts/regenerate_figures.py [outdir] [--only fig1,fig5]
"""

import argparse
import sys
from pathlib import Path

from nonclassical.cli import load_presets, main


def run(outdir: Path, only: list[str] | None) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in load_presets().sections():
        if only and name not in only:
            continue
        print(f"{name}:", file=sys.stderr)
        worst = max(worst, main(["sweep", "--preset", name, "--out", str(outdir / f"{name}.csv")]))
    return worst


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", nargs="?", default="figures", type=Path)
    parser.add_argument("--only", type=lambda s: s.split(","))
    args = parser.parse_args()
    sys.exit(run(args.outdir, args.only))
