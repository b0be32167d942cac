"""Run every shipped config and plot each result as SVG under results/.

    python3 scripts/run_all.py [--only c6] [--out results]
"""

import argparse
import sys
from pathlib import Path

from eigenscope import cli

ROOT = Path(__file__).resolve().parents[1]

# plot kind per config stem; configs not listed are run without a plot
PLOTS = {
    "spectrum_s2": "linear",
    "c1_point_zonal": "loglog",
    "c2_equator_maximizers": "loglog",
    "c3_equator_weyl": "loglog",
    "c4_equator_bandsum": "loglog",
    "c5_line_scaling": "linear",
    "c5_sine_arc_scaling": "loglog",
    "c6_equator_loops": "linear",
    "c6_line_loops": "linear",
    "c6_sine_arc_loops": "linear",
    "c7_sphase_cubic": "loglog",
    "c7_sphase_product": "loglog",
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", default="", help="run only configs whose name contains this string")
    ap.add_argument("--out", default=str(ROOT / "results"))
    args = ap.parse_args(argv)
    out = Path(args.out)
    failed = []
    for cfg in sorted((ROOT / "configs").glob("*.json")):
        if args.only not in cfg.stem:
            continue
        prefix = out / cfg.stem
        print(f"== {cfg.stem}")
        code = cli.main(["run", str(cfg), "--set", f"output={prefix}"])
        if code == 0 and cfg.stem in PLOTS:
            code = cli.main(["plot", str(prefix) + ".csv", "--kind", PLOTS[cfg.stem], "-o", str(prefix) + ".svg"])
        if code:
            failed.append(cfg.stem)
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
