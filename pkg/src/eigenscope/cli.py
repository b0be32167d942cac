"""Command line driver: ``eigenscope run`` and ``eigenscope plot``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from .errors import EigenscopeError, ResourceError
from .experiments import EXPERIMENTS, PLOT_SCHEMAS, ExperimentConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".17g")
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _parse_override(item: str):
    if "=" not in item:
        raise ValueError(f"--set expects key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _apply(raw: dict, key: str, value) -> None:
    parts = key.split(".")
    node = raw
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {} if p not in node or not isinstance(node[p], str) else {"name": node[p]}
        node = node[p]
    node[parts[-1]] = value


def load_config(path: str, overrides=()) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    for item in overrides:
        _apply(raw, *_parse_override(item))
    return ExperimentConfig.from_dict(raw)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config, args.set or [])
    except (ValueError, EigenscopeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    prefix = Path(cfg.output or f"results/{cfg.experiment}")
    start = time.perf_counter()
    try:
        report = EXPERIMENTS[cfg.experiment].runner(cfg)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, EigenscopeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    elapsed = time.perf_counter() - start
    summary = {"experiment": cfg.experiment, "seed": cfg.seed, **report.summary}
    prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path = prefix.with_name(prefix.name + ".json")
    write_csv(csv_path, report.header, report.rows)
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True, default=_json_default))
    print(f"wrote {csv_path} and {json_path} in {elapsed:.2f} s")
    return EXIT_OK


def _read_table(path: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    header = tuple(rows[0])
    if header not in PLOT_SCHEMAS:
        raise ValueError(f"{path}: header {','.join(header)} matches no documented schema")
    if len(rows) < 2:
        raise ValueError(f"{path} has a header but no data")
    xcol, ycol = PLOT_SCHEMAS[header]
    xi, yi = header.index(xcol), header.index(ycol)
    xs, ys = [], []
    for r in rows[1:]:
        if len(r) != len(header):
            raise ValueError(f"{path}: row {r} does not match the header")
        xs.append(float(r[xi]))
        ys.append(float(r[yi]))
    return xcol, ycol, xs, ys


def cmd_plot(args) -> int:
    try:
        xcol, ycol, xs, ys = _read_table(args.csv)
    except (OSError, ValueError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .integrals import fit_exponent

    plt.rcParams["svg.fonttype"] = "none"
    plt.rcParams["svg.hashsalt"] = "eigenscope"
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
    if args.kind == "loglog":
        pos = [(x, y) for x, y in pts if x > 0 and y > 0]
        if not pos:
            print("plot error: no positive data for a log-log plot", file=sys.stderr)
            plt.close(fig)
            return EXIT_CONFIG
        ax.loglog([p[0] for p in pos], [p[1] for p in pos], "o", ms=3)
        try:
            fit = fit_exponent(pos)
            xs_fit = sorted(p[0] for p in pos)
            ax.loglog(xs_fit, fit.predict(xs_fit), "-", lw=1)
            ax.annotate(f"slope = {fit.slope:.2f}", xy=(0.05, 0.9), xycoords="axes fraction")
        except EigenscopeError:
            pass
    else:
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", ms=3, lw=0.8)
    ax.set_xlabel(xcol)
    ax.set_ylabel(ycol)
    fig.tight_layout()
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eigenscope", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field (dotted keys nest)")
    r.set_defaults(func=cmd_run)
    q = sub.add_parser("plot", help="plot a result CSV as SVG")
    q.add_argument("csv")
    q.add_argument("--kind", choices=("loglog", "linear"), default="loglog")
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
