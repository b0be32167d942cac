"""Acceptance criteria, one PASS/FAIL line each (see the terminal summary).

Run alone with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""

import csv
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from eigenscope import cli
from eigenscope.eigenbasis import EigenLevel, sphere_level_indices, zonal_at_base
from eigenscope.integrals import (
    band_maxima,
    bound_exponent,
    eigenspace_maximizer,
    fit_exponent,
    moment_table,
    weyl_curve,
)
from eigenscope.manifolds import ManifoldModel, sphere_eigenvalue
from eigenscope.sphase import (
    catalog_phase,
    fresnel_value,
    oscillatory_quadrature,
    band_hessian_pattern,
    band_phase_check,
    band_phase_critical_point,
    build_paper_phase,
    prop32_hessian_check,
    remainder_decay_fit,
)
from eigenscope.submanifolds import make_submanifold

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
S2 = ManifoldModel.sphere(2)
T2 = ManifoldModel.torus()


def test_criterion_1_point_saturation(record):
    start = time.perf_counter()
    js = range(2, 61)
    lams = [sphere_eigenvalue(j, 2) for j in js]
    vals = [zonal_at_base(S2, j) for j in js]
    elapsed = time.perf_counter() - start
    oracle = max(abs(v - math.sqrt((2 * j + 1) / (4 * math.pi))) for j, v in zip(js, vals))
    fit = fit_exponent(zip(lams, vals))
    ok = abs(fit.slope - 0.5) <= 0.02 and oracle < 1e-12 and elapsed < 1.0
    record(1, ok, f"zonal slope {fit.slope:.4f} (target 0.50 +- 0.02), oracle error {oracle:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_equator_saturation(record):
    start = time.perf_counter()
    sigma = make_submanifold(S2, "equator").resolved_for(sphere_eigenvalue(100, 2))
    samples = []
    for j in range(2, 101, 2):
        level = EigenLevel(sphere_eigenvalue(j, 2), sphere_level_indices(j, 2))
        samples.append((level.lam, eigenspace_maximizer(level, sigma).value))
    elapsed = time.perf_counter() - start
    fit = fit_exponent(samples)
    vmin = min(v for _, v in samples)
    ok = abs(fit.slope) <= 0.05 and vmin >= 0.5 and elapsed < 30
    record(2, ok, f"maximizer slope {fit.slope:.4f} (target 0.00 +- 0.05), min value {vmin:.4f}, {elapsed:.1f} s")
    assert ok


@pytest.fixture(scope="module")
def equator_table():
    return moment_table(S2, make_submanifold(S2, "equator"), 101.0)


def test_criterion_3_weyl_law(record, equator_table):
    lams = np.arange(10, 101, dtype=float)
    fit = fit_exponent(zip(lams, weyl_curve(equator_table, lams)))
    ok = abs(fit.slope - 1.0) <= 0.10 and fit.r2 >= 0.99
    record(3, ok, f"Weyl slope {fit.slope:.4f} (target 1.00 +- 0.10), r2 {fit.r2:.5f}")
    assert ok


def test_criterion_4_band_sum_bound(record, equator_table):
    sigma = make_submanifold(S2, "equator")
    expo = bound_exponent(S2, sigma)
    lams = np.arange(10, 101, dtype=float)
    vals = np.array([equator_table.norms2[equator_table.band(lam, 1.0)].sum() for lam in lams])
    ratios = vals / lams**expo
    # odd degrees vanish identically on the equator; same zero-threshold as the fits
    nonzero = vals > 1e-12 * vals.max()
    c1, c2 = ratios[nonzero].min(), ratios.max()
    ok = nonzero.sum() >= 3 and c2 / c1 <= 10
    record(
        4,
        ok,
        f"band_sum/lam^{expo:g} in [{c1:.4f}, {c2:.4f}], c2/c1 = {c2 / c1:.4f} (<= 10); "
        f"{int((~nonzero).sum())} exact-zero bands (odd j) excluded",
    )
    assert ok


def test_criterion_5_little_o_contrast(record):
    start = time.perf_counter()
    lams = np.arange(20, 201, dtype=float)
    arc_table = moment_table(T2, make_submanifold(T2, "sine_arc", eps=0.15), 201.0)
    line_table = moment_table(T2, make_submanifold(T2, "line"), 201.0)
    arc = band_maxima(arc_table, lams, 1.0, per="mode")
    arc_level = band_maxima(arc_table, lams, 1.0, per="level")
    line = band_maxima(line_table, lams, 1.0, per="mode")
    elapsed = time.perf_counter() - start
    arc_fit = fit_exponent(zip(lams, arc))
    arc_level_fit = fit_exponent(zip(lams, arc_level))
    line_fit = fit_exponent(zip(lams, line))
    # bands holding a mode constant along the line (k1 = 0)
    perp = np.array([any(2 * math.pi * k2 >= lam and 2 * math.pi * k2 <= lam + 1 for k2 in range(1, 40)) for lam in lams])
    line_exact = bool(np.all(np.abs(line[perp] - 1.0) < 1e-12)) and bool(np.all(line[~perp] < 1e-12))
    arc_ok = arc_fit.slope <= -0.35
    line_ok = line_fit.slope >= -0.05 and line_exact
    ok = arc_ok and line_ok and elapsed < 120
    record(
        5,
        ok,
        f"sine arc slope {arc_fit.slope:.3f} (need <= -0.35; eigenspace-maximizer variant {arc_level_fit.slope:.3f}) "
        f"{'ok' if arc_ok else 'NOT MET'}; line slope {line_fit.slope:.3f} with max = 1 on {int(perp.sum())} "
        f"perpendicular-constant bands {'ok' if line_ok else 'NOT MET'}; {elapsed:.1f} s",
    )
    assert ok


def _run(config: str, out: Path, *overrides: str) -> tuple[dict, Path]:
    argv = ["run", str(CONFIGS / config), "--set", f"output={out}", *[a for o in overrides for a in ("--set", o)]]
    assert cli.main(argv) == 0
    return json.loads(out.with_suffix(".json").read_text()), out.with_suffix(".csv")


def _t_returns(path: Path) -> np.ndarray:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["t_return"]) for r in rows if r["loops"] == "1"])


@pytest.fixture(scope="module")
def loop_runs(tmp_path_factory):
    start = time.perf_counter()
    base = tmp_path_factory.mktemp("loops_a")
    runs = {
        "equator": _run("c6_equator_loops.json", base / "equator"),
        "line": _run("c6_line_loops.json", base / "line"),
        "arc": _run("c6_sine_arc_loops.json", base / "arc"),
        "arc_half": _run("c6_sine_arc_loops.json", base / "arc_half", "tol=0.0005"),
    }
    return runs, time.perf_counter() - start


def test_criterion_6_looping_fractions(record, loop_runs):
    runs, elapsed = loop_runs
    eq, eq_csv = runs["equator"]
    ln, ln_csv = runs["line"]
    arc, _ = runs["arc"]
    half, _ = runs["arc_half"]
    eq_err = float(np.max(np.abs(_t_returns(eq_csv) - math.pi)))
    ln_err = float(np.max(np.abs(_t_returns(ln_csv) - 1.0)))
    ratio = arc["fraction"] / half["fraction"] if half["fraction"] > 0 else math.inf
    checks = [
        eq["fraction"] >= 0.99 and eq_err <= 1e-6,
        ln["fraction"] >= 0.99 and ln_err <= 1e-9,
        arc["fraction"] <= 0.05 and 1.5 <= ratio <= 2.5,
        all(r[0]["samples"] == 1000 for r in runs.values()),
        elapsed < 60,
    ]
    ok = all(checks)
    record(
        6,
        ok,
        f"equator {eq['fraction']:.3f} (|t-pi| <= {eq_err:.1e}); line {ln['fraction']:.3f} (|t-1| <= {ln_err:.1e}); "
        f"sine arc {arc['fraction']:.3f} at tol 1e-3, {half['fraction']:.3f} at 5e-4 (ratio {ratio:.2f}); {elapsed:.1f} s",
    )
    assert ok


def test_criterion_7_stationary_phase(record):
    quad = catalog_phase("quadratic")
    fresnel = []
    for lam in (50, 100, 200, 400):
        q = oscillatory_quadrature(quad, lam).value
        fresnel.append((lam, abs(q - fresnel_value(lam)) / abs(fresnel_value(lam))))
    fresnel_ok = all(err <= 5 / lam for lam, err in fresnel)
    lams = [50, 80, 125, 200, 320, 500, 800]
    s1 = remainder_decay_fit(catalog_phase("cubic"), lams).slope
    s2 = remainder_decay_fit(catalog_phase("product"), lams).slope
    angle = float(np.angle(oscillatory_quadrature(quad, 400).value))
    ok = fresnel_ok and abs(s1 + 1.5) <= 0.2 and abs(s2 + 2.0) <= 0.2 and abs(angle - math.pi / 4) <= 0.02
    worst = max(err * lam for lam, err in fresnel)
    record(
        7,
        ok,
        f"Fresnel max lam*relerr {worst:.3f} (<= 5); remainder slopes n=1 {s1:.3f} (-1.5), n=2 {s2:.3f} (-2.0); "
        f"angle at lam=400 off pi/4 by {abs(angle - math.pi / 4):.4f} rad",
    )
    assert ok


def test_criterion_8_hessians(record):
    prob = build_paper_phase(1, 2)
    yp = np.array([0.1])
    crit = band_phase_critical_point(1, yp)
    grad = float(np.linalg.norm(prob.grad(yp, crit[None])[0]))
    chk = band_phase_check(1, 2, yp)
    pattern = band_hessian_pattern(1)
    free = np.zeros_like(pattern, dtype=bool)
    free[1, 1] = True  # the '*' entry
    entry_err = float(np.max(np.abs(chk.hessian - pattern)[~free]))
    p12 = prop32_hessian_check(1, 2)
    p13 = prop32_hessian_check(1, 3)
    ok = (
        grad < 1e-10
        and entry_err <= 1e-9
        and abs(abs(chk.det) - 1) <= 1e-8
        and abs(abs(p12.det) - 1) <= 1e-8
        and abs(abs(p13.det) - 1) <= 1e-8
    )
    record(
        8,
        ok,
        f"band phase |grad| {grad:.1e}, max entry error {entry_err:.1e}, det {chk.det:+.10f}; "
        f"composed phase det (1,2) {p12.det:+.10f} sig {p12.signature}, (1,3) {p13.det:+.10f} sig {p13.signature} "
        f"(computed sign {'+' if p12.det > 0 else '-'}1)",
    )
    assert ok


def test_criterion_9_determinism(record, loop_runs, tmp_path):
    runs, _ = loop_runs
    same = []
    for key, config, extra in (
        ("equator", "c6_equator_loops.json", ()),
        ("line", "c6_line_loops.json", ()),
        ("arc", "c6_sine_arc_loops.json", ()),
    ):
        _, csv_b = _run(config, tmp_path / key, *extra)
        same.append(runs[key][1].read_bytes() == csv_b.read_bytes())
    ok = all(same)
    record(9, ok, f"seed-7 loop scans byte-identical across two runs: {same}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
