"""Named experiments driven by JSON configs.

Each runner takes a validated :class:`ExperimentConfig` and returns a
:class:`Report` (CSV header, rows and a JSON-able summary).  Writing files
and exit codes are the CLI's business.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .eigenbasis import enumerate_levels, sphere_level_indices, EigenLevel, eigen_frequency
from .errors import ConfigurationError
from .flow import FlowSettings, looping_fraction
from .integrals import (
    band_maxima,
    bound_exponent,
    eigenspace_moments,
    fit_exponent,
    moment_table,
    weyl_curve,
)
from .manifolds import ManifoldModel
from .sphase import (
    catalog_phase,
    find_critical_point,
    band_phase_check,
    prop32_hessian_check,
    remainder_decay_fit,
)
from .submanifolds import Submanifold, make_submanifold
from .errors import InsufficientDataError

DEFAULT_SEED = 42


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    output: str | None = None

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        if "experiment" not in raw:
            raise ConfigurationError(f"config has no 'experiment'; valid experiments: {', '.join(EXPERIMENTS)}")
        name = raw["experiment"]
        if name not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {name!r}; valid experiments: {', '.join(EXPERIMENTS)}")
        params = {k: v for k, v in raw.items() if k not in ("experiment", "seed", "output")}
        spec = EXPERIMENTS[name]
        missing = [k for k in spec.required if k not in params]
        if missing:
            raise ConfigurationError(f"experiment {name!r} is missing required field(s): {', '.join(missing)}")
        unknown = sorted(set(params) - set(spec.required) - set(spec.optional))
        if unknown:
            raise ConfigurationError(f"experiment {name!r} does not accept field(s): {', '.join(unknown)}")
        seed = raw.get("seed", DEFAULT_SEED)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")
        output = raw.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigurationError("output must be a path prefix string")
        return cls(name, params, seed, output)

    def get(self, key: str, default=None):
        return self.params.get(key, default)

    def number(self, key: str, default=None, kind=float):
        v = self.params.get(key, default)
        if v is None:
            raise ConfigurationError(f"field {key!r} is required")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigurationError(f"field {key!r} must be a number")
        if kind is int:
            if int(v) != v:
                raise ConfigurationError(f"field {key!r} must be an integer")
            return int(v)
        return float(v)


@dataclass
class Report:
    header: list[str]
    rows: list[list[Any]]
    summary: dict[str, Any]


@dataclass(frozen=True)
class ExperimentSpec:
    runner: Callable[[ExperimentConfig], Report]
    required: tuple[str, ...]
    optional: tuple[str, ...]
    header: tuple[str, ...]


# --------------------------------------------------------------------------
# config helpers


def _manifold(cfg: ExperimentConfig) -> ManifoldModel:
    spec = cfg.get("manifold", {"kind": "sphere", "dim": 2})
    if not isinstance(spec, dict):
        raise ConfigurationError("manifold must be an object like {\"kind\": \"sphere\", \"dim\": 2}")
    return ManifoldModel.from_config(spec)


def _submanifold(cfg: ExperimentConfig, m: ManifoldModel) -> Submanifold:
    spec = cfg.get("submanifold")
    if spec is None:
        raise ConfigurationError("field 'submanifold' is required")
    if isinstance(spec, str):
        name, params = spec, {}
    elif isinstance(spec, dict) and "name" in spec:
        params = {k: v for k, v in spec.items() if k != "name"}
        name = spec["name"]
    else:
        raise ConfigurationError("submanifold must be a catalog name or {\"name\": ..., params}")
    try:
        return make_submanifold(m, name, **params)
    except TypeError as exc:
        raise ConfigurationError(f"bad submanifold parameters: {exc}") from None


def _lambda_grid(cfg: ExperimentConfig) -> np.ndarray:
    if "lambdas" in cfg.params:
        lams = cfg.get("lambdas")
        if not isinstance(lams, list) or not lams:
            raise ConfigurationError("lambdas must be a non-empty list")
        return np.array([float(v) for v in lams])
    lo = cfg.number("lambda_min")
    hi = cfg.number("lambda_max")
    step = cfg.number("lambda_step", 1.0)
    if not (0 <= lo <= hi) or step <= 0:
        raise ConfigurationError("need 0 <= lambda_min <= lambda_max and lambda_step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _fit_summary(samples, prefix: str = "") -> dict[str, Any]:
    try:
        fit = fit_exponent(samples)
    except InsufficientDataError as exc:
        return {prefix + "slope": None, prefix + "fit_error": str(exc)}
    return {prefix + "slope": fit.slope, prefix + "intercept": fit.intercept, prefix + "r2": fit.r2, prefix + "dropped": fit.dropped}


# --------------------------------------------------------------------------
# runners


def run_spectrum(cfg: ExperimentConfig) -> Report:
    m = _manifold(cfg)
    levels = enumerate_levels(m, cfg.number("lambda_max"))
    rows = [[lv.lam, lv.multiplicity, lv.index_repr()] for lv in levels]
    return Report(
        ["lambda", "multiplicity", "index_repr"],
        rows,
        {"manifold": m.to_config(), "levels": len(levels), "modes": sum(lv.multiplicity for lv in levels)},
    )


def _degree_levels(cfg, m: ManifoldModel) -> list[EigenLevel]:
    if not m.is_sphere:
        raise ConfigurationError("'degrees' sweeps need a sphere manifold")
    degs = cfg.get("degrees")
    if not (isinstance(degs, list) and len(degs) == 2):
        raise ConfigurationError("degrees must be [j_min, j_max]")
    jmin, jmax = int(degs[0]), int(degs[1])
    parity = cfg.get("parity", "all")
    if parity not in ("all", "even", "odd"):
        raise ConfigurationError("parity must be all, even or odd")
    js = [j for j in range(jmin, jmax + 1) if parity == "all" or (j % 2 == 0) == (parity == "even")]
    out = []
    for j in js:
        idx = sphere_level_indices(j, m.dim)
        out.append(EigenLevel(eigen_frequency(m, idx[0]), idx))
    return out


def run_integrate(cfg: ExperimentConfig) -> Report:
    """Eigenspace maximizer value for each level up to lambda_max (or each degree)."""
    m = _manifold(cfg)
    sigma = _submanifold(cfg, m)
    if "degrees" in cfg.params:
        levels = _degree_levels(cfg, m)
        sigma = sigma.resolved_for(max(lv.lam for lv in levels))
        values = [float(np.linalg.norm(eigenspace_moments(lv, sigma))) for lv in levels]
        lams = [lv.lam for lv in levels]
    else:
        table = moment_table(m, sigma, cfg.number("lambda_max"))
        lams = table.lams.tolist()
        values = np.sqrt(table.norms2).tolist()
    rows = [[lam, v] for lam, v in zip(lams, values)]
    summary = {"manifold": m.to_config(), "submanifold": sigma.describe(), "levels": len(rows)}
    summary.update(_fit_summary(zip(lams, values)))
    if rows:
        summary["min_value"] = float(min(values))
        summary["max_value"] = float(max(values))
    return Report(["lambda", "max_integral"], rows, summary)


def run_bandsum(cfg: ExperimentConfig) -> Report:
    m = _manifold(cfg)
    sigma = _submanifold(cfg, m)
    width = cfg.number("width", 1.0)
    lams = _lambda_grid(cfg)
    table = moment_table(m, sigma, float(lams.max()) + width)
    values = [float(np.sum(table.norms2[table.band(lam, width)])) for lam in lams]
    expo = bound_exponent(m, sigma)
    ratios = np.array([v / lam**expo if lam > 0 else math.nan for lam, v in zip(lams, values)])
    vmax = max(values) if values else 0.0
    nonzero = np.array([v > 1e-12 * vmax for v in values]) & np.isfinite(ratios)
    summary = {
        "manifold": m.to_config(),
        "submanifold": sigma.describe(),
        "width": width,
        "bound_exponent": expo,
        "ratio_max": float(np.nanmax(ratios)) if len(ratios) else None,
        "ratio_min_nonzero": float(ratios[nonzero].min()) if nonzero.any() else None,
        "zero_bands": int((~nonzero).sum()),
    }
    if nonzero.any():
        summary["ratio_spread"] = summary["ratio_max"] / summary["ratio_min_nonzero"]
    summary.update(_fit_summary(zip(lams, values)))
    return Report(["lambda", "band_sum"], [[a, b] for a, b in zip(lams, values)], summary)


def run_weyl(cfg: ExperimentConfig) -> Report:
    m = _manifold(cfg)
    sigma = _submanifold(cfg, m)
    lams = _lambda_grid(cfg)
    table = moment_table(m, sigma, float(lams.max()))
    values = weyl_curve(table, lams)
    summary = {"manifold": m.to_config(), "submanifold": sigma.describe(), "expected_slope": m.dim - sigma.dim}
    summary.update(_fit_summary(zip(lams, values)))
    return Report(["lambda", "weyl_sum"], [[a, float(b)] for a, b in zip(lams, values)], summary)


def run_scaling(cfg: ExperimentConfig) -> Report:
    """Maximized band integrals: the largest |int e dmu| over eigenfunctions in [lam, lam + width]."""
    m = _manifold(cfg)
    sigma = _submanifold(cfg, m)
    if "degrees" in cfg.params:
        return run_integrate(cfg)
    per = cfg.get("per", "mode")
    width = cfg.number("width", 1.0)
    lams = _lambda_grid(cfg)
    table = moment_table(m, sigma, float(lams.max()) + width)
    values = band_maxima(table, lams, width, per=per)
    nz = values[values > 1e-12 * values.max()] if values.size and values.max() > 0 else values[:0]
    summary = {
        "manifold": m.to_config(),
        "submanifold": sigma.describe(),
        "per": per,
        "width": width,
        "bound_exponent": bound_exponent(m, sigma),
        "max_value": float(values.max()) if values.size else None,
        "min_nonzero_value": float(nz.min()) if nz.size else None,
    }
    summary.update(_fit_summary(zip(lams, values)))
    return Report(["lambda", "max_integral"], [[a, float(b)] for a, b in zip(lams, values)], summary)


def run_loopscan(cfg: ExperimentConfig) -> Report:
    m = _manifold(cfg)
    sigma = _submanifold(cfg, m)
    settings = FlowSettings(mode=cfg.get("flow", "closed"), dt=cfg.number("dt", FlowSettings.dt))
    est = looping_fraction(
        m,
        sigma,
        T=cfg.number("T"),
        samples=cfg.number("samples", 1000, kind=int),
        tol=cfg.number("tol", 1e-3),
        seed=cfg.seed,
        s=settings,
        t_min=cfg.number("t_min", 0.1),
    )
    rows = [
        [i, int(hit), float(t) if hit else math.nan] for i, (hit, t) in enumerate(zip(est.loops, est.t_return))
    ]
    summary = {"manifold": m.to_config(), "submanifold": sigma.describe(), "flow": settings.mode}
    summary.update(est.summary())
    if est.loops.any():
        summary["t_return_min"] = float(np.nanmin(est.t_return))
        summary["t_return_max"] = float(np.nanmax(est.t_return))
    return Report(["sample_id", "loops", "t_return"], rows, summary)


def run_sphase(cfg: ExperimentConfig) -> Report:
    name = cfg.get("phase", "cubic")
    radius = cfg.get("radius")
    prob = catalog_phase(name, radius=None if radius is None else float(radius))
    lams = _lambda_grid(cfg)
    x = cfg.get("x")
    cp = find_critical_point(prob, x)
    fit = remainder_decay_fit(prob, lams.tolist(), x)
    rows = [
        [r.lam, r.quadrature.real, r.quadrature.imag, r.leading.real, r.leading.imag, abs(r.remainder)]
        for r in fit.results
    ]
    summary = {
        "phase": name,
        "inner_dim": prob.inner_dim,
        "critical_point": cp.to_json(),
        "expected_slope": -(prob.inner_dim / 2 + 1),
        "slope": None if fit.floor_limited else fit.slope,
        "r2": None if fit.floor_limited else fit.r2,
        "floor_limited": fit.floor_limited,
        "max_quadrature_error": max(r.error for r in fit.results),
    }
    return Report(["lambda", "quad_re", "quad_im", "lead_re", "lead_im", "remainder_abs"], rows, summary)


def run_hessian(cfg: ExperimentConfig) -> Report:
    pairs = cfg.get("dims", [[1, 2], [1, 3], [2, 3]])
    if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
        raise ConfigurationError("dims must be a list of [d, n] pairs")
    rows, checks = [], []
    for d, n in pairs:
        for label, fn in (("band_phase", band_phase_check), ("composed_phase", prop32_hessian_check)):
            c = fn(int(d), int(n))
            rows.append([label, c.d, c.n, c.det, c.signature[0], c.signature[1], c.residual])
            checks.append({"check": label, **c.to_json()})
    return Report(
        ["check", "d", "n", "det", "sig_pos", "sig_neg", "gradient_residual"],
        rows,
        {"checks": checks},
    )


_GEOM = ("manifold",)
_SUB = ("submanifold",)
_GRID = ("lambdas", "lambda_min", "lambda_max", "lambda_step")

EXPERIMENTS: dict[str, ExperimentSpec] = {
    "spectrum": ExperimentSpec(run_spectrum, ("lambda_max",), _GEOM, ("lambda", "multiplicity", "index_repr")),
    "integrate": ExperimentSpec(
        run_integrate, _SUB, _GEOM + ("lambda_max", "degrees", "parity"), ("lambda", "max_integral")
    ),
    "bandsum": ExperimentSpec(run_bandsum, _SUB, _GEOM + _GRID + ("width",), ("lambda", "band_sum")),
    "weyl": ExperimentSpec(run_weyl, _SUB, _GEOM + _GRID, ("lambda", "weyl_sum")),
    "scaling": ExperimentSpec(
        run_scaling, _SUB, _GEOM + _GRID + ("width", "per", "degrees", "parity"), ("lambda", "max_integral")
    ),
    "loopscan": ExperimentSpec(
        run_loopscan, _SUB + ("T",), _GEOM + ("samples", "tol", "flow", "dt", "t_min"), ("sample_id", "loops", "t_return")
    ),
    "sphase": ExperimentSpec(
        run_sphase, (), ("phase", "radius", "x") + _GRID,
        ("lambda", "quad_re", "quad_im", "lead_re", "lead_im", "remainder_abs"),
    ),
    "hessian": ExperimentSpec(
        run_hessian, (), ("dims",), ("check", "d", "n", "det", "sig_pos", "sig_neg", "gradient_residual")
    ),
}

#: CSV headers the plot command accepts, mapped to the (x, y) columns it draws.
PLOT_SCHEMAS: dict[tuple[str, ...], tuple[str, str]] = {
    ("lambda", "multiplicity", "index_repr"): ("lambda", "multiplicity"),
    ("lambda", "max_integral"): ("lambda", "max_integral"),
    ("lambda", "band_sum"): ("lambda", "band_sum"),
    ("lambda", "weyl_sum"): ("lambda", "weyl_sum"),
    ("sample_id", "loops", "t_return"): ("sample_id", "t_return"),
    ("lambda", "quad_re", "quad_im", "lead_re", "lead_im", "remainder_abs"): ("lambda", "remainder_abs"),
}
