"""Geodesic flow on the cosphere bundle, conormal sampling and loop detection.

Phase points are ambient pairs (x, xi) with |xi| = 1 (xi tangent to the
sphere).  ``mode="closed"`` uses the exact flows: rotation in the plane of a
great circle on S^n, straight lines on T^n.  ``mode="ode"`` integrates
Hamilton's equations for H = |xi|_g^2 / 2 with classical RK4 in a
stereographic chart, renormalizing the covector onto S*M after every step.

A direction loops when the flow, for some t in [t_min, T], returns to within
``tol`` of the conormal bundle: the point is within ``tol`` of Sigma *and*
the covector's tangential component there is below ``tol``.  Near approaches
are located as sign changes (- to +) of <x - proj(x), dx/dt>, i.e. local
minima of the distance to Sigma, and refined by bisection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._parallel import parallel_map
from .errors import ConfigurationError, ModelError, PreconditionError
from .manifolds import ManifoldModel
from .submanifolds import Submanifold

DEFAULT_T_MIN = 0.1
BISECTION_TOL = 1e-10
_CHUNK = 64


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))


@dataclass(frozen=True)
class FlowSettings:
    mode: str = "closed"
    dt: float = 2e-3
    order: int = 4
    renormalize: bool = True

    def __post_init__(self):
        if self.mode not in ("closed", "ode"):
            raise ConfigurationError(f"flow mode must be 'closed' or 'ode', got {self.mode!r}")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.order != 4:
            raise ConfigurationError("only the 4th-order integrator is available")


@dataclass(frozen=True)
class LoopEvent:
    t_return: float
    landing: PhasePoint


@dataclass(frozen=True)
class LoopingEstimate:
    fraction: float
    samples: int
    T: float
    tol: float
    seed: int
    stderr: float
    loops: np.ndarray
    t_return: np.ndarray

    def summary(self) -> dict:
        return {
            "fraction": self.fraction,
            "samples": self.samples,
            "T": self.T,
            "tol": self.tol,
            "seed": self.seed,
            "stderr": self.stderr,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_id", "loops", "t_return"])
            for i, (hit, t) in enumerate(zip(self.loops, self.t_return)):
                w.writerow([i, int(hit), format(float(t), ".17g") if hit else "nan"])


# --------------------------------------------------------------------------
# flow


def _check_unit(m: ManifoldModel, x, xi):
    p = m.symbol(x, xi)
    if np.any(np.abs(p - 1) > 1e-9):
        raise PreconditionError("phase point is not on the unit cosphere bundle")
    if m.is_sphere:
        if np.any(np.abs(np.linalg.norm(x, axis=-1) - 1) > 1e-9):
            raise PreconditionError("sphere point is not of unit length")
        if np.any(np.abs(np.sum(x * xi, axis=-1)) > 1e-9):
            raise PreconditionError("covector is not tangent to the sphere")


def closed_flow(m: ManifoldModel, x, xi, t):
    """Exact flow; ``t`` broadcasts against the leading axes of ``x``."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    if m.is_sphere:
        c, s = np.cos(t), np.sin(t)
        return c * x + s * xi, -s * x + c * xi
    xt = m.canonical(x + t * xi)
    return xt, np.broadcast_to(xi, xt.shape).copy()


def _sphere_rhs(u, xi):
    r2 = np.sum(u * u, axis=-1, keepdims=True)
    du = (1 + r2) ** 2 * xi / 4
    dxi = -(1 + r2) * u * np.sum(xi * xi, axis=-1, keepdims=True) / 2
    return du, dxi


def _ode_step_sphere(x, v, h, renormalize: bool):
    s = np.where(x[..., -1:] >= 0, 1.0, -1.0)
    y = np.concatenate([x[..., :-1], s * x[..., -1:]], axis=-1)
    w = np.concatenate([v[..., :-1], s * v[..., -1:]], axis=-1)
    den = 1 + y[..., -1:]
    u = y[..., :-1] / den
    du = w[..., :-1] / den - y[..., :-1] * w[..., -1:] / den**2
    r2 = np.sum(u * u, axis=-1, keepdims=True)
    xi = 4 * du / (1 + r2) ** 2

    k1u, k1x = _sphere_rhs(u, xi)
    k2u, k2x = _sphere_rhs(u + h / 2 * k1u, xi + h / 2 * k1x)
    k3u, k3x = _sphere_rhs(u + h / 2 * k2u, xi + h / 2 * k2x)
    k4u, k4x = _sphere_rhs(u + h * k3u, xi + h * k3x)
    u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    xi = xi + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)

    r2 = np.sum(u * u, axis=-1, keepdims=True)
    udot = (1 + r2) ** 2 * xi / 4
    ud = np.sum(u * udot, axis=-1, keepdims=True)
    y = np.concatenate([2 * u, 1 - r2], axis=-1) / (1 + r2)
    w = np.concatenate([2 * udot / (1 + r2) - 4 * u * ud / (1 + r2) ** 2, -4 * ud / (1 + r2) ** 2], axis=-1)
    x = np.concatenate([y[..., :-1], s * y[..., -1:]], axis=-1)
    v = np.concatenate([w[..., :-1], s * w[..., -1:]], axis=-1)
    if renormalize:
        x = x / np.linalg.norm(x, axis=-1, keepdims=True)
        v = v - np.sum(v * x, axis=-1, keepdims=True) * x
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return x, v


def _ode_step(m: ManifoldModel, x, v, h, renormalize: bool):
    if m.is_sphere:
        return _ode_step_sphere(x, v, h, renormalize)
    # flat metric: dx/dt = xi, dxi/dt = 0 (RK4 is exact here)
    if renormalize:
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return m.canonical(x + h * v), v


def ode_flow(m: ManifoldModel, x, xi, t: float, settings: FlowSettings):
    x = np.array(x, dtype=float)
    v = np.array(xi, dtype=float)
    if t == 0:
        return x, v
    steps = max(1, math.ceil(abs(t) / settings.dt))
    h = t / steps
    for _ in range(steps):
        x, v = _ode_step(m, x, v, h, settings.renormalize)
    return x, v


def flow(m: ManifoldModel, p: PhasePoint, t: float, s: FlowSettings = FlowSettings()) -> PhasePoint:
    """Phi_t(p) on S*M."""
    _check_unit(m, p.x, p.xi)
    if s.mode == "closed":
        x, xi = closed_flow(m, p.x, p.xi, t)
    else:
        x, xi = ode_flow(m, p.x, p.xi, float(t), s)
    return PhasePoint(x, xi)


def trajectory(m: ManifoldModel, x, xi, times, s: FlowSettings):
    """States at increasing ``times`` for a batch: arrays (K, N, amb)."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if s.mode == "closed":
        return closed_flow(m, x[None], xi[None], times[:, None])
    xs = np.empty((len(times),) + x.shape)
    vs = np.empty_like(xs)
    cur_t = 0.0
    for k, t in enumerate(times):
        x, xi = ode_flow(m, x, xi, t - cur_t, s)
        cur_t = t
        xs[k], vs[k] = x, xi
    return xs, vs


# --------------------------------------------------------------------------
# conormal sampling


def _stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one sample, derived from (seed, index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def conormal_arrays(sigma: Submanifold, count: int, seed: int = 42):
    """Samples from dsigma x uniform(fiber) on supp h: arrays (X, XI, U)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    m = sigma.manifold
    vmax = sigma.max_speed if sigma.dim else 1.0
    us = np.empty((count, sigma.dim))
    zs = []
    for i in range(count):
        rng = _stream(seed, i)
        if sigma.dim:
            while True:
                u = sigma.lower + (sigma.upper - sigma.lower) * rng.random()
                uu = np.array([[u]])
                if sigma.in_support(uu)[0] and rng.random() * vmax <= sigma.speed(uu)[0]:
                    break
            us[i, 0] = u
        codim = m.dim - sigma.dim
        z = rng.standard_normal(codim)
        zs.append(z / np.linalg.norm(z))
    X = sigma.embed(us)
    frames = sigma.normal_frame(us)
    XI = np.einsum("nk,nka->na", np.array(zs), frames)
    return X, XI, us


def conormal_sample(sigma: Submanifold, count: int, seed: int = 42) -> list[PhasePoint]:
    X, XI, _ = conormal_arrays(sigma, count, seed)
    return [PhasePoint(x, xi) for x, xi in zip(X, XI)]


def conormal_residual(sigma: Submanifold, x, xi) -> tuple[np.ndarray, np.ndarray]:
    """(distance from x to Sigma, tangential part of xi at the projected point)."""
    m = sigma.manifold
    u, foot = sigma.project(x)
    disp = m.displacement(x, foot)
    return np.linalg.norm(disp, axis=-1), sigma.tangential_component(u, xi)


# --------------------------------------------------------------------------
# loop detection


def _approach(sigma: Submanifold, x, v):
    """<x - proj(x), v> and |x - proj(x)| (derivative of half squared distance)."""
    u, foot = sigma.project(x)
    disp = sigma.manifold.displacement(x, foot)
    return np.sum(disp * v, axis=-1), np.linalg.norm(disp, axis=-1)


def _scan_chunk(m, sigma, X, XI, T, tol, s, t_min):
    n = len(X)
    steps = max(1, math.ceil((T - t_min) / s.dt - 1e-9))
    times = t_min + (T - t_min) * np.arange(steps + 1) / steps
    h = times[1] - times[0]
    xs, vs = trajectory(m, X, XI, times, s)
    K = len(times)
    flat_x = xs.reshape(K * n, -1)
    g, dist = _approach(sigma, flat_x, vs.reshape(K * n, -1))
    g, dist = g.reshape(K, n), dist.reshape(K, n)
    near = np.minimum(dist[:-1], dist[1:]) <= tol + 2 * h
    ks, idx = np.nonzero((g[:-1] < 0) & (g[1:] >= 0) & near)

    t_ret = np.full(n, np.nan)
    land_x = np.full(X.shape, np.nan)
    land_xi = np.full(X.shape, np.nan)
    if len(ks) == 0:
        return t_ret, land_x, land_xi

    # bisection on every bracket at once, from the left grid state
    a = np.zeros(len(ks))
    b = np.full(len(ks), h)
    x0, v0 = xs[ks, idx], vs[ks, idx]
    iters = max(1, math.ceil(math.log2(h / BISECTION_TOL)))
    for _ in range(iters):
        mid = (a + b) / 2
        xm, vm = _advance(m, x0, v0, mid, s)
        gm, _ = _approach(sigma, xm, vm)
        left = gm < 0
        a = np.where(left, mid, a)
        b = np.where(left, b, mid)
    tau = (a + b) / 2
    xe, ve = _advance(m, x0, v0, tau, s)
    u, foot = sigma.project(xe)
    d_end = np.linalg.norm(m.displacement(xe, foot), axis=-1)
    tang = sigma.tangential_component(u, ve)
    ok = (d_end < tol) & (tang < tol) & sigma.in_support(u)
    t_hit = times[ks] + tau
    for j in np.nonzero(ok)[0]:  # brackets are time-ordered per sample
        i = idx[j]
        if np.isnan(t_ret[i]) or t_hit[j] < t_ret[i]:
            t_ret[i] = t_hit[j]
            land_x[i], land_xi[i] = xe[j], ve[j]
    return t_ret, land_x, land_xi


def _advance(m, x, v, tau, s: FlowSettings):
    if s.mode == "closed":
        return closed_flow(m, x, v, tau)
    # one RK4 step per bracket, each shorter than the sampling step
    if m.is_sphere:
        return _ode_step_sphere(x, v, tau[:, None], s.renormalize)
    return _ode_step(m, x, v, tau[:, None], s.renormalize)


def _check_loop_settings(T, tol, s: FlowSettings, t_min):
    if not T > t_min:
        raise ConfigurationError(f"T={T} must exceed t_min={t_min}")
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    if s.dt > math.sqrt(tol):
        raise ConfigurationError(
            f"sampling step dt={s.dt:g} is too coarse for tol={tol:g} (need dt <= sqrt(tol))"
        )


def detect_loops(
    m: ManifoldModel,
    sigma: Submanifold,
    X,
    XI,
    T: float,
    tol: float,
    s: FlowSettings = FlowSettings(),
    t_min: float = DEFAULT_T_MIN,
):
    """Batch form of :func:`detect_loop`: (t_return or NaN, landing x, landing xi)."""
    _check_loop_settings(T, tol, s, t_min)
    if sigma.manifold != m:
        raise ModelError("submanifold lives on a different manifold")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    XI = np.atleast_2d(np.asarray(XI, dtype=float))
    _check_unit(m, X, XI)
    chunks = [slice(i, i + _CHUNK) for i in range(0, len(X), _CHUNK)]
    parts = parallel_map(lambda sl: _scan_chunk(m, sigma, X[sl], XI[sl], T, tol, s, t_min), chunks)
    t_ret = np.concatenate([p[0] for p in parts])
    lx = np.concatenate([p[1] for p in parts])
    lxi = np.concatenate([p[2] for p in parts])
    return t_ret, lx, lxi


def detect_loop(
    m: ManifoldModel,
    p: PhasePoint,
    sigma: Submanifold,
    T: float,
    tol: float,
    s: FlowSettings = FlowSettings(),
    t_min: float = DEFAULT_T_MIN,
) -> Optional[LoopEvent]:
    """Earliest t in [t_min, T] at which Phi_t(p) is within ``tol`` of SN*Sigma, or None."""
    d, tang = conormal_residual(sigma, p.x[None], p.xi[None])
    if d[0] > tol or tang[0] > tol:
        raise PreconditionError("starting point is not on the conormal bundle")
    t_ret, lx, lxi = detect_loops(m, sigma, p.x[None], p.xi[None], T, tol, s, t_min)
    if np.isnan(t_ret[0]):
        return None
    return LoopEvent(float(t_ret[0]), PhasePoint(lx[0], lxi[0]))


def looping_fraction(
    m: ManifoldModel,
    sigma: Submanifold,
    T: float,
    samples: int = 1000,
    tol: float = 1e-3,
    seed: int = 42,
    s: FlowSettings = FlowSettings(),
    t_min: float = DEFAULT_T_MIN,
) -> LoopingEstimate:
    """Monte Carlo estimate of the measure fraction of looping conormal directions."""
    if samples < 100:
        raise ConfigurationError("looping_fraction needs at least 100 samples")
    X, XI, _ = conormal_arrays(sigma, samples, seed)
    t_ret, _, _ = detect_loops(m, sigma, X, XI, T, tol, s, t_min)
    loops = ~np.isnan(t_ret)
    frac = float(loops.mean())
    stderr = math.sqrt(frac * (1 - frac) / samples)
    return LoopingEstimate(frac, samples, T, tol, seed, stderr, loops, t_ret)
