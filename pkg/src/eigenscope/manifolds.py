"""Closed-form model manifolds: the round unit sphere S^n and flat tori T^n.

Points are stored in ambient coordinates: unit vectors in R^{n+1} for the
sphere, and vectors in R^n (read modulo the periods) for the torus.  Covectors
are identified with tangent vectors through the metric, so a unit covector at
``x`` is an ambient vector of Euclidean length one (tangent to the sphere).

Charts give local coordinates with an explicit metric tensor.  Each model
ships its global charts (two stereographic charts for the sphere, the
identity chart for the torus); :func:`fermi_chart` builds coordinates adapted
to a submanifold in which the normal block of the metric is the identity
along the submanifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, ModelError

#: Fermi charts never extend past this normal radius (stays inside injectivity).
MAX_CHART_RADIUS = math.pi / 2

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class ManifoldModel:
    """A model manifold: ``kind`` is ``"sphere"`` or ``"torus"``."""

    kind: str
    dim: int
    periods: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("sphere", "torus"):
            raise ModelError(f"unknown manifold kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ModelError(f"dimension must be an integer >= 1, got {self.dim}")
        if self.kind == "torus":
            periods = tuple(float(p) for p in self.periods) or (1.0,) * self.dim
            if len(periods) != self.dim:
                raise ModelError("torus needs one period per dimension")
            if any(not p > 0 for p in periods):
                raise ModelError("torus periods must be positive")
            object.__setattr__(self, "periods", periods)
        elif self.periods:
            raise ModelError("only tori carry periods")

    @classmethod
    def sphere(cls, dim: int = 2) -> "ManifoldModel":
        return cls("sphere", dim)

    @classmethod
    def torus(cls, periods=None, dim: int = 2) -> "ManifoldModel":
        if periods is None:
            periods = (1.0,) * dim
        return cls("torus", len(tuple(periods)), tuple(periods))

    @classmethod
    def from_config(cls, spec: dict[str, Any]) -> "ManifoldModel":
        """Build from ``{"kind": "sphere", "dim": 2}`` or ``{"kind": "torus", "periods": [...]}``."""
        kind = spec.get("kind")
        if kind == "sphere":
            return cls.sphere(int(spec.get("dim", 2)))
        if kind == "torus":
            if "periods" in spec:
                return cls.torus(tuple(spec["periods"]))
            return cls.torus(dim=int(spec.get("dim", 2)))
        raise ModelError(f"unknown manifold kind {kind!r}; expected 'sphere' or 'torus'")

    def to_config(self) -> dict[str, Any]:
        if self.is_sphere:
            return {"kind": "sphere", "dim": self.dim}
        return {"kind": "torus", "periods": list(self.periods)}

    @property
    def is_sphere(self) -> bool:
        return self.kind == "sphere"

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1 if self.is_sphere else self.dim

    @property
    def volume(self) -> float:
        if self.is_sphere:
            n = self.dim
            return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)
        return float(np.prod(self.periods))

    def displacement(self, a, b) -> np.ndarray:
        """Ambient vector ``a - b``; minimal periodic image on the torus."""
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        if self.is_torus:
            L = np.asarray(self.periods)
            d = d - L * np.round(d / L)
        return d

    def distance(self, a, b) -> np.ndarray:
        """Ambient (chordal on the sphere) distance between points."""
        return np.linalg.norm(self.displacement(a, b), axis=-1)

    def canonical(self, x) -> np.ndarray:
        """Normalize points: unit length on the sphere, reduced mod periods on the torus."""
        x = np.asarray(x, dtype=float)
        if self.is_sphere:
            return x / np.linalg.norm(x, axis=-1, keepdims=True)
        return np.mod(x, np.asarray(self.periods))

    def tangent_part(self, x, v) -> np.ndarray:
        """Orthogonal projection of ambient ``v`` onto T_x M."""
        v = np.asarray(v, dtype=float)
        if self.is_sphere:
            x = np.asarray(x, dtype=float)
            return v - np.sum(v * x, axis=-1, keepdims=True) * x
        return v

    def symbol(self, x, xi) -> np.ndarray:
        """Principal symbol in ambient representation (covector length)."""
        return np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)

    def charts(self) -> tuple["Chart", ...]:
        if self.is_sphere:
            return (StereographicChart(self, 0), StereographicChart(self, 1))
        return (TorusChart(self),)

    def chart_for(self, x) -> "Chart":
        """A global chart whose domain contains ``x``."""
        for chart in self.charts():
            if np.all(chart.contains(chart.from_manifold(x))):
                return chart
        raise DomainError("point not covered by any chart")  # pragma: no cover

    def metric_at(self, point: "ChartPoint") -> np.ndarray:
        return point.chart.metric_checked(point.coords)

    def random_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.is_sphere:
            return self.canonical(rng.standard_normal((count, self.ambient_dim)))
        return rng.random((count, self.dim)) * np.asarray(self.periods)


# --------------------------------------------------------------------------
# charts


class Chart:
    """Local coordinates on a model manifold with an explicit metric."""

    chart_id: int = 0
    manifold: ManifoldModel

    @property
    def dim(self) -> int:
        return self.manifold.dim

    def to_manifold(self, coords) -> np.ndarray:
        raise NotImplementedError

    def from_manifold(self, points) -> np.ndarray:
        raise NotImplementedError

    def metric(self, coords) -> np.ndarray:
        raise NotImplementedError

    def contains(self, coords) -> np.ndarray:
        return np.ones(np.shape(coords)[:-1], dtype=bool)

    def metric_checked(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if not np.all(self.contains(coords)):
            raise DomainError(f"coordinates outside the domain of chart {self.chart_id}")
        return self.metric(coords)


@dataclass(frozen=True)
class ChartPoint:
    chart: Chart
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))

    @property
    def chart_id(self) -> int:
        return self.chart.chart_id

    def on_manifold(self) -> np.ndarray:
        return self.chart.to_manifold(self.coords)


class StereographicChart(Chart):
    """Stereographic projection; id 0 covers the closed northern hemisphere, id 1 the southern.

    The domain is capped at |u| <= 1, i.e. geodesic radius pi/2 about the pole.
    """

    def __init__(self, manifold: ManifoldModel, chart_id: int):
        if not manifold.is_sphere:
            raise ModelError("stereographic charts live on spheres")
        self.manifold = manifold
        self.chart_id = chart_id
        self._sign = 1.0 if chart_id == 0 else -1.0

    def to_manifold(self, coords):
        u = np.asarray(coords, dtype=float)
        r2 = np.sum(u * u, axis=-1, keepdims=True)
        top = self._sign * (1 - r2) / (1 + r2)
        return np.concatenate([2 * u / (1 + r2), top], axis=-1)

    def from_manifold(self, points):
        x = np.asarray(points, dtype=float)
        return x[..., :-1] / (1 + self._sign * x[..., -1:])

    def metric(self, coords):
        u = np.asarray(coords, dtype=float)
        r2 = np.sum(u * u, axis=-1)
        conf = 4.0 / (1 + r2) ** 2
        return conf[..., None, None] * np.eye(self.dim)

    def contains(self, coords):
        return np.sum(np.asarray(coords) ** 2, axis=-1) <= 1.0 + 1e-12


class TorusChart(Chart):
    """Identity chart of the torus, optionally recentred at ``origin``."""

    def __init__(self, manifold: ManifoldModel, origin=None, chart_id: int = 0):
        if not manifold.is_torus:
            raise ModelError("torus chart needs a torus")
        self.manifold = manifold
        self.chart_id = chart_id
        self.origin = np.zeros(manifold.dim) if origin is None else np.asarray(origin, float)

    def to_manifold(self, coords):
        return self.manifold.canonical(self.origin + np.asarray(coords, dtype=float))

    def from_manifold(self, points):
        if np.any(self.origin):
            return self.manifold.displacement(points, self.origin)
        return self.manifold.canonical(points)

    def metric(self, coords):
        shape = np.shape(coords)[:-1]
        return np.broadcast_to(np.eye(self.dim), shape + (self.dim, self.dim)).copy()


# --------------------------------------------------------------------------
# Fermi charts


class FermiChart(Chart):
    """Coordinates (x', xbar) with (x', 0) parametrizing the submanifold by arclength."""

    submanifold: Any
    tangential_dim: int

    @property
    def normal_dim(self) -> int:
        return self.dim - self.tangential_dim


class LatitudeFermiChart(FermiChart):
    """(arclength along the circle of colatitude theta0, latitude offset) on S^2."""

    def __init__(self, submanifold, colatitude: float):
        self.submanifold = submanifold
        self.manifold = submanifold.manifold
        self.chart_id = 2
        self.tangential_dim = 1
        self.theta0 = float(colatitude)
        self._s0 = math.sin(self.theta0)

    def to_manifold(self, coords):
        c = np.asarray(coords, dtype=float)
        theta = self.theta0 - c[..., 1]
        phi = c[..., 0] / self._s0
        return np.stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
        )

    def from_manifold(self, points):
        x = np.asarray(points, dtype=float)
        theta = np.arccos(np.clip(x[..., 2], -1.0, 1.0))
        phi = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2 * math.pi)
        return np.stack([phi * self._s0, self.theta0 - theta], axis=-1)

    def metric(self, coords):
        c = np.asarray(coords, dtype=float)
        g = np.zeros(c.shape[:-1] + (2, 2))
        g[..., 0, 0] = np.sin(self.theta0 - c[..., 1]) ** 2 / self._s0**2
        g[..., 1, 1] = 1.0
        return g

    def contains(self, coords):
        u = np.asarray(coords)[..., 1]
        theta = self.theta0 - u
        return (np.abs(u) <= MAX_CHART_RADIUS) & (theta > 0) & (theta < math.pi)


class SphereNormalChart(FermiChart):
    """Geodesic normal coordinates about a point of S^n (the d = 0 Fermi chart)."""

    def __init__(self, submanifold, base):
        self.submanifold = submanifold
        self.manifold = submanifold.manifold
        self.chart_id = 2
        self.tangential_dim = 0
        self.base = np.asarray(base, dtype=float)
        self.frame = tangent_frame(self.base)  # (n, n+1) orthonormal rows

    def to_manifold(self, coords):
        v = np.asarray(coords, dtype=float)
        r = np.linalg.norm(v, axis=-1, keepdims=True)
        direction = v @ self.frame
        sinc = np.where(r > 0, np.sin(r) / np.where(r > 0, r, 1.0), 1.0)
        return np.cos(r) * self.base + sinc * direction

    def from_manifold(self, points):
        x = np.asarray(points, dtype=float)
        c = np.clip(x @ self.base, -1.0, 1.0)
        r = np.arccos(c)[..., None]
        tang = (x - c[..., None] * self.base) @ self.frame.T
        norm = np.linalg.norm(tang, axis=-1, keepdims=True)
        return np.where(norm > 0, r * tang / np.where(norm > 0, norm, 1.0), 0.0)

    def metric(self, coords):
        v = np.asarray(coords, dtype=float)
        r = np.linalg.norm(v, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        rhat = v / safe[..., None]
        radial = np.einsum("...i,...j->...ij", rhat, rhat)
        ratio = np.where(r > 0, np.sin(r) / safe, 1.0) ** 2
        eye = np.eye(self.dim)
        return radial + ratio[..., None, None] * (eye - radial)

    def contains(self, coords):
        return np.linalg.norm(np.asarray(coords), axis=-1) < MAX_CHART_RADIUS


class TorusFermiChart(FermiChart):
    """Translated identity chart: Fermi coordinates for an axis line or a point on T^n."""

    def __init__(self, submanifold, origin, tangential_dim: int):
        self.submanifold = submanifold
        self.manifold = submanifold.manifold
        self.chart_id = 1
        self.tangential_dim = tangential_dim
        self._chart = TorusChart(self.manifold, origin)

    def to_manifold(self, coords):
        return self._chart.to_manifold(coords)

    def from_manifold(self, points):
        c = self.manifold.displacement(points, self._chart.origin)
        if self.tangential_dim:
            # arclength along the line runs over a full period
            c[..., 0] = np.mod(c[..., 0], self.manifold.periods[0])
        return c

    def metric(self, coords):
        return self._chart.metric(coords)


class SineArcFermiChart(FermiChart):
    """(arclength, signed normal offset) along the arc t -> (t, eps sin 2 pi t) on T^2."""

    def __init__(self, submanifold, eps: float, t0: float, t1: float):
        self.submanifold = submanifold
        self.manifold = submanifold.manifold
        self.chart_id = 1
        self.tangential_dim = 1
        self.eps, self.t0, self.t1 = float(eps), float(t0), float(t1)
        self.kappa_max = 4 * math.pi**2 * abs(self.eps)
        self.length = float(self.arclength(self.t1))

    def speed(self, t):
        return np.sqrt(1 + (2 * math.pi * self.eps * np.cos(2 * math.pi * t)) ** 2)

    def curvature(self, t):
        return -4 * math.pi**2 * self.eps * np.sin(2 * math.pi * t) / self.speed(t) ** 3

    def arclength(self, t):
        t = np.asarray(t, dtype=float)
        half = (t - self.t0) / 2
        nodes = self.t0 + half[..., None] * (_GL_X + 1)
        return half * np.sum(_GL_W * self.speed(nodes), axis=-1)

    def parameter(self, s):
        """Invert the arclength by Newton iteration."""
        s = np.asarray(s, dtype=float)
        t = self.t0 + s * (self.t1 - self.t0) / self.length
        for _ in range(30):
            step = (self.arclength(t) - s) / self.speed(t)
            t = t - step
            if np.all(np.abs(step) < 1e-15):
                break
        return t

    def frame(self, t):
        t = np.asarray(t, dtype=float)
        slope = 2 * math.pi * self.eps * np.cos(2 * math.pi * t)
        sp = self.speed(t)
        tangent = np.stack([1 / sp, slope / sp], axis=-1)
        normal = np.stack([-slope / sp, 1 / sp], axis=-1)
        return tangent, normal

    def curve(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([t, self.eps * np.sin(2 * math.pi * t)], axis=-1)

    def to_manifold(self, coords):
        c = np.asarray(coords, dtype=float)
        t = self.parameter(c[..., 0])
        _, normal = self.frame(t)
        return self.manifold.canonical(self.curve(t) + c[..., 1:2] * normal)

    def from_manifold(self, points):
        u = self.submanifold.project(points)[0][..., 0]
        foot = self.curve(u)
        _, normal = self.frame(u)
        offset = np.sum(self.manifold.displacement(points, foot) * normal, axis=-1)
        return np.stack([self.arclength(u), offset], axis=-1)

    def metric(self, coords):
        c = np.asarray(coords, dtype=float)
        t = self.parameter(c[..., 0])
        g = np.zeros(c.shape[:-1] + (2, 2))
        g[..., 0, 0] = (1 - c[..., 1] * self.curvature(t)) ** 2
        g[..., 1, 1] = 1.0
        return g

    def contains(self, coords):
        c = np.asarray(coords)
        return (
            (c[..., 0] >= -1e-12)
            & (c[..., 0] <= self.length + 1e-12)
            & (np.abs(c[..., 1]) * self.kappa_max < 0.5)
        )


def tangent_frame(x) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of unit vector ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(n)]))
    return q[:, 1:n].T.copy()


def fermi_chart(m: ManifoldModel, sigma) -> FermiChart:
    """Fermi coordinates adapted to the submanifold ``sigma`` of ``m``."""
    if sigma.manifold != m:
        raise ModelError("submanifold does not live on this manifold")
    if sigma.dim >= m.dim:
        raise ModelError("Fermi charts need a submanifold of positive codimension")
    return sigma.fermi_chart()


def principal_symbol(m: ManifoldModel, x: ChartPoint, xi) -> float:
    """sqrt(xi^T g^{-1}(x) xi) in the chart of ``x``."""
    if x.chart.manifold != m:
        raise ModelError("chart point belongs to a different manifold")
    g = x.chart.metric_checked(x.coords)
    xi = np.asarray(xi, dtype=float)
    val = float(xi @ np.linalg.solve(g, xi))
    return math.sqrt(max(val, 0.0))


def sphere_eigenvalue(j: int, n: int) -> float:
    """Frequency of the degree-j spherical harmonics on S^n."""
    if j < 0 or n < 1:
        raise DomainError("need j >= 0 and n >= 1")
    return math.sqrt(j * (j + n - 1))
